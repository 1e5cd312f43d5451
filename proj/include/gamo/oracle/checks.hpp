#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gamo/diffcore/tensor.hpp"
#include "gamo/evalor/divergence.hpp"
#include "gamo/evalor/metrics.hpp"
#include "gamo/model/networks.hpp"

// Independent oracles for the numerical core. Every check recomputes its
// reference with plain scalar loops and never calls the code under test to
// build the expected value.

namespace gamo::oracle {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct OracleOptions {
  std::uint64_t seed = 20240601;
  // Negative control: corrupts every autodiff gradient before comparison.
  bool inject_gradient_fault = false;
};

// Pinned tolerances.
inline constexpr double kFdStep = 1e-5;
inline constexpr double kGradRelTol = 1e-4;
// Denominator floor of the relative gradient error |a - n| / max(|a|, |n|, floor).
inline constexpr double kGradRelFloor = 1e-4;
inline constexpr double kSimplexTol = 1e-9;
inline constexpr double kNegativeWeightTol = 1e-12;
inline constexpr double kLossTol = 1e-12;
inline constexpr double kOptimalMTol = 1e-6;
inline constexpr double kTheoremVarianceTol = 1e-10;
inline constexpr double kSegmentTol = 1e-9;
inline constexpr double kFrequencyTol = 0.02;

// Central-difference gradient checks, >= `instances` random cases per op.
std::vector<CheckResult> gradient_checks(const OracleOptions& opt, std::size_t instances = 100);
// generate() outputs are convex combinations of X_i.
CheckResult convexity_check(const OracleOptions& opt, std::size_t calls = 1000);
// Vectorised losses against per-term loops.
std::vector<CheckResult> loss_checks(const OracleOptions& opt, std::size_t batches = 100);
// Closed-form M* against golden-section search, and domination of random M.
std::vector<CheckResult> optimal_classifier_checks(const OracleOptions& opt, std::size_t instances = 50,
                                                   std::size_t candidates = 1000);
// J(M*) minus the mass-weighted JS sum is constant over random p^g.
CheckResult theorem1_check(const OracleOptions& opt, std::size_t draws = 100);
// Same spread measured with the plain equal-weight JS sum (informational).
CheckResult theorem1_plain_sum_spread(const OracleOptions& opt, std::size_t draws = 100);
CheckResult smote_segment_check(const OracleOptions& opt);
std::vector<CheckResult> label_frequency_checks(const OracleOptions& opt, std::size_t draws = 100000);
std::vector<CheckResult> metric_checks(const OracleOptions& opt, std::size_t matrices = 1000);

// Everything above except the informational spread.
std::vector<CheckResult> run_all(const OracleOptions& opt);

// Scalar transcriptions of the per-sample loss terms, averaged over rows.
double naive_classifier_loss(model::LossVariant v, const diff::Tensor& m, std::span<const int> labels);
double naive_generator_loss_vs_classifier(model::LossVariant v, const diff::Tensor& m, std::span<const int> labels);
double naive_generator_loss_vs_discriminator(model::LossVariant v, const diff::Tensor& d);
double naive_discriminator_loss(model::LossVariant v, const diff::Tensor& d, bool real);

// Objective of the classifier-generator game written term by term.
double naive_objective(const eval::DiscreteDistributionSet& s, const eval::ClassifierTable& m);

// Maximiser of a unimodal f on [lo, hi].
double golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

double naive_acsa(const eval::ConfusionMatrix& cm);
double naive_gm(const eval::ConfusionMatrix& cm);

}  // namespace gamo::oracle
