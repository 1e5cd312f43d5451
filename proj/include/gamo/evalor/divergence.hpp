#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace gamo::eval {

// KL(p || q) in nats with 0 log 0 = 0. Infinite if p has mass where q has none.
double kl_divergence(std::span<const double> p, std::span<const double> q);

// Jensen-Shannon divergence in nats. With weights (w, 1 - w) this is the
// generalised form w KL(p||m) + (1 - w) KL(q||m), m = w p + (1 - w) q;
// the default is w = 1/2, bounded by ln 2.
double js_divergence(std::span<const double> p, std::span<const double> q,
                     std::optional<std::array<double, 2>> weights = std::nullopt);

/// Real and generated class-conditional distributions of a c-class problem
/// on a shared finite support. Class c-1 is the majority (largest prior).
struct DiscreteDistributionSet {
  std::size_t support = 0;
  std::vector<std::vector<double>> real;       // p_i^d
  std::vector<std::vector<double>> generated;  // p_i^g
  std::vector<double> priors;                  // P_i

  std::size_t classes() const noexcept { return priors.size(); }
  void validate() const;

  // Mass of class i's line under the classifier objective at support point x:
  // P_i p_i^d(x) + (P_c - P_i) p_i^g(x).
  double class_mixture(std::size_t i, std::size_t x) const;
};

using ClassifierTable = std::vector<std::vector<double>>;  // [class][support point]

// Per-line pointwise maximiser of the classifier-generator objective:
// M_i(x) = a_i(x) / (a_i(x) + b_i(x)), where a_i is class i's mixture and
// b_i the sum of every other class's mixture; 1/2 where both vanish.
ClassifierTable optimal_classifier(const DiscreteDistributionSet& dset);

// The objective J(G, M) on the discrete set (natural log, 0 log 0 = 0).
double classifier_objective(const DiscreteDistributionSet& dset, const ClassifierTable& m);

/// Decomposition of max_M J into Jensen-Shannon terms.
///
/// For class i let a_i, b_i be the mixtures above with masses A_i, B_i and
/// normalised forms alpha_i, beta_i. Then
///   max_M J = sum_i (A_i + B_i) JS_{pi_i}(alpha_i || beta_i) + offset,
///   pi_i = A_i / (A_i + B_i),  offset = sum_i A_i ln pi_i + B_i ln(1 - pi_i).
/// A_i = P_c and B_i = (c - 1) P_c regardless of the generated distributions,
/// so the weighted sum and max_M J differ by a constant.
struct JsDecomposition {
  std::vector<double> class_mass;   // A_i
  std::vector<double> rest_mass;    // B_i
  std::vector<double> js;           // JS(alpha_i || beta_i), equal weights
  std::vector<double> weighted_js;  // JS_{pi_i}(alpha_i || beta_i)
  double sum = 0.0;                 // sum_i js
  double mass_weighted_sum = 0.0;   // sum_i (A_i + B_i) weighted_js
  double offset = 0.0;
};

JsDecomposition theorem1_terms(const DiscreteDistributionSet& dset);
// Sum over classes of JS between the normalised class mixture and the
// normalised mixture of all other classes.
double theorem1_sum(const DiscreteDistributionSet& dset);

}  // namespace gamo::eval
