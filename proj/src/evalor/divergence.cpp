#include "gamo/evalor/divergence.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "gamo/error.hpp"

namespace gamo::eval {

namespace {

constexpr double kSumTolerance = 1e-9;

void check_distribution(std::span<const double> p, const char* what) {
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw DataError(std::string(what) + " has a negative or non-finite entry");
    s += v;
  }
  if (std::abs(s - 1.0) > kSumTolerance) {
    throw DataError(std::string(what) + " sums to " + std::to_string(s) + ", not 1");
  }
}

double sum_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) throw ShapeError("KL divergence over supports of different size");
  double d = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    if (q[x] == 0.0) return std::numeric_limits<double>::infinity();
    d += p[x] * std::log(p[x] / q[x]);
  }
  return d;
}

double js_divergence(std::span<const double> p, std::span<const double> q,
                     std::optional<std::array<double, 2>> weights) {
  if (p.size() != q.size()) {
    throw ShapeError("JS divergence over supports of size " + std::to_string(p.size()) + " and " +
                     std::to_string(q.size()));
  }
  check_distribution(p, "first distribution");
  check_distribution(q, "second distribution");
  const auto [wp, wq] = weights.value_or(std::array<double, 2>{0.5, 0.5});
  if (wp < 0.0 || wq < 0.0 || std::abs(wp + wq - 1.0) > kSumTolerance) {
    throw DataError("JS weights must be nonnegative and sum to 1");
  }
  std::vector<double> m(p.size());
  for (std::size_t x = 0; x < p.size(); ++x) m[x] = wp * p[x] + wq * q[x];
  double d = 0.0;
  if (wp > 0.0) d += wp * kl_divergence(p, m);
  if (wq > 0.0) d += wq * kl_divergence(q, m);
  return d;
}

void DiscreteDistributionSet::validate() const {
  const std::size_t c = classes();
  if (c < 2) throw DataError("distribution set needs at least two classes");
  if (real.size() != c || generated.size() != c) throw ShapeError("distribution set: class counts differ");
  for (std::size_t i = 0; i < c; ++i) {
    if (real[i].size() != support || generated[i].size() != support) {
      throw ShapeError("distribution set: class " + std::to_string(i) + " has the wrong support size");
    }
    check_distribution(real[i], "real distribution");
    check_distribution(generated[i], "generated distribution");
  }
  check_distribution(priors, "priors");
  for (std::size_t i = 0; i + 1 < c; ++i) {
    if (priors[i] > priors[c - 1]) throw DataError("the last class must carry the largest prior");
  }
}

double DiscreteDistributionSet::class_mixture(std::size_t i, std::size_t x) const {
  const double pc = priors.back();
  return priors[i] * real[i][x] + (pc - priors[i]) * generated[i][x];
}

namespace {

// a_i(x) and b_i(x) for every class and support point.
void mixtures(const DiscreteDistributionSet& d, std::vector<std::vector<double>>& a,
              std::vector<std::vector<double>>& b) {
  const std::size_t c = d.classes();
  a.assign(c, std::vector<double>(d.support));
  b.assign(c, std::vector<double>(d.support, 0.0));
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t x = 0; x < d.support; ++x) a[i][x] = d.class_mixture(i, x);
  for (std::size_t i = 0; i < c; ++i)
    for (std::size_t j = 0; j < c; ++j)
      if (j != i)
        for (std::size_t x = 0; x < d.support; ++x) b[i][x] += a[j][x];
}

}  // namespace

ClassifierTable optimal_classifier(const DiscreteDistributionSet& dset) {
  dset.validate();
  std::vector<std::vector<double>> a, b;
  mixtures(dset, a, b);
  ClassifierTable m(dset.classes(), std::vector<double>(dset.support));
  for (std::size_t i = 0; i < dset.classes(); ++i) {
    for (std::size_t x = 0; x < dset.support; ++x) {
      const double s = a[i][x] + b[i][x];
      m[i][x] = s > 0.0 ? a[i][x] / s : 0.5;
    }
  }
  return m;
}

double classifier_objective(const DiscreteDistributionSet& dset, const ClassifierTable& m) {
  dset.validate();
  if (m.size() != dset.classes()) throw ShapeError("classifier table has the wrong number of classes");
  std::vector<std::vector<double>> a, b;
  mixtures(dset, a, b);
  double j = 0.0;
  for (std::size_t i = 0; i < dset.classes(); ++i) {
    if (m[i].size() != dset.support) throw ShapeError("classifier table has the wrong support size");
    for (std::size_t x = 0; x < dset.support; ++x) {
      if (a[i][x] > 0.0) j += a[i][x] * std::log(m[i][x]);
      if (b[i][x] > 0.0) j += b[i][x] * std::log(1.0 - m[i][x]);
    }
  }
  return j;
}

JsDecomposition theorem1_terms(const DiscreteDistributionSet& dset) {
  dset.validate();
  std::vector<std::vector<double>> a, b;
  mixtures(dset, a, b);
  JsDecomposition out;
  for (std::size_t i = 0; i < dset.classes(); ++i) {
    const double mass_a = sum_of(a[i]);
    const double mass_b = sum_of(b[i]);
    if (!(mass_a > 0.0) || !(mass_b > 0.0)) {
      throw DataError("class " + std::to_string(i) + " mixture has zero mass");
    }
    std::vector<double> alpha(dset.support), beta(dset.support);
    for (std::size_t x = 0; x < dset.support; ++x) {
      alpha[x] = a[i][x] / mass_a;
      beta[x] = b[i][x] / mass_b;
    }
    const double pi = mass_a / (mass_a + mass_b);
    const double js = js_divergence(alpha, beta);
    const double wjs = js_divergence(alpha, beta, std::array<double, 2>{pi, 1.0 - pi});
    out.class_mass.push_back(mass_a);
    out.rest_mass.push_back(mass_b);
    out.js.push_back(js);
    out.weighted_js.push_back(wjs);
    out.sum += js;
    out.mass_weighted_sum += (mass_a + mass_b) * wjs;
    out.offset += mass_a * std::log(pi) + mass_b * std::log(1.0 - pi);
  }
  return out;
}

double theorem1_sum(const DiscreteDistributionSet& dset) { return theorem1_terms(dset).sum; }

}  // namespace gamo::eval
