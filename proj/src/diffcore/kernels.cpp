#include "gamo/diffcore/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace gamo::kernels {

namespace {

// One output row of C. Each C(i, j) is accumulated over p in ascending order
// starting from its initial value, exactly like the reference loop.
void gemm_row(Trans ta, Trans tb, std::size_t i, std::size_t m, std::size_t n, std::size_t k, const double* a,
              const double* b, double* c_row) {
  if (tb == Trans::No) {
    for (std::size_t p = 0; p < k; ++p) {
      const double av = ta == Trans::No ? a[i * k + p] : a[p * m + i];
      const double* b_row = b + p * n;
      for (std::size_t j = 0; j < n; ++j) c_row[j] += av * b_row[j];
    }
  } else {
    for (std::size_t j = 0; j < n; ++j) {
      const double* b_row = b + j * k;
      double s = c_row[j];
      if (ta == Trans::No) {
        const double* a_row = a + i * k;
        for (std::size_t p = 0; p < k; ++p) s += a_row[p] * b_row[p];
      } else {
        for (std::size_t p = 0; p < k; ++p) s += a[p * m + i] * b_row[p];
      }
      c_row[j] = s;
    }
  }
}

void softmax_row(std::size_t cols, const double* in, double* out) {
  double mx = in[0];
  for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, in[j]);
  double sum = 0.0;
  for (std::size_t j = 0; j < cols; ++j) {
    out[j] = std::exp(in[j] - mx);
    sum += out[j];
  }
  const double inv = 1.0 / sum;
  for (std::size_t j = 0; j < cols; ++j) out[j] *= inv;
}

}  // namespace

void gemm(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
          std::span<const double> b, std::span<double> c, bool accumulate) {
  if (!accumulate) std::fill(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(m * n), 0.0);
  const double* ap = a.data();
  const double* bp = b.data();
  double* cp = c.data();
  const long rows = static_cast<long>(m);
#pragma omp parallel for schedule(static) if (m * n * k >= kParallelThreshold && m > 1)
  for (long i = 0; i < rows; ++i) {
    gemm_row(ta, tb, static_cast<std::size_t>(i), m, n, k, ap, bp, cp + static_cast<std::size_t>(i) * n);
  }
}

void gemm_reference(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
                    std::span<const double> b, std::span<double> c, bool accumulate) {
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double s = accumulate ? c[i * n + j] : 0.0;
      for (std::size_t p = 0; p < k; ++p) {
        const double av = ta == Trans::No ? a[i * k + p] : a[p * m + i];
        const double bv = tb == Trans::No ? b[p * n + j] : b[j * k + p];
        s += av * bv;
      }
      c[i * n + j] = s;
    }
  }
}

void softmax_rows(std::size_t rows, std::size_t cols, std::span<const double> in, std::span<double> out) {
  const long r = static_cast<long>(rows);
#pragma omp parallel for schedule(static) if (rows * cols >= kParallelThreshold)
  for (long i = 0; i < r; ++i) {
    const auto off = static_cast<std::size_t>(i) * cols;
    softmax_row(cols, in.data() + off, out.data() + off);
  }
}

void softmax_rows_reference(std::size_t rows, std::size_t cols, std::span<const double> in, std::span<double> out) {
  for (std::size_t i = 0; i < rows; ++i) softmax_row(cols, in.data() + i * cols, out.data() + i * cols);
}

namespace {
double sq_dist(std::size_t d, const double* x, const double* y) {
  double s = 0.0;
  for (std::size_t t = 0; t < d; ++t) {
    const double diff = x[t] - y[t];
    s += diff * diff;
  }
  return s;
}
}  // namespace

void pairwise_sq_dist(std::size_t na, std::size_t nb, std::size_t d, std::span<const double> a,
                      std::span<const double> b, std::span<double> out) {
  const long rows = static_cast<long>(na);
#pragma omp parallel for schedule(static) if (na * nb * d >= kParallelThreshold)
  for (long i = 0; i < rows; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    for (std::size_t j = 0; j < nb; ++j) out[iu * nb + j] = sq_dist(d, a.data() + iu * d, b.data() + j * d);
  }
}

void pairwise_sq_dist_reference(std::size_t na, std::size_t nb, std::size_t d, std::span<const double> a,
                                std::span<const double> b, std::span<double> out) {
  for (std::size_t i = 0; i < na; ++i)
    for (std::size_t j = 0; j < nb; ++j) out[i * nb + j] = sq_dist(d, a.data() + i * d, b.data() + j * d);
}

}  // namespace gamo::kernels
