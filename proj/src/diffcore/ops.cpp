#include "gamo/diffcore/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gamo/diffcore/kernels.hpp"
#include "gamo/error.hpp"

namespace gamo::diff {

namespace {

using kernels::Trans;

void require_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.shape() != b.shape()) {
    throw ShapeError(std::string(op) + ": shapes " + shape_string(a.shape()) + " and " + shape_string(b.shape()) +
                     " differ");
  }
}

Tensor::Shape matrix_shape(std::size_t r, std::size_t c) { return Tensor::Shape{r, c}; }

template <typename F, typename G>
Var elementwise(Var a, const char* op, F f, G dfdx) {
  const Tensor& x = a.value();
  Tensor y(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = f(x[i]);
  const std::size_t ia = a.id();
  // The closure reads the input and the output back from the tape; the
  // output id is the next node index.
  const std::size_t iy = a.tape().size();
  return a.tape().record(
      std::move(y), {a},
      [ia, iy, dfdx](Tape& t, const Tensor& g) {
        const Tensor& xv = t.value(ia);
        const Tensor& yv = t.value(iy);
        Tensor& ga = t.grad_of(ia);
        for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * dfdx(xv[i], yv[i]);
      },
      op);
}

}  // namespace

Var matmul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const std::size_t m = av.rows(), k = av.cols(), n = bv.cols();
  if (bv.rows() != k) {
    throw ShapeError("matmul: " + shape_string(av.shape()) + " . " + shape_string(bv.shape()));
  }
  Tensor c(matrix_shape(m, n));
  kernels::gemm(Trans::No, Trans::No, m, n, k, av.values(), bv.values(), c.values());
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(c), {a, b},
      [ia, ib, m, n, k](Tape& t, const Tensor& g) {
        if (t.requires_grad(ia)) {
          // dA = dC . B^T
          kernels::gemm(Trans::No, Trans::Yes, m, k, n, g.values(), t.value(ib).values(), t.grad_of(ia).values(),
                        true);
        }
        if (t.requires_grad(ib)) {
          // dB = A^T . dC
          kernels::gemm(Trans::Yes, Trans::No, k, n, m, t.value(ia).values(), g.values(), t.grad_of(ib).values(),
                        true);
        }
      },
      "matmul");
}

Var matmul_nt(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const std::size_t m = av.rows(), k = av.cols(), n = bv.rows();
  if (bv.cols() != k) {
    throw ShapeError("matmul_nt: " + shape_string(av.shape()) + " . " + shape_string(bv.shape()) + "^T");
  }
  Tensor c(matrix_shape(m, n));
  kernels::gemm(Trans::No, Trans::Yes, m, n, k, av.values(), bv.values(), c.values());
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(c), {a, b},
      [ia, ib, m, n, k](Tape& t, const Tensor& g) {
        if (t.requires_grad(ia)) {
          // dA = dC . B
          kernels::gemm(Trans::No, Trans::No, m, k, n, g.values(), t.value(ib).values(), t.grad_of(ia).values(),
                        true);
        }
        if (t.requires_grad(ib)) {
          // dB = dC^T . A
          kernels::gemm(Trans::Yes, Trans::No, n, k, m, g.values(), t.value(ia).values(), t.grad_of(ib).values(),
                        true);
        }
      },
      "matmul_nt");
}

Var add(Var a, Var b) {
  require_same_shape(a, b, "add");
  Tensor c = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(c), {a, b},
      [ia, ib](Tape& t, const Tensor& g) {
        for (auto id : {ia, ib}) {
          if (!t.requires_grad(id)) continue;
          Tensor& gd = t.grad_of(id);
          for (std::size_t i = 0; i < g.size(); ++i) gd[i] += g[i];
        }
      },
      "add");
}

Var sub(Var a, Var b) {
  require_same_shape(a, b, "sub");
  Tensor c = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(c), {a, b},
      [ia, ib](Tape& t, const Tensor& g) {
        if (t.requires_grad(ia)) {
          Tensor& gd = t.grad_of(ia);
          for (std::size_t i = 0; i < g.size(); ++i) gd[i] += g[i];
        }
        if (t.requires_grad(ib)) {
          Tensor& gd = t.grad_of(ib);
          for (std::size_t i = 0; i < g.size(); ++i) gd[i] -= g[i];
        }
      },
      "sub");
}

Var mul(Var a, Var b) {
  require_same_shape(a, b, "mul");
  Tensor c = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < c.size(); ++i) c[i] *= bv[i];
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(c), {a, b},
      [ia, ib](Tape& t, const Tensor& g) {
        if (t.requires_grad(ia)) {
          const Tensor& bv = t.value(ib);
          Tensor& gd = t.grad_of(ia);
          for (std::size_t i = 0; i < g.size(); ++i) gd[i] += g[i] * bv[i];
        }
        if (t.requires_grad(ib)) {
          const Tensor& av = t.value(ia);
          Tensor& gd = t.grad_of(ib);
          for (std::size_t i = 0; i < g.size(); ++i) gd[i] += g[i] * av[i];
        }
      },
      "mul");
}

Var add_row(Var a, Var row) {
  const Tensor& av = a.value();
  const Tensor& rv = row.value();
  const std::size_t m = av.rows(), n = av.cols();
  if (rv.size() != n || rv.rows() != 1) {
    throw ShapeError("add_row: row " + shape_string(rv.shape()) + " vs matrix " + shape_string(av.shape()));
  }
  Tensor c = av;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) c[i * n + j] += rv[j];
  const std::size_t ia = a.id(), ir = row.id();
  return a.tape().record(
      std::move(c), {a, row},
      [ia, ir, m, n](Tape& t, const Tensor& g) {
        if (t.requires_grad(ia)) {
          Tensor& gd = t.grad_of(ia);
          for (std::size_t i = 0; i < g.size(); ++i) gd[i] += g[i];
        }
        if (t.requires_grad(ir)) {
          Tensor& gd = t.grad_of(ir);
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < n; ++j) gd[j] += g[i * n + j];
        }
      },
      "add_row");
}

Var scale(Var a, double s) {
  return elementwise(
      a, "scale", [s](double x) { return s * x; }, [s](double, double) { return s; });
}

Var one_minus(Var a) {
  return elementwise(
      a, "one_minus", [](double x) { return 1.0 - x; }, [](double, double) { return -1.0; });
}

Var relu(Var a) {
  return elementwise(
      a, "relu", [](double x) { return x > 0.0 ? x : 0.0; }, [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
}

Var sigmoid(Var a) {
  return elementwise(
      a, "sigmoid",
      [](double x) {
        if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
        const double e = std::exp(x);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Var log(Var a) {
  return elementwise(
      a, "log", [](double x) { return std::log(std::max(x, kLogFloor)); },
      [](double x, double) { return x > kLogFloor ? 1.0 / x : 0.0; });
}

Var square(Var a) {
  return elementwise(
      a, "square", [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Var softmax(Var a) {
  const Tensor& x = a.value();
  const std::size_t m = x.rows(), n = x.cols();
  Tensor y(x.shape());
  kernels::softmax_rows(m, n, x.values(), y.values());
  const std::size_t ia = a.id();
  const std::size_t iy = a.tape().size();
  return a.tape().record(
      std::move(y), {a},
      [ia, iy, m, n](Tape& t, const Tensor& g) {
        const Tensor& yv = t.value(iy);
        Tensor& ga = t.grad_of(ia);
        for (std::size_t i = 0; i < m; ++i) {
          double dot = 0.0;
          for (std::size_t j = 0; j < n; ++j) dot += g[i * n + j] * yv[i * n + j];
          for (std::size_t j = 0; j < n; ++j) ga[i * n + j] += yv[i * n + j] * (g[i * n + j] - dot);
        }
      },
      "softmax");
}

Var sum(Var a) {
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const std::size_t ia = a.id();
  return a.tape().record(
      Tensor::scalar(s), {a},
      [ia](Tape& t, const Tensor& g) {
        Tensor& ga = t.grad_of(ia);
        const double gv = g[0];
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gv;
      },
      "sum");
}

Var mean(Var a) {
  const std::size_t n = a.value().size();
  if (n == 0) throw ShapeError("mean of an empty tensor");
  double s = 0.0;
  for (double v : a.value().values()) s += v;
  const std::size_t ia = a.id();
  return a.tape().record(
      Tensor::scalar(s / static_cast<double>(n)), {a},
      [ia, n](Tape& t, const Tensor& g) {
        Tensor& ga = t.grad_of(ia);
        const double gv = g[0] / static_cast<double>(n);
        for (std::size_t i = 0; i < ga.size(); ++i) ga[i] += gv;
      },
      "mean");
}

Var concat_cols(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  const std::size_t m = av.rows(), na = av.cols(), nb = bv.cols();
  if (bv.rows() != m) {
    throw ShapeError("concat_cols: " + shape_string(av.shape()) + " and " + shape_string(bv.shape()));
  }
  Tensor c(matrix_shape(m, na + nb));
  for (std::size_t i = 0; i < m; ++i) {
    std::copy_n(av.data() + i * na, na, c.data() + i * (na + nb));
    std::copy_n(bv.data() + i * nb, nb, c.data() + i * (na + nb) + na);
  }
  const std::size_t ia = a.id(), ib = b.id();
  return a.tape().record(
      std::move(c), {a, b},
      [ia, ib, m, na, nb](Tape& t, const Tensor& g) {
        const std::size_t w = na + nb;
        if (t.requires_grad(ia)) {
          Tensor& gd = t.grad_of(ia);
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < na; ++j) gd[i * na + j] += g[i * w + j];
        }
        if (t.requires_grad(ib)) {
          Tensor& gd = t.grad_of(ib);
          for (std::size_t i = 0; i < m; ++i)
            for (std::size_t j = 0; j < nb; ++j) gd[i * nb + j] += g[i * w + na + j];
        }
      },
      "concat_cols");
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_rows of nothing");
  Tape& tape = parts.front().tape();
  const std::size_t n = parts.front().cols();
  std::size_t total = 0;
  for (const auto& p : parts) {
    if (p.cols() != n) throw ShapeError("concat_rows: column counts differ");
    total += p.rows();
  }
  Tensor c(matrix_shape(total, n));
  std::vector<std::size_t> ids, offsets;
  std::size_t off = 0;
  for (const auto& p : parts) {
    std::copy_n(p.value().data(), p.value().size(), c.data() + off * n);
    ids.push_back(p.id());
    offsets.push_back(off);
    off += p.rows();
  }
  return tape.record(
      std::move(c), parts,
      [ids, offsets, n](Tape& t, const Tensor& g) {
        for (std::size_t k = 0; k < ids.size(); ++k) {
          if (!t.requires_grad(ids[k])) continue;
          Tensor& gd = t.grad_of(ids[k]);
          const double* src = g.data() + offsets[k] * n;
          for (std::size_t i = 0; i < gd.size(); ++i) gd[i] += src[i];
        }
      },
      "concat_rows");
}

Var row_select(Var a, std::span<const std::size_t> rows) {
  const Tensor& av = a.value();
  const std::size_t n = av.cols();
  for (auto r : rows)
    if (r >= av.rows()) throw ShapeError("row_select: row " + std::to_string(r) + " out of range");
  Tensor c(matrix_shape(rows.size(), n));
  for (std::size_t i = 0; i < rows.size(); ++i) std::copy_n(av.data() + rows[i] * n, n, c.data() + i * n);
  const std::size_t ia = a.id();
  std::vector<std::size_t> idx(rows.begin(), rows.end());
  return a.tape().record(
      std::move(c), {a},
      [ia, idx = std::move(idx), n](Tape& t, const Tensor& g) {
        Tensor& gd = t.grad_of(ia);
        for (std::size_t i = 0; i < idx.size(); ++i)
          for (std::size_t j = 0; j < n; ++j) gd[idx[i] * n + j] += g[i * n + j];
      },
      "row_select");
}

}  // namespace gamo::diff
