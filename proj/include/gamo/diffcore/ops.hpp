#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gamo/diffcore/tape.hpp"

// Differentiable tensor operations. Every op records its result on the tape
// of its inputs; matrices are row-major, rank-1 tensors act as a single row.

namespace gamo::diff {

// log is evaluated as log(max(x, kLogFloor)); the gradient is zero below it.
inline constexpr double kLogFloor = 1e-12;

Var matmul(Var a, Var b);     // (m x k) . (k x n)
Var matmul_nt(Var a, Var b);  // (m x k) . (n x k)^T

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
// Adds a row vector (n or 1 x n) to every row of an m x n matrix.
Var add_row(Var a, Var row);
Var scale(Var a, double s);
Var one_minus(Var a);

Var relu(Var a);
Var sigmoid(Var a);
Var softmax(Var a);  // row-wise
Var log(Var a);
Var square(Var a);

Var sum(Var a);   // scalar
Var mean(Var a);  // scalar

Var concat_cols(Var a, Var b);
Var concat_rows(std::span<const Var> parts);
// Gathers rows in the given order (repeats allowed).
Var row_select(Var a, std::span<const std::size_t> rows);

}  // namespace gamo::diff
