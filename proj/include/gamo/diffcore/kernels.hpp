#pragma once

#include <cstddef>
#include <span>

// Dense kernels behind the tensor ops. Each parallel kernel has a serial
// reference twin used by the tests and the benchmark. The parallel versions
// split work over output rows only, so every output element is accumulated
// in the same order as in the reference and results are bitwise identical
// for any thread count.

namespace gamo::kernels {

enum class Trans { No, Yes };

// C (m x n) = op(A) * op(B), op(A) is m x k and op(B) is k x n.
// A is stored m x k (Trans::No) or k x m (Trans::Yes); likewise B.
// With accumulate the product is added to the existing contents of C.
void gemm(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
          std::span<const double> b, std::span<double> c, bool accumulate = false);

// Naive triple loop, single thread.
void gemm_reference(Trans ta, Trans tb, std::size_t m, std::size_t n, std::size_t k, std::span<const double> a,
                    std::span<const double> b, std::span<double> c, bool accumulate = false);

// Row-wise numerically stable softmax of a rows x cols matrix.
void softmax_rows(std::size_t rows, std::size_t cols, std::span<const double> in, std::span<double> out);
void softmax_rows_reference(std::size_t rows, std::size_t cols, std::span<const double> in, std::span<double> out);

// Squared Euclidean distances between every row of A (na x d) and of B (nb x d).
void pairwise_sq_dist(std::size_t na, std::size_t nb, std::size_t d, std::span<const double> a,
                      std::span<const double> b, std::span<double> out);
void pairwise_sq_dist_reference(std::size_t na, std::size_t nb, std::size_t d, std::span<const double> a,
                                std::span<const double> b, std::span<double> out);

// Work size (multiply-adds) below which kernels stay on the calling thread.
inline constexpr std::size_t kParallelThreshold = 1u << 16;

}  // namespace gamo::kernels
