#pragma once

// Data-parallel building blocks shared by the solvers and the spectral
// estimate. The OpenMP versions split work by rows only, so every output
// entry is produced by exactly one thread in a fixed order; results are
// bit-identical to the serial references for any thread count.

#include <span>

#include "retwalk/sparse.hpp"

namespace retwalk::kernels {

/// Rows below this count run serially; thread start-up dominates otherwise.
inline constexpr std::size_t kParallelRowThreshold = 4096;

/// y = A x
void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);

double inf_norm(std::span<const double> x);

/// Dot product with a fixed blocked summation order (deterministic under
/// any thread count).
double dot(std::span<const double> x, std::span<const double> y);

double sum(std::span<const double> x);

namespace serial {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double inf_norm(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);
double sum(std::span<const double> x);

}  // namespace serial

}  // namespace retwalk::kernels
