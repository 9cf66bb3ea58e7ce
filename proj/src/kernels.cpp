#include "retwalk/kernels.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

namespace retwalk::kernels {

namespace {

// Fixed block size for reductions; the partials are combined serially in
// block order so the rounding sequence does not depend on scheduling.
constexpr std::size_t kReduceBlock = 1024;

template <class F>
double blocked_sum(std::size_t n, F&& term) {
    const std::size_t n_blocks = (n + kReduceBlock - 1) / kReduceBlock;
    std::vector<double> partial(n_blocks, 0.0);
    const auto nb = static_cast<std::int64_t>(n_blocks);
#pragma omp parallel for schedule(static) if (n >= kParallelRowThreshold)
    for (std::int64_t b = 0; b < nb; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReduceBlock;
        const std::size_t hi = std::min(n, lo + kReduceBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += term(i);
        partial[static_cast<std::size_t>(b)] = s;
    }
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
    assert(x.size() == a.n_cols && y.size() == a.n_rows);
    const auto n = static_cast<std::int64_t>(a.n_rows);
#pragma omp parallel for schedule(static) if (a.n_rows >= kParallelRowThreshold)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto r = static_cast<std::size_t>(i);
        double s = 0.0;
        for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            s += a.values[k] * x[a.col_idx[k]];
        y[r] = s;
    }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    assert(x.size() == y.size());
    const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static) if (x.size() >= kParallelRowThreshold)
    for (std::int64_t i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += alpha * x[static_cast<std::size_t>(i)];
}

double inf_norm(std::span<const double> x) {
    double m = 0.0;
    const auto n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for reduction(max : m) schedule(static) if (x.size() >= kParallelRowThreshold)
    for (std::int64_t i = 0; i < n; ++i) m = std::max(m, std::abs(x[static_cast<std::size_t>(i)]));
    return m;
}

double dot(std::span<const double> x, std::span<const double> y) {
    assert(x.size() == y.size());
    return blocked_sum(x.size(), [&](std::size_t i) { return x[i] * y[i]; });
}

double sum(std::span<const double> x) {
    return blocked_sum(x.size(), [&](std::size_t i) { return x[i]; });
}

namespace serial {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
    for (std::size_t r = 0; r < a.n_rows; ++r) {
        double s = 0.0;
        for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k)
            s += a.values[k] * x[a.col_idx[k]];
        y[r] = s;
    }
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double inf_norm(std::span<const double> x) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::abs(v));
    return m;
}

double dot(std::span<const double> x, std::span<const double> y) {
    double total = 0.0;
    for (std::size_t lo = 0; lo < x.size(); lo += kReduceBlock) {
        const std::size_t hi = std::min(x.size(), lo + kReduceBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i] * y[i];
        total += s;
    }
    return total;
}

double sum(std::span<const double> x) {
    double total = 0.0;
    for (std::size_t lo = 0; lo < x.size(); lo += kReduceBlock) {
        const std::size_t hi = std::min(x.size(), lo + kReduceBlock);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += x[i];
        total += s;
    }
    return total;
}

}  // namespace serial

}  // namespace retwalk::kernels
