#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "retwalk/waiting_room.hpp"

namespace retwalk {

enum class SolveMethod { DenseDirect, NeumannSeries };
std::string_view to_string(SolveMethod m) noexcept;

struct SolveDiagnostics {
    SolveMethod method = SolveMethod::DenseDirect;
    double residual_inf = 0.0;
    std::size_t terms_used = 0;  // NeumannSeries only
    double tail_bound = 0.0;     // NeumannSeries only
};

template <class T>
struct Solved {
    T x;
    SolveDiagnostics diag;
};

/// Which series to sum: S1 = sum Q^k = (I-Q)^-1, S2 = sum k Q^(k-1) = (I-Q)^-2.
enum class SeriesOrder { S1, S2 };

/// Method choice for solve_i_minus_q. Auto: dense up to kDenseCap transient
/// states (inclusive), series above.
enum class SolvePolicy { Auto, Dense, Series };

struct SeriesOptions {
    std::size_t terms_cap = 10'000'000;
    double tol = 1e-13;
    /// When false, hitting terms_cap returns the partial sum instead of
    /// throwing NoConvergence.
    bool throw_on_cap = true;
};

/// Safety margin added to the spectral estimate before bounding the tail.
inline constexpr double kRhoMargin = 1e-6;

/// ||(I - Q) x - b||_inf, or the transposed system's residual.
double residual_inf(const WaitingRoom& w, std::span<const double> x, std::span<const double> b,
                    bool transposed);

/// Solves (I - Q) x = b, or (I - Q)^T x = b when transposed. The returned
/// residual is at most 1e-10 * max(1, ||b||_inf).
Solved<std::vector<double>> solve_i_minus_q(const WaitingRoom& w, std::span<const double> b,
                                            bool transposed, SolvePolicy policy = SolvePolicy::Auto,
                                            const SeriesOptions& series = {});

/// Truncated Neumann series applied to b via repeated sparse products.
/// Stops once the tail bound (from the spectral estimate inflated by
/// kRhoMargin) is below opts.tol; throws NoConvergence at opts.terms_cap.
Solved<std::vector<double>> neumann_sum(const WaitingRoom& w, SeriesOrder order,
                                        std::span<const double> b, const SeriesOptions& opts = {},
                                        bool transposed = false);

/// Same as neumann_sum, with a caller-supplied spectral radius estimate.
Solved<std::vector<double>> neumann_sum(const WaitingRoom& w, SeriesOrder order,
                                        std::span<const double> b, double rho_estimate,
                                        const SeriesOptions& opts, bool transposed);

/// Dense I - Q; throws DenseCapExceeded above kDenseCap.
DenseMatrix dense_i_minus_q(const WaitingRoom& w);

}  // namespace retwalk
