#include "retwalk/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "retwalk/kernels.hpp"

namespace retwalk {

std::string_view to_string(SolveMethod m) noexcept {
    return m == SolveMethod::DenseDirect ? "DenseDirect" : "NeumannSeries";
}

namespace {

double residual_target(std::span<const double> b) {
    return 1e-10 * std::max(1.0, kernels::inf_norm(b));
}

// Tail of the truncated series after K terms, for a geometric rate rho.
double tail_bound(SeriesOrder order, double rho, std::size_t k) {
    const double rk = std::pow(rho, static_cast<double>(k));
    if (order == SeriesOrder::S1) return rk / (1.0 - rho);
    // sum_{j>K} j rho^(j-1) = rho^K (K + 1 - K rho) / (1 - rho)^2
    const double kd = static_cast<double>(k);
    return rk * (kd + 1.0 - kd * rho) / ((1.0 - rho) * (1.0 - rho));
}

}  // namespace

DenseMatrix dense_i_minus_q(const WaitingRoom& w) {
    const std::size_t n = w.n_transient();
    if (n > kDenseCap)
        throw Error(ErrorCode::DenseCapExceeded,
                    std::to_string(n) + " transient states exceed dense cap " + std::to_string(kDenseCap));
    DenseMatrix a = DenseMatrix::identity(n);
    const CsrMatrix& q = w.q();
    for (std::size_t r = 0; r < n; ++r) {
        const auto cols = q.row_cols(r);
        const auto vals = q.row_values(r);
        for (std::size_t k = 0; k < cols.size(); ++k) a(r, cols[k]) -= vals[k];
    }
    return a;
}

double residual_inf(const WaitingRoom& w, std::span<const double> x, std::span<const double> b,
                    bool transposed) {
    std::vector<double> qx(x.size());
    kernels::spmv(transposed ? w.q_transposed() : w.q(), x, qx);
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - qx[i] - b[i]));
    return m;
}

Solved<std::vector<double>> neumann_sum(const WaitingRoom& w, SeriesOrder order,
                                        std::span<const double> b, double rho_estimate,
                                        const SeriesOptions& opts, bool transposed) {
    if (opts.terms_cap < 1) throw Error(ErrorCode::OutOfRange, "terms_cap must be >= 1");
    if (b.size() != w.n_transient())
        throw Error(ErrorCode::OutOfRange, "right-hand side has wrong length");
    const double rho = rho_estimate + kRhoMargin;
    if (rho >= 1.0 - 1e-9) {
        std::ostringstream os;
        os.precision(17);
        os << "spectral estimate " << rho_estimate << " too close to 1 for a certified series tail";
        throw Error(ErrorCode::NoConvergence, os.str());
    }

    const CsrMatrix& q = transposed ? w.q_transposed() : w.q();
    const std::size_t n = b.size();
    std::vector<double> term(b.begin(), b.end());  // Q^j b
    std::vector<double> next(n);
    std::vector<double> x(n, 0.0);

    Solved<std::vector<double>> out;
    out.diag.method = SolveMethod::NeumannSeries;
    // S1: x = sum_{j=0}^{K} Q^j b.  S2: x = sum_{j=1}^{K} j Q^(j-1) b.
    std::size_t terms = 0;
    double tail = 0.0;
    for (;;) {
        ++terms;
        const double weight = order == SeriesOrder::S1 ? 1.0 : static_cast<double>(terms);
        kernels::axpy(weight, term, x);
        tail = tail_bound(order, rho, terms);
        if (tail < opts.tol) break;
        if (terms >= opts.terms_cap) {
            if (!opts.throw_on_cap) break;
            std::ostringstream os;
            os << "series tail bound " << tail << " above " << opts.tol << " after " << terms << " terms";
            throw Error(ErrorCode::NoConvergence, os.str());
        }
        kernels::spmv(q, term, next);
        if (kernels::inf_norm(next) == 0.0) {  // nilpotent on b: the sum is exact
            tail = 0.0;
            break;
        }
        term.swap(next);
    }
    out.diag.terms_used = terms;
    out.diag.tail_bound = tail;
    if (order == SeriesOrder::S1) out.diag.residual_inf = residual_inf(w, x, b, transposed);
    else {
        // (I - Q)^2 x = b: apply (I - Q) twice.
        std::vector<double> once(n), qx(n), twice(n);
        kernels::spmv(q, x, qx);
        for (std::size_t i = 0; i < n; ++i) once[i] = x[i] - qx[i];
        kernels::spmv(q, once, qx);
        double m = 0.0;
        for (std::size_t i = 0; i < n; ++i) m = std::max(m, std::abs(once[i] - qx[i] - b[i]));
        out.diag.residual_inf = m;
    }
    out.x = std::move(x);
    return out;
}

Solved<std::vector<double>> neumann_sum(const WaitingRoom& w, SeriesOrder order,
                                        std::span<const double> b, const SeriesOptions& opts,
                                        bool transposed) {
    const double rho = spectral_radius_estimate(w).value;
    return neumann_sum(w, order, b, rho, opts, transposed);
}

Solved<std::vector<double>> solve_i_minus_q(const WaitingRoom& w, std::span<const double> b,
                                            bool transposed, SolvePolicy policy,
                                            const SeriesOptions& series) {
    if (b.size() != w.n_transient())
        throw Error(ErrorCode::OutOfRange, "right-hand side has wrong length");
    for (double v : b)
        if (!std::isfinite(v)) throw Error(ErrorCode::OutOfRange, "right-hand side must be finite");

    const bool dense = policy == SolvePolicy::Dense ||
                       (policy == SolvePolicy::Auto && w.n_transient() <= kDenseCap);
    const double target = residual_target(b);

    if (dense) {
        const LuFactorization lu(dense_i_minus_q(w));
        Solved<std::vector<double>> out;
        out.diag.method = SolveMethod::DenseDirect;
        out.x = transposed ? lu.solve_transposed(b) : lu.solve(b);
        out.diag.residual_inf = residual_inf(w, out.x, b, transposed);
        // one refinement step if rounding left the residual above target
        if (out.diag.residual_inf > target) {
            std::vector<double> r(b.size()), qx(b.size());
            kernels::spmv(transposed ? w.q_transposed() : w.q(), out.x, qx);
            for (std::size_t i = 0; i < r.size(); ++i) r[i] = b[i] - (out.x[i] - qx[i]);
            const auto dx = transposed ? lu.solve_transposed(r) : lu.solve(r);
            for (std::size_t i = 0; i < r.size(); ++i) out.x[i] += dx[i];
            out.diag.residual_inf = residual_inf(w, out.x, b, transposed);
        }
        if (out.diag.residual_inf > target)
            throw Error(ErrorCode::SingularSystem, "dense solve residual " +
                                                       std::to_string(out.diag.residual_inf) +
                                                       " above target");
        return out;
    }

    const double rho = spectral_radius_estimate(w).value;
    SeriesOptions opts = series;
    // tighten the tail until the explicit residual meets the contract
    for (int attempt = 0; attempt < 4; ++attempt) {
        auto out = neumann_sum(w, SeriesOrder::S1, b, rho, opts, transposed);
        if (out.diag.residual_inf <= target) return out;
        opts.tol *= 1e-2;
    }
    throw Error(ErrorCode::NoConvergence, "series residual stayed above target");
}

}  // namespace retwalk
