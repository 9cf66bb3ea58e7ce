#include "retwalk/waiting_room.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "retwalk/kernels.hpp"

namespace retwalk {

namespace {

void require_dense(const WaitingRoom& w) {
    if (w.n_transient() > kDenseCap)
        throw Error(ErrorCode::DenseCapExceeded, std::to_string(w.n_transient()) +
                                                     " transient states exceed dense cap " +
                                                     std::to_string(kDenseCap));
}

}  // namespace

std::optional<std::size_t> WaitingRoom::flatten(StateIndex x) const noexcept {
    if (x.value == origin_.value) return std::nullopt;
    return x.value < origin_.value ? x.value : x.value - 1;
}

StateIndex WaitingRoom::unflatten(std::size_t i) const noexcept {
    return StateIndex{i < origin_.value ? i : i + 1};
}

WaitingRoom build_waiting_room(const StochasticMatrix& u, StateIndex o) {
    const std::size_t n = u.n_states();
    (void)u.index(o.value);
    const CsrMatrix& m = u.csr();

    WaitingRoom w;
    w.origin_ = o;
    w.q_.n_rows = w.q_.n_cols = n - 1;
    w.q_.row_ptr.assign(1, 0);
    w.q_.col_idx.reserve(m.nnz());
    w.q_.values.reserve(m.nnz());
    w.r_col_.assign(n - 1, 0.0);
    w.s_row_.assign(n - 1, 0.0);

    for (std::size_t x = 0; x < n; ++x) {
        const auto cols = m.row_cols(x);
        const auto vals = m.row_values(x);
        if (x == o.value) {
            for (std::size_t k = 0; k < cols.size(); ++k) {
                if (cols[k] == o.value)
                    w.u_oo_ = vals[k];
                else
                    w.s_row_[*w.flatten(StateIndex{cols[k]})] = vals[k];
            }
            continue;
        }
        const std::size_t fx = *w.flatten(StateIndex{x});
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (cols[k] == o.value) {
                w.r_col_[fx] = vals[k];
                w.neighbors_.push_back(x);
            } else {
                // flatten is monotone, so columns stay sorted
                w.q_.col_idx.push_back(*w.flatten(StateIndex{cols[k]}));
                w.q_.values.push_back(vals[k]);
            }
        }
        w.q_.row_ptr.push_back(w.q_.values.size());
    }
    w.q_t_ = w.q_.transposed();
    return w;
}

ValidationReport validate(const WaitingRoom& w) {
    ValidationReport report;
    const CsrMatrix& q = w.q();
    auto describe = [](std::size_t i, double v) {
        std::ostringstream os;
        os.precision(17);
        os << "row " << i << ": " << v;
        return os.str();
    };
    for (std::size_t i = 0; i < q.n_rows; ++i) {
        for (double v : q.row_values(i))
            if (v < 0.0) report.push_back({ErrorCode::NegativeProbability, i, describe(i, v)});
        const double s = q.row_sum(i);
        if (s > 1.0 + kRowSumTolerance || (w.r_col()[i] > 0.0 && s > 1.0 - w.r_col()[i] + kRowSumTolerance))
            report.push_back({ErrorCode::RowSumError, i, describe(i, s)});
        if (!(std::abs(s + w.r_col()[i] - 1.0) <= kRowSumTolerance))
            report.push_back({ErrorCode::RowSumError, i, "mass not conserved, " + describe(i, s + w.r_col()[i])});
        if (w.r_col()[i] < 0.0 || w.s_row()[i] < 0.0)
            report.push_back({ErrorCode::NegativeProbability, i, "negative r_col or s_row entry"});
    }
    double out_mass = w.u_oo();
    for (double v : w.s_row()) out_mass += v;
    if (!(std::abs(out_mass - 1.0) <= kRowSumTolerance))
        report.push_back({ErrorCode::RowSumError, std::nullopt, "origin row sums to " + describe(0, out_mass)});
    return report;
}

SpectralEstimate spectral_radius_estimate(const WaitingRoom& w, std::size_t max_iters, double tol) {
    if (max_iters < 1 || !(tol > 0.0))
        throw Error(ErrorCode::OutOfRange, "spectral estimate needs max_iters >= 1 and tol > 0");
    const CsrMatrix& q = w.q();
    std::vector<double> v(q.n_rows, 1.0);
    std::vector<double> qv(q.n_rows);

    // Iterates are scaled to ||v||_inf = 1. The estimate is the l1 growth
    // ||Qv||_1 / ||v||_1: the l-infinity growth sits at exactly 1 until the
    // deficit of the rows next to the origin has spread to every state.
    // ||Q^k 1||_inf = ||Q^k||_inf for nonnegative Q gives the upper bound.
    constexpr int kSettle = 3;  // consecutive agreeing steps required
    double log_norm = 0.0;
    double prev = -1.0, prev_geo = -1.0;
    int calm = 0, calm_geo = 0;
    double v_l1 = kernels::sum(v);
    for (std::size_t it = 1; it <= max_iters; ++it) {
        kernels::spmv(q, v, qv);
        const double inf = kernels::inf_norm(qv);
        if (inf == 0.0) return {0.0, it, 0.0};  // nilpotent
        const double qv_l1 = kernels::sum(qv);
        const double growth = qv_l1 / v_l1;
        log_norm += std::log(inf);
        const double bound = std::exp(log_norm / static_cast<double>(it));
        if (prev >= 0.0) {
            calm = std::abs(growth - prev) < tol ? calm + 1 : 0;
            if (calm >= kSettle) return {growth, it, bound};
            // period-2 structure: one-step growth alternates, two-step does not
            const double geo = std::sqrt(growth * prev);
            if (prev_geo >= 0.0) {
                calm_geo = std::abs(geo - prev_geo) < tol ? calm_geo + 1 : 0;
                if (calm_geo >= kSettle) return {geo, it, bound};
            }
            prev_geo = geo;
        }
        if (it == max_iters) {
            std::ostringstream os;
            os.precision(17);
            os << "power iteration did not settle after " << max_iters << " iterations; last bracket ["
               << std::min(growth, prev) << ", " << std::max(growth, prev) << "]";
            throw Error(ErrorCode::NoConvergence, os.str());
        }
        prev = growth;
        const double inv = 1.0 / inf;
        for (std::size_t i = 0; i < v.size(); ++i) v[i] = qv[i] * inv;
        v_l1 = qv_l1 * inv;
    }
    throw Error(ErrorCode::NoConvergence, "power iteration did not run");
}

BlockPowers modified_power(const WaitingRoom& w, std::size_t k) {
    if (k < 1) throw Error(ErrorCode::OutOfRange, "power must be >= 1");
    require_dense(w);
    const std::size_t n = w.n_transient();
    const CsrMatrix& q = w.q();

    BlockPowers out;
    // Q^j r_col for j = 0 .. k-1; the absorbing column sums all but the last.
    std::vector<double> qj_r = w.r_col();
    std::vector<double> next(n);
    out.absorbing_column.assign(n, 0.0);
    for (std::size_t j = 0; j + 1 < k; ++j) {
        kernels::axpy(1.0, qj_r, out.absorbing_column);
        kernels::spmv(q, qj_r, next);
        qj_r.swap(next);
    }
    out.waiting_column = std::move(qj_r);

    // Q^k = Q * Q^(k-1), one sparse-times-dense product per step
    DenseMatrix power = DenseMatrix::identity(n);
    for (std::size_t step = 0; step < k; ++step) {
        DenseMatrix prod(n, n);
        for (std::size_t r = 0; r < n; ++r) {
            const auto cols = q.row_cols(r);
            const auto vals = q.row_values(r);
            for (std::size_t t = 0; t < cols.size(); ++t)
                for (std::size_t c = 0; c < n; ++c) prod(r, c) += vals[t] * power(cols[t], c);
        }
        power = std::move(prod);
    }
    out.q_power = std::move(power);
    return out;
}

std::vector<double> first_return_distribution(const WaitingRoom& w, std::size_t k_max) {
    if (k_max < 1) throw Error(ErrorCode::OutOfRange, "k_max must be >= 1");
    require_dense(w);
    std::vector<double> p;
    p.reserve(k_max);
    p.push_back(w.u_oo());
    // row vector s Q^j, advanced with the transposed matrix
    std::vector<double> row = w.s_row();
    std::vector<double> next(row.size());
    for (std::size_t k = 2; k <= k_max; ++k) {
        p.push_back(kernels::dot(row, w.r_col()));
        kernels::spmv(w.q_transposed(), row, next);
        row.swap(next);
    }
    return p;
}

}  // namespace retwalk
