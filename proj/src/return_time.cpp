#include "retwalk/return_time.hpp"

#include <cmath>
#include <exception>
#include <sstream>

#include "retwalk/kernels.hpp"

namespace retwalk {

std::string_view to_string(Method m) noexcept {
    switch (m) {
    case Method::TheoremPaper: return "TheoremPaper";
    case Method::TheoremCorrected: return "TheoremCorrected";
    case Method::HittingOracle: return "HittingOracle";
    case Method::Kac: return "Kac";
    case Method::ClosedForm: return "ClosedForm";
    case Method::MonteCarlo: return "MonteCarlo";
    }
    return "Unknown";
}

namespace {

ReturnTimeResult checked(ReturnTimeResult r) {
    const bool ok = std::isfinite(r.value) && (r.method == Method::TheoremPaper || r.value >= 1.0 - 1e-9);
    if (!ok) {
        std::ostringstream os;
        os.precision(17);
        os << to_string(r.method) << " produced invalid return time " << r.value;
        throw Error(ErrorCode::NoConvergence, os.str());
    }
    return r;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(12);
    os << v;
    return os.str();
}

}  // namespace

ReturnTimeResult expected_return_time_paper_variant(const WaitingRoom& w, SolvePolicy policy) {
    auto left = solve_i_minus_q(w, w.s_row(), /*transposed=*/true, policy);   // s N
    auto right = solve_i_minus_q(w, w.r_col(), /*transposed=*/false, policy); // N r_col
    ReturnTimeResult r;
    r.method = Method::TheoremPaper;
    r.value = w.u_oo() + kernels::dot(left.x, right.x);
    SolveDiagnostics d = left.diag;
    d.residual_inf = std::max(left.diag.residual_inf, right.diag.residual_inf);
    d.terms_used = std::max(left.diag.terms_used, right.diag.terms_used);
    d.tail_bound = std::max(left.diag.tail_bound, right.diag.tail_bound);
    r.diagnostics = d;
    return checked(r);
}

ReturnTimeResult expected_return_time(const WaitingRoom& w, SolvePolicy policy) {
    auto visits = solve_i_minus_q(w, w.s_row(), /*transposed=*/true, policy);  // s N
    ReturnTimeResult r;
    r.method = Method::TheoremCorrected;
    r.value = 1.0 + kernels::sum(visits.x);
    r.diagnostics = visits.diag;
    return checked(r);
}

ReturnTimeResult hitting_time_oracle(const WaitingRoom& w) {
    const LuFactorization lu(dense_i_minus_q(w));
    const std::vector<double> ones(w.n_transient(), 1.0);
    const auto t = lu.solve(ones);
    SolveDiagnostics d;
    d.method = SolveMethod::DenseDirect;
    d.residual_inf = residual_inf(w, t, ones, false);
    ReturnTimeResult r;
    r.method = Method::HittingOracle;
    r.value = 1.0 + kernels::serial::dot(w.s_row(), t);
    r.diagnostics = d;
    return checked(r);
}

ReturnTimeResult kac_return_time(const StochasticMatrix& u, StateIndex o) {
    const std::size_t n = u.n_states();
    (void)u.index(o.value);
    if (n > kDenseCap)
        throw Error(ErrorCode::DenseCapExceeded,
                    std::to_string(n) + " states exceed dense cap " + std::to_string(kDenseCap));
    // Balance equations (U^T - I) pi = 0 with the last one swapped for sum(pi) = 1.
    DenseMatrix a(n, n);
    const CsrMatrix& m = u.csr();
    for (std::size_t x = 0; x < n; ++x) {
        const auto cols = m.row_cols(x);
        const auto vals = m.row_values(x);
        for (std::size_t k = 0; k < cols.size(); ++k) a(cols[k], x) += vals[k];
        a(x, x) -= 1.0;
    }
    for (std::size_t x = 0; x < n; ++x) a(n - 1, x) = 1.0;
    std::vector<double> rhs(n, 0.0);
    rhs[n - 1] = 1.0;
    const auto pi = LuFactorization(std::move(a)).solve(rhs);

    // residual of pi U = pi
    std::vector<double> pu(n, 0.0);
    for (std::size_t x = 0; x < n; ++x) {
        const auto cols = m.row_cols(x);
        const auto vals = m.row_values(x);
        for (std::size_t k = 0; k < cols.size(); ++k) pu[cols[k]] += pi[x] * vals[k];
    }
    SolveDiagnostics d;
    d.method = SolveMethod::DenseDirect;
    for (std::size_t x = 0; x < n; ++x) d.residual_inf = std::max(d.residual_inf, std::abs(pu[x] - pi[x]));

    if (!(pi[o.value] > 0.0))
        throw Error(ErrorCode::SingularSystem, "stationary mass at origin is " + fmt(pi[o.value]));
    ReturnTimeResult r;
    r.method = Method::Kac;
    r.value = 1.0 / pi[o.value];
    r.diagnostics = d;
    return checked(r);
}

ReturnTimeResult closed_form_return_time(const GridSpec& spec, const GridPoint& p,
                                         bool use_paper_staystill_claims) {
    check_spec(spec);
    const std::size_t b = classify_vertex(spec, p);
    const std::size_t d = spec.dimension();
    double volume = 1.0;
    for (std::size_t n : spec.dims) volume *= static_cast<double>(n);

    ReturnTimeResult r;
    r.method = Method::ClosedForm;
    r.diagnostics = ClosedFormInfo{b, use_paper_staystill_claims};
    switch (spec.boundary) {
    case Boundary::Periodic: r.value = volume; break;
    case Boundary::Reflecting: {
        double reduced = 1.0;
        for (std::size_t n : spec.dims) reduced *= static_cast<double>(n - 1);
        r.value = std::ldexp(reduced, static_cast<int>(b));
        break;
    }
    case Boundary::StayStill:
        r.value = volume;
        if (use_paper_staystill_claims && b > 0) {
            r.value += (b == d && d >= 2) ? 0.5 : 0.25;
            r.disputed = true;
        }
        break;
    }
    return checked(r);
}

namespace {

struct OriginOutcome {
    std::vector<ReturnTimeResult> results;
    OriginDelta delta;
    std::vector<std::string> flags;
};

OriginOutcome verify_origin(const GridSpec& spec, const StochasticMatrix& u, std::size_t index,
                            const GridPoint& p, const VerifyOptions& opt) {
    OriginOutcome out;
    const StateIndex o{index};
    const WaitingRoom w = build_waiting_room(u, o);
    const std::string where = "origin (" + format_point(p) + ")";

    auto paper = expected_return_time_paper_variant(w);
    auto corrected = expected_return_time(w);
    auto hitting = hitting_time_oracle(w);
    auto kac = kac_return_time(u, o);

    std::vector<ReturnTimeResult> closed;
    closed.push_back(closed_form_return_time(spec, p, false));
    if (spec.boundary == Boundary::StayStill) {
        auto claim = closed_form_return_time(spec, p, true);
        if (claim.disputed) closed.push_back(claim);
    }

    const double consensus = (corrected.value + hitting.value + kac.value) / 3.0;
    double lo = corrected.value, hi = corrected.value;
    for (double v : {hitting.value, kac.value, closed.front().value}) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    out.delta = {index, hi - lo, consensus};

    const double offset = corrected.value - (1.0 - w.u_oo());
    if (std::abs(paper.value - offset) > opt.identity_tol)
        out.flags.push_back(where + ": offset identity violated, printed formula " + fmt(paper.value) +
                            " vs corrected - (1 - U_oo) = " + fmt(offset));
    if (std::abs(paper.value - consensus) > opt.identity_tol)
        out.flags.push_back(where + ": printed theorem formula gives " + fmt(paper.value) +
                            ", oracle consensus " + fmt(consensus) + " (offset " +
                            fmt(consensus - paper.value) + " = 1 - U_oo)");
    for (const auto& c : closed) {
        if (c.disputed && std::abs(c.value - consensus) > opt.identity_tol)
            out.flags.push_back(where + ": disputed stay-still closed form " + fmt(c.value) +
                                " contradicts oracle consensus " + fmt(consensus));
        if (!c.disputed && std::abs(c.value - consensus) > opt.identity_tol)
            out.flags.push_back(where + ": closed form " + fmt(c.value) + " disagrees with oracle consensus " +
                                fmt(consensus));
    }

    out.results = {paper, corrected, hitting, kac};
    for (auto& c : closed) out.results.push_back(std::move(c));

    if (opt.mc_episodes > 0) {
        const auto stats = monte_carlo_estimate(u, o, opt.mc_episodes, opt.mc_seed, opt.mc_step_cap);
        ReturnTimeResult mc;
        mc.method = Method::MonteCarlo;
        mc.value = stats.mean;
        mc.diagnostics = stats;
        if (std::abs(stats.mean - consensus) > 3.0 * stats.ci95_halfwidth)
            out.flags.push_back(where + ": Monte Carlo mean " + fmt(stats.mean) + " outside 3 x ci95 of " +
                                fmt(consensus));
        out.results.push_back(checked(mc));
    }
    return out;
}

}  // namespace

VerifyReport verify(const GridSpec& spec, const std::vector<GridPoint>& origins, const VerifyOptions& options) {
    const std::size_t n = state_count(spec);
    if (n > kDenseCap)
        throw Error(ErrorCode::DenseCapExceeded,
                    std::to_string(n) + " states exceed dense cap " + std::to_string(kDenseCap));
    const StochasticMatrix u = build_grid_chain(spec);

    std::vector<std::size_t> indices;
    indices.reserve(origins.size());
    for (const auto& p : origins) indices.push_back(point_to_index(spec, p).value);

    std::vector<OriginOutcome> outcomes(origins.size());
    std::vector<std::exception_ptr> errors(origins.size());
    const auto count = static_cast<std::int64_t>(origins.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < count; ++i) {
        const auto k = static_cast<std::size_t>(i);
        try {
            outcomes[k] = verify_origin(spec, u, indices[k], origins[k], options);
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);

    std::vector<std::size_t> order(origins.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return indices[a] < indices[b]; });

    VerifyReport report;
    report.spec = spec;
    for (std::size_t k : order) {
        for (auto& r : outcomes[k].results) report.entries.push_back({indices[k], origins[k], std::move(r)});
        report.pairwise_deltas.push_back(outcomes[k].delta);
        for (auto& f : outcomes[k].flags) report.discrepancy_flags.push_back(std::move(f));
    }
    return report;
}

}  // namespace retwalk
