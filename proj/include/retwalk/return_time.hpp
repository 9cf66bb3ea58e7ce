#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "retwalk/grid.hpp"
#include "retwalk/montecarlo.hpp"
#include "retwalk/solvers.hpp"
#include "retwalk/waiting_room.hpp"

namespace retwalk {

enum class Method { TheoremPaper, TheoremCorrected, HittingOracle, Kac, ClosedForm, MonteCarlo };
std::string_view to_string(Method m) noexcept;

struct ClosedFormInfo {
    std::size_t binding_count = 0;
    bool paper_staystill_claims = false;
};

using Diagnostics = std::variant<std::monostate, SolveDiagnostics, SimulationStats, ClosedFormInfo>;

struct ReturnTimeResult {
    double value = 0.0;
    Method method = Method::TheoremCorrected;
    Diagnostics diagnostics;
    /// The value reproduces a printed claim that the oracles contradict.
    bool disputed = false;
};

/// u_oo + (s N)(N r_col) with N = (I - Q)^-1, evaluated as printed. Falls
/// short of the true mean return time by exactly 1 - u_oo.
ReturnTimeResult expected_return_time_paper_variant(const WaitingRoom& w,
                                                    SolvePolicy policy = SolvePolicy::Auto);

/// 1 + s N 1: one step out of the origin plus the expected time the walk
/// then spends among the transient states before re-entering o.
ReturnTimeResult expected_return_time(const WaitingRoom& w, SolvePolicy policy = SolvePolicy::Auto);

/// Dense first-step analysis: (I - Q) t = 1, result 1 + s t.
ReturnTimeResult hitting_time_oracle(const WaitingRoom& w);

/// 1 / pi_o for the stationary distribution pi (dense solve).
ReturnTimeResult kac_return_time(const StochasticMatrix& u, StateIndex o);

/// Grid closed forms. Periodic: prod n_i. Reflecting: 2^b prod (n_i - 1)
/// for b binding coordinates. StayStill: prod n_i, or with
/// use_paper_staystill_claims the printed face value +1/4 (0 < b < d, or
/// b = d = 1) and corner value +1/2 (b = d >= 2), flagged disputed.
ReturnTimeResult closed_form_return_time(const GridSpec& spec, const GridPoint& p,
                                         bool use_paper_staystill_claims);

struct VerifyEntry {
    std::size_t origin_index = 0;
    GridPoint origin;
    ReturnTimeResult result;
};

struct OriginDelta {
    std::size_t origin_index = 0;
    double max_delta = 0.0;
    double consensus = 0.0;
};

struct VerifyReport {
    GridSpec spec;
    std::vector<VerifyEntry> entries;
    std::vector<OriginDelta> pairwise_deltas;
    std::vector<std::string> discrepancy_flags;
};

struct VerifyOptions {
    std::uint64_t mc_episodes = 0;  // 0 disables the Monte Carlo column
    std::uint64_t mc_seed = 42;
    std::uint64_t mc_step_cap = kDefaultStepCap;
    double identity_tol = 1e-9;
};

/// Runs every analytic route per origin and cross-checks them. Origins are
/// evaluated in parallel; entries come back ordered by origin index.
VerifyReport verify(const GridSpec& spec, const std::vector<GridPoint>& origins,
                    const VerifyOptions& options = {});

}  // namespace retwalk
