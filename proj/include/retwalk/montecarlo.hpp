#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "retwalk/chain.hpp"

namespace retwalk {

inline constexpr std::uint64_t kDefaultStepCap = 10'000'000;

struct SimulationStats {
    std::uint64_t episodes = 0;  // completed (non-truncated) episodes
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double ci95_halfwidth = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t truncated_episodes = 0;
    std::uint64_t one_step_returns = 0;  // episodes that returned via the self-loop

    friend bool operator==(const SimulationStats&, const SimulationStats&) = default;
};

/// SplitMix64 stream keyed by (seed, episode). Each episode's draws depend
/// only on its key, never on which thread runs it.
class EpisodeRng {
public:
    using result_type = std::uint64_t;

    EpisodeRng(std::uint64_t seed, std::uint64_t episode) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }
    result_type operator()() noexcept;

    /// Uniform double in [0, 1) from the top 53 bits.
    double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    std::uint64_t state_;
};

/// Exact integer moments of integer-valued return times; merging is plain
/// integer addition, so any partitioning of episodes gives the same sums.
struct ReturnTimeMoments {
    std::uint64_t count = 0;
    unsigned __int128 sum = 0;
    unsigned __int128 sum_sq = 0;
    std::uint64_t truncated = 0;
    std::uint64_t one_step = 0;

    void add(std::uint64_t steps) noexcept;
    void merge(const ReturnTimeMoments& other) noexcept;
};

/// Simulates `episodes` walks from o until their first return, sampling
/// successors by inverse-CDF lookup on each sparse row. Episodes longer than
/// step_cap are counted as truncated and left out of the statistics.
/// Throws AllTruncated when no episode completes.
SimulationStats monte_carlo_estimate(const StochasticMatrix& u, StateIndex o, std::uint64_t episodes,
                                     std::uint64_t seed, std::uint64_t step_cap = kDefaultStepCap);

/// Single-threaded reference; identical output to monte_carlo_estimate.
SimulationStats monte_carlo_estimate_serial(const StochasticMatrix& u, StateIndex o,
                                            std::uint64_t episodes, std::uint64_t seed,
                                            std::uint64_t step_cap = kDefaultStepCap);

/// Per-episode return length, or 0 when truncated at step_cap.
std::uint64_t simulate_episode(const StochasticMatrix& u, std::span<const double> cumulative,
                               StateIndex o, std::uint64_t seed, std::uint64_t episode,
                               std::uint64_t step_cap);

/// Row-wise cumulative probabilities aligned with u.csr().values.
std::vector<double> cumulative_rows(const StochasticMatrix& u);

SimulationStats finalize(const ReturnTimeMoments& m, std::uint64_t seed);

}  // namespace retwalk
