#include "retwalk/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace retwalk {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

void check_args(const StochasticMatrix& u, StateIndex o, std::uint64_t episodes, std::uint64_t step_cap) {
    (void)u.index(o.value);
    if (episodes < 1) throw Error(ErrorCode::OutOfRange, "episodes must be >= 1");
    if (step_cap < 1) throw Error(ErrorCode::OutOfRange, "step cap must be >= 1");
}

}  // namespace

EpisodeRng::EpisodeRng(std::uint64_t seed, std::uint64_t episode) noexcept
    : state_(mix64(seed ^ mix64(episode + kGolden))) {}

EpisodeRng::result_type EpisodeRng::operator()() noexcept {
    state_ += kGolden;
    return mix64(state_);
}

void ReturnTimeMoments::add(std::uint64_t steps) noexcept {
    if (steps == 0) {
        ++truncated;
        return;
    }
    ++count;
    sum += steps;
    sum_sq += static_cast<unsigned __int128>(steps) * steps;
    if (steps == 1) ++one_step;
}

void ReturnTimeMoments::merge(const ReturnTimeMoments& other) noexcept {
    count += other.count;
    sum += other.sum;
    sum_sq += other.sum_sq;
    truncated += other.truncated;
    one_step += other.one_step;
}

SimulationStats finalize(const ReturnTimeMoments& m, std::uint64_t seed) {
    if (m.count == 0)
        throw Error(ErrorCode::AllTruncated,
                    "all " + std::to_string(m.truncated) + " episodes hit the step cap");
    SimulationStats s;
    s.seed = seed;
    s.episodes = m.count;
    s.truncated_episodes = m.truncated;
    s.one_step_returns = m.one_step;
    const auto n = static_cast<long double>(m.count);
    s.mean = static_cast<double>(static_cast<long double>(m.sum) / n);
    if (m.count > 1) {
        // n * sum_sq - sum^2 is an exact nonnegative integer
        const unsigned __int128 n128 = m.count;
        const unsigned __int128 centered = n128 * m.sum_sq - m.sum * m.sum;
        s.variance = static_cast<double>(static_cast<long double>(centered) / (n * (n - 1)));
    }
    s.ci95_halfwidth = 1.96 * std::sqrt(s.variance / static_cast<double>(m.count));
    return s;
}

std::vector<double> cumulative_rows(const StochasticMatrix& u) {
    const CsrMatrix& m = u.csr();
    std::vector<double> cum(m.nnz());
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        double acc = 0.0;
        for (std::size_t k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k) {
            acc += m.values[k];
            cum[k] = acc;
        }
    }
    return cum;
}

std::uint64_t simulate_episode(const StochasticMatrix& u, std::span<const double> cumulative,
                               StateIndex o, std::uint64_t seed, std::uint64_t episode,
                               std::uint64_t step_cap) {
    const CsrMatrix& m = u.csr();
    EpisodeRng rng(seed, episode);
    std::size_t x = o.value;
    for (std::uint64_t step = 1; step <= step_cap; ++step) {
        const std::size_t lo = m.row_ptr[x];
        const std::size_t hi = m.row_ptr[x + 1];
        const double draw = rng.uniform();
        auto first = cumulative.begin() + static_cast<std::ptrdiff_t>(lo);
        auto last = cumulative.begin() + static_cast<std::ptrdiff_t>(hi);
        auto it = std::upper_bound(first, last, draw);
        // cumulative sums may end a few ulps short of 1
        if (it == last) --it;
        x = m.col_idx[static_cast<std::size_t>(it - cumulative.begin())];
        if (x == o.value) return step;
    }
    return 0;
}

SimulationStats monte_carlo_estimate(const StochasticMatrix& u, StateIndex o, std::uint64_t episodes,
                                     std::uint64_t seed, std::uint64_t step_cap) {
    check_args(u, o, episodes, step_cap);
    const auto cum = cumulative_rows(u);
    ReturnTimeMoments total;
    const auto n = static_cast<std::int64_t>(episodes);
#pragma omp parallel
    {
        ReturnTimeMoments local;
#pragma omp for schedule(dynamic, 256) nowait
        for (std::int64_t e = 0; e < n; ++e)
            local.add(simulate_episode(u, cum, o, seed, static_cast<std::uint64_t>(e), step_cap));
#pragma omp critical(retwalk_mc_merge)
        total.merge(local);
    }
    return finalize(total, seed);
}

SimulationStats monte_carlo_estimate_serial(const StochasticMatrix& u, StateIndex o,
                                            std::uint64_t episodes, std::uint64_t seed,
                                            std::uint64_t step_cap) {
    check_args(u, o, episodes, step_cap);
    const auto cum = cumulative_rows(u);
    ReturnTimeMoments total;
    for (std::uint64_t e = 0; e < episodes; ++e) total.add(simulate_episode(u, cum, o, seed, e, step_cap));
    return finalize(total, seed);
}

}  // namespace retwalk
