// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "retwalk/grid.hpp"
#include "retwalk/kernels.hpp"
#include "retwalk/montecarlo.hpp"
#include "retwalk/return_time.hpp"
#include "retwalk/waiting_room.hpp"

using namespace retwalk;

namespace {

const CsrMatrix& torus(std::size_t side) {
    static std::size_t cached_side = 0;
    static StochasticMatrix u;
    if (cached_side != side) {
        u = build_grid_chain({{side, side}, Boundary::Periodic});
        cached_side = side;
    }
    return u.csr();
}

template <bool Parallel>
void BM_Spmv(benchmark::State& state) {
    const auto& a = torus(static_cast<std::size_t>(state.range(0)));
    std::vector<double> x(a.n_cols, 1.0), y(a.n_rows);
    for (auto _ : state) {
        if constexpr (Parallel) kernels::spmv(a, x, y);
        else kernels::serial::spmv(a, x, y);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(a.nnz()));
}

template <bool Parallel>
void BM_Dot(benchmark::State& state) {
    const std::vector<double> a(static_cast<std::size_t>(state.range(0)), 0.5), b(a.size(), 2.0);
    for (auto _ : state) {
        const double d = Parallel ? kernels::dot(a, b) : kernels::serial::dot(a, b);
        benchmark::DoNotOptimize(d);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_MonteCarlo(benchmark::State& state) {
    const auto u = build_grid_chain({{8, 8}, Boundary::Periodic});
    const auto episodes = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        const auto s = Parallel ? monte_carlo_estimate(u, StateIndex{0}, episodes, 42)
                                : monte_carlo_estimate_serial(u, StateIndex{0}, episodes, 42);
        benchmark::DoNotOptimize(s.mean);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SeriesSolve(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto u = build_grid_chain({{side, side}, Boundary::Reflecting});
    const auto w = build_waiting_room(u, StateIndex{0});
    for (auto _ : state) benchmark::DoNotOptimize(expected_return_time(w, SolvePolicy::Series).value);
}

}  // namespace

BENCHMARK(BM_Spmv<false>)->Name("spmv/serial")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_Spmv<true>)->Name("spmv/openmp")->Arg(64)->Arg(256)->Arg(1024);
BENCHMARK(BM_Dot<false>)->Name("dot/serial")->Arg(1 << 12)->Arg(1 << 20);
BENCHMARK(BM_Dot<true>)->Name("dot/openmp")->Arg(1 << 12)->Arg(1 << 20);
BENCHMARK(BM_MonteCarlo<false>)->Name("montecarlo/serial")->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarlo<true>)->Name("montecarlo/openmp")->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeriesSolve)->Name("series_solve/reflect")->Arg(20)->Arg(30)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
