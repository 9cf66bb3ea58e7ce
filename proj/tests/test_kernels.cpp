#include "doctest.h"

#include <cstring>
#include <omp.h>
#include <random>

#include "retwalk/grid.hpp"
#include "retwalk/kernels.hpp"

using namespace retwalk;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("OpenMP kernels match the serial references bit for bit") {
    // large enough to cross the parallel threshold
    const auto u = build_grid_chain({{90, 90}, Boundary::Reflecting});
    const CsrMatrix& a = u.csr();
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    std::vector<double> x(a.n_cols), y(a.n_cols);
    for (auto& v : x) v = d(rng);
    for (auto& v : y) v = d(rng);

    std::vector<double> ref(a.n_rows);
    kernels::serial::spmv(a, x, ref);
    const double ref_dot = kernels::serial::dot(x, y);
    const double ref_sum = kernels::serial::sum(x);
    const double ref_norm = kernels::serial::inf_norm(x);
    std::vector<double> ref_axpy = y;
    kernels::serial::axpy(0.37, x, ref_axpy);

    const int saved = omp_get_max_threads();
    for (int threads : {1, 2, 3, 4, 7}) {
        omp_set_num_threads(threads);
        CAPTURE(threads);
        std::vector<double> out(a.n_rows);
        kernels::spmv(a, x, out);
        CHECK(same_bits(out, ref));
        CHECK(same_bits(kernels::dot(x, y), ref_dot));
        CHECK(same_bits(kernels::sum(x), ref_sum));
        CHECK(kernels::inf_norm(x) == ref_norm);
        std::vector<double> ax = y;
        kernels::axpy(0.37, x, ax);
        CHECK(same_bits(ax, ref_axpy));
    }
    omp_set_num_threads(saved);
}

TEST_CASE("transpose keeps rows sorted and entries in place") {
    const auto u = build_grid_chain({{4, 3}, Boundary::Reflecting});
    const CsrMatrix t = u.csr().transposed();
    for (std::size_t r = 0; r < t.n_rows; ++r) {
        const auto cols = t.row_cols(r);
        for (std::size_t k = 1; k < cols.size(); ++k) CHECK(cols[k - 1] < cols[k]);
        for (std::size_t k = 0; k < cols.size(); ++k) CHECK(t.row_values(r)[k] == u.csr().at(cols[k], r));
    }
    CHECK(t.nnz() == u.csr().nnz());
}
