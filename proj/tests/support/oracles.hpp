#pragma once

// Test-only reference computations. Nothing here calls into the solver,
// waiting-room or return-time code paths it is used to check.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "retwalk/chain.hpp"

namespace oracle {

using retwalk::Entry;
using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

inline Mat dense_u(const retwalk::StochasticMatrix& u) {
    const std::size_t n = u.n_states();
    Mat m = Mat::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& e : retwalk::entries_of(u))
        m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.prob;
    return m;
}

/// Full (N+1) x (N+1) modified matrix assembled entry by entry from the
/// case table: transient block, inbound column to l, l -> b, b -> b.
inline Mat assemble_m(const retwalk::StochasticMatrix& u, std::size_t o) {
    const Mat du = dense_u(u);
    const auto n = static_cast<Eigen::Index>(u.n_states());
    const auto io = static_cast<Eigen::Index>(o);
    auto f = [&](Eigen::Index x) { return x < io ? x : x - 1; };
    Mat m = Mat::Zero(n + 1, n + 1);
    const Eigen::Index l = n - 1, b = n;
    for (Eigen::Index x = 0; x < n; ++x) {
        if (x == io) continue;
        for (Eigen::Index y = 0; y < n; ++y) {
            if (y == io) continue;
            m(f(x), f(y)) = du(x, y);
        }
        m(f(x), l) = du(x, io);
    }
    m(l, b) = 1.0;
    m(b, b) = 1.0;
    return m;
}

/// Transient block Q taken from the dense chain.
inline Mat dense_q(const retwalk::StochasticMatrix& u, std::size_t o) {
    const Mat m = assemble_m(u, o);
    const auto k = static_cast<Eigen::Index>(u.n_states()) - 1;
    return m.topLeftCorner(k, k);
}

inline double spectral_radius(const Mat& a) {
    if (a.rows() == 0) return 0.0;
    Eigen::EigenSolver<Mat> es(a, /*computeEigenvectors=*/false);
    double r = 0.0;
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) r = std::max(r, std::abs(es.eigenvalues()(i)));
    return r;
}

/// Expected steps to reach o from each state, by Householder QR on the
/// full first-step system.
inline double mean_return_time(const retwalk::StochasticMatrix& u, std::size_t o) {
    const Mat du = dense_u(u);
    const Mat q = dense_q(u, o);
    const auto k = q.rows();
    const Vec t = (Mat::Identity(k, k) - q).colPivHouseholderQr().solve(Vec::Ones(k));
    double e = 1.0;
    const auto io = static_cast<Eigen::Index>(o);
    for (Eigen::Index y = 0; y < du.cols(); ++y) {
        if (y == io) continue;
        e += du(io, y) * t(y < io ? y : y - 1);
    }
    return e;
}

/// Transitive closure by Floyd-Warshall; strongly connected iff every pair
/// reaches every other.
inline bool strongly_connected(std::size_t n, const std::vector<Entry>& entries) {
    std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
    for (std::size_t i = 0; i < n; ++i) reach[i][i] = 1;
    for (const auto& e : entries)
        if (e.prob != 0.0 && e.row < n && e.col < n) reach[e.row][e.col] = 1;
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t i = 0; i < n; ++i)
            if (reach[i][k])
                for (std::size_t j = 0; j < n; ++j)
                    if (reach[k][j]) reach[i][j] = 1;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!reach[i][j]) return false;
    return true;
}

/// Normalizes positive weights per row; row sums land within a few ulps of 1.
inline std::vector<Entry> normalize(std::size_t n, std::vector<Entry> raw) {
    std::vector<double> sums(n, 0.0);
    for (const auto& e : raw) sums[e.row] += e.prob;
    for (auto& e : raw) e.prob /= sums[e.row];
    return raw;
}

/// Random strongly connected chain: a shuffled Hamiltonian cycle plus
/// random extra edges (self-loops allowed) with random weights.
inline retwalk::StochasticMatrix random_chain(std::mt19937_64& rng, std::size_t n, double density = 0.3) {
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::uniform_real_distribution<double> w(0.05, 1.0);
    std::bernoulli_distribution extra(density);
    std::vector<std::vector<char>> has(n, std::vector<char>(n, 0));
    std::vector<Entry> raw;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = perm[i], b = perm[(i + 1) % n];
        has[a][b] = 1;
        raw.push_back({a, b, w(rng)});
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b)
            if (!has[a][b] && extra(rng)) {
                has[a][b] = 1;
                raw.push_back({a, b, w(rng)});
            }
    return retwalk::from_sparse_rows(n, normalize(n, std::move(raw)));
}

/// Random row-stochastic entries with no connectivity guarantee.
inline std::vector<Entry> random_stochastic_entries(std::mt19937_64& rng, std::size_t n, double density) {
    std::uniform_real_distribution<double> w(0.05, 1.0);
    std::bernoulli_distribution keep(density);
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<Entry> raw;
    for (std::size_t a = 0; a < n; ++a) {
        bool any = false;
        for (std::size_t b = 0; b < n; ++b)
            if (keep(rng)) {
                raw.push_back({a, b, w(rng)});
                any = true;
            }
        if (!any) raw.push_back({a, pick(rng), 1.0});
    }
    return normalize(n, std::move(raw));
}

inline retwalk::StochasticMatrix three_cycle() {
    return retwalk::from_sparse_rows(3, {{0, 1, .5}, {0, 2, .5}, {1, 0, .5}, {1, 2, .5}, {2, 0, .5}, {2, 1, .5}});
}
inline retwalk::StochasticMatrix swap_chain() { return retwalk::from_sparse_rows(2, {{0, 1, 1.0}, {1, 0, 1.0}}); }
inline retwalk::StochasticMatrix stay_pair() {
    return retwalk::from_sparse_rows(2, {{0, 0, .5}, {0, 1, .5}, {1, 0, .5}, {1, 1, .5}});
}
inline retwalk::StochasticMatrix path3() {
    return retwalk::from_sparse_rows(3, {{0, 1, 1.0}, {1, 0, .5}, {1, 2, .5}, {2, 1, 1.0}});
}

}  // namespace oracle
