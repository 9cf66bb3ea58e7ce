#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "retwalk/chain.hpp"
#include "retwalk/dense.hpp"
#include "retwalk/sparse.hpp"

namespace retwalk {

/// The chain with origin o removed: inbound transitions to o are redirected
/// to a waiting state l that feeds an absorbing state b.
///
/// Modified-chain indexing: states other than o keep their order (indices
/// above o shift down by one), l sits at N-1 and b at N. Only the transient
/// block Q, the single nonzero column of R (the inbound probabilities
/// U[x][o]) and the origin's out-row are stored; the l/b block is the
/// constant [[0, 1], [0, 1]].
class WaitingRoom {
public:
    StateIndex origin() const noexcept { return origin_; }
    /// N, the state count of the original chain.
    std::size_t n_states() const noexcept { return q_.n_rows + 1; }
    /// N - 1, the number of transient states.
    std::size_t n_transient() const noexcept { return q_.n_rows; }

    const CsrMatrix& q() const noexcept { return q_; }
    const CsrMatrix& q_transposed() const noexcept { return q_t_; }
    /// Inbound column: r_col[i] = U[x][o] for the state x flattened to i.
    const std::vector<double>& r_col() const noexcept { return r_col_; }
    /// Origin out-row without the self-loop: s_row[i] = U[o][x].
    const std::vector<double>& s_row() const noexcept { return s_row_; }
    double u_oo() const noexcept { return u_oo_; }
    /// Original indices x != o with U[x][o] > 0, ascending.
    const std::vector<std::size_t>& neighbor_set() const noexcept { return neighbors_; }

    /// Flattened index of an original state, or nullopt for the origin.
    std::optional<std::size_t> flatten(StateIndex x) const noexcept;
    StateIndex unflatten(std::size_t i) const noexcept;
    std::size_t waiting_index() const noexcept { return n_transient(); }
    std::size_t absorbing_index() const noexcept { return n_transient() + 1; }

    friend WaitingRoom build_waiting_room(const StochasticMatrix& u, StateIndex o);

private:
    StateIndex origin_;
    CsrMatrix q_;
    CsrMatrix q_t_;
    std::vector<double> r_col_;
    std::vector<double> s_row_;
    double u_oo_ = 0.0;
    std::vector<std::size_t> neighbors_;
};

WaitingRoom build_waiting_room(const StochasticMatrix& u, StateIndex o);

/// Checks the structural invariants (substochastic rows, mass conservation
/// against r_col, out-row mass); empty when all hold.
ValidationReport validate(const WaitingRoom& w);

struct SpectralEstimate {
    double value = 0.0;
    std::size_t iterations = 0;
    /// Certified upper bound ||Q^k||_inf^(1/k) at the final iteration k.
    double upper_bound = 0.0;
};

/// Power iteration on Q from the all-ones vector with l-infinity scaling.
/// Converged when successive norm-growth estimates (or, for period-2
/// structure, their two-step geometric means) differ by less than tol.
/// Throws NoConvergence with the last bracket after max_iters.
SpectralEstimate spectral_radius_estimate(const WaitingRoom& w, std::size_t max_iters = 200000,
                                          double tol = 1e-13);

/// Blocks of the k-th power of the modified transition matrix.
struct BlockPowers {
    DenseMatrix q_power;               // Q^k
    std::vector<double> waiting_column;   // Q^(k-1) r_col
    std::vector<double> absorbing_column; // sum_{j=0}^{k-2} Q^j r_col
};

/// Throws DenseCapExceeded when N - 1 > kDenseCap.
BlockPowers modified_power(const WaitingRoom& w, std::size_t k);

/// p[k-1] = probability that the first return to o happens at step k.
std::vector<double> first_return_distribution(const WaitingRoom& w, std::size_t k_max);

}  // namespace retwalk
