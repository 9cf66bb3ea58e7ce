#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "retwalk/error.hpp"
#include "retwalk/sparse.hpp"

namespace retwalk {

/// Absolute tolerance on every row sum of a transition matrix.
inline constexpr double kRowSumTolerance = 1e-12;

struct StateIndex {
    std::size_t value = 0;
    friend bool operator==(StateIndex, StateIndex) = default;
};

/// One raw (row, col, probability) triple as supplied by a caller or a file.
struct Entry {
    std::size_t row;
    std::size_t col;
    double prob;
};

/// Validated sparse row-stochastic transition matrix of a random walk whose
/// support graph is strongly connected. Immutable once built.
class StochasticMatrix {
public:
    std::size_t n_states() const noexcept { return csr_.n_rows; }
    const CsrMatrix& csr() const noexcept { return csr_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    double at(StateIndex x, StateIndex y) const noexcept { return csr_.at(x.value, y.value); }

    /// Throws IndexOutOfRange when i is not a state of this chain.
    StateIndex index(std::size_t i) const;

    friend StochasticMatrix from_sparse_rows(std::size_t n, const std::vector<Entry>& entries,
                                             std::vector<std::string> labels);

private:
    CsrMatrix csr_;
    std::vector<std::string> labels_;
};

/// Builds a validated chain. Zero entries are dropped and rows are sorted by
/// column. Throws Error carrying the first violated invariant's code.
StochasticMatrix from_sparse_rows(std::size_t n, const std::vector<Entry>& entries,
                                  std::vector<std::string> labels = {});

/// Lists every invariant the raw entries violate; empty iff from_sparse_rows
/// would accept them.
ValidationReport validate(std::size_t n, const std::vector<Entry>& entries);

/// Re-checks an existing chain (always empty for chains built through this API).
ValidationReport validate(const StochasticMatrix& u);

std::vector<Entry> entries_of(const StochasticMatrix& u);

/// Graph JSON: {"n": int, "labels": [..]?, "rows": [[[col, prob], ...], ...]}
StochasticMatrix parse_graph_json(const std::string& text);
StochasticMatrix load_graph_file(const std::filesystem::path& path);

/// Serializes with shortest round-trip float formatting; ends with a newline.
std::string to_graph_json(const StochasticMatrix& u);
void save_graph_file(const StochasticMatrix& u, const std::filesystem::path& path);

}  // namespace retwalk
