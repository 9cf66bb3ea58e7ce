#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace retwalk {

/// Compressed sparse row storage. Column indices within each row are
/// strictly increasing; explicit zeros are never stored.
struct CsrMatrix {
    std::size_t n_rows = 0;
    std::size_t n_cols = 0;
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> col_idx;
    std::vector<double> values;

    std::size_t nnz() const noexcept { return values.size(); }

    std::span<const std::size_t> row_cols(std::size_t r) const noexcept {
        return {col_idx.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
    }
    std::span<const double> row_values(std::size_t r) const noexcept {
        return {values.data() + row_ptr[r], row_ptr[r + 1] - row_ptr[r]};
    }

    /// Stored value at (r, c), or 0.
    double at(std::size_t r, std::size_t c) const noexcept;

    double row_sum(std::size_t r) const noexcept;

    CsrMatrix transposed() const;
};

}  // namespace retwalk
