#include "retwalk/sparse.hpp"

#include <algorithm>

namespace retwalk {

double CsrMatrix::at(std::size_t r, std::size_t c) const noexcept {
    auto cols = row_cols(r);
    auto it = std::lower_bound(cols.begin(), cols.end(), c);
    if (it == cols.end() || *it != c) return 0.0;
    return values[row_ptr[r] + static_cast<std::size_t>(it - cols.begin())];
}

double CsrMatrix::row_sum(std::size_t r) const noexcept {
    double s = 0.0;
    for (double v : row_values(r)) s += v;
    return s;
}

CsrMatrix CsrMatrix::transposed() const {
    CsrMatrix t;
    t.n_rows = n_cols;
    t.n_cols = n_rows;
    t.row_ptr.assign(n_cols + 1, 0);
    for (std::size_t c : col_idx) ++t.row_ptr[c + 1];
    for (std::size_t i = 0; i < n_cols; ++i) t.row_ptr[i + 1] += t.row_ptr[i];
    t.col_idx.resize(nnz());
    t.values.resize(nnz());
    std::vector<std::size_t> next(t.row_ptr.begin(), t.row_ptr.end() - 1);
    // Walking source rows in order keeps each transposed row sorted.
    for (std::size_t r = 0; r < n_rows; ++r) {
        for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) {
            std::size_t dst = next[col_idx[k]]++;
            t.col_idx[dst] = r;
            t.values[dst] = values[k];
        }
    }
    return t;
}

}  // namespace retwalk
