#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace retwalk {

/// Largest state count handled by the dense verification paths.
inline constexpr std::size_t kDenseCap = 2000;

/// Pivots with magnitude below this mark a singular system.
inline constexpr double kSingularPivot = 1e-14;

class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static DenseMatrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    DenseMatrix transposed() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);

/// LU factorization with partial pivoting (PA = LU), stored in place.
class LuFactorization {
public:
    /// Throws SingularSystem when a pivot falls below kSingularPivot.
    explicit LuFactorization(DenseMatrix a);

    std::vector<double> solve(std::span<const double> b) const;
    /// Solves A^T x = b with the same factors.
    std::vector<double> solve_transposed(std::span<const double> b) const;

    std::size_t size() const noexcept { return lu_.rows(); }

private:
    DenseMatrix lu_;
    std::vector<std::size_t> perm_;  // row i of PA is row perm_[i] of A
};

}  // namespace retwalk
