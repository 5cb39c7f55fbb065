#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace advfront {

/// Dense row-major matrix of doubles. The only numeric container used by
/// the library: batches, weights, activations and gradients are all Matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::vector<double>& data() noexcept { return data_; }
    const std::vector<double>& data() const noexcept { return data_; }

    /// Copy of rows [first, first + count).
    Matrix slice_rows(std::size_t first, std::size_t count) const;
    /// Copy of the listed rows, in order.
    Matrix gather_rows(std::span<const std::size_t> indices) const;

    bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// Single-row matrix holding a copy of `values`.
Matrix row_matrix(std::span<const double> values);

}  // namespace advfront
