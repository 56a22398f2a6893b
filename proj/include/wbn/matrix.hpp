#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wbn {

// Dense row-major matrix of doubles. Rows index samples in a batch, columns
// index units, matching the (mu, j) convention used throughout the network.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill)
    {
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    double* data() noexcept { return data_.data(); }
    const double* data() const noexcept { return data_.data(); }

    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    // Rows selected by index, in the given order.
    Matrix gather_rows(std::span<const std::size_t> indices) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// c = a * b^T, a: m x k, b: n x k.
Matrix matmul_nt(const Matrix& a, const Matrix& b);
// c += a^T * b, a: m x n, b: m x k, c: n x k.
void matmul_tn_accumulate(const Matrix& a, const Matrix& b, Matrix& c);
// c = a * b, a: m x n, b: n x k.
Matrix matmul_nn(const Matrix& a, const Matrix& b);

} // namespace wbn
