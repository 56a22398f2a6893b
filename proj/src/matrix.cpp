#include "wbn/matrix.hpp"

#include "wbn/error.hpp"
#include "wbn/kernels.hpp"

#include <string>

namespace wbn {

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows)
{
    if (rows.empty()) {
        return {};
    }
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != m.cols()) {
            fail(ErrorCode::ShapeMismatch, "ragged rows in Matrix::from_rows");
        }
        for (std::size_t c = 0; c < m.cols(); ++c) {
            m(r, c) = rows[r][c];
        }
    }
    return m;
}

Matrix Matrix::gather_rows(std::span<const std::size_t> indices) const
{
    Matrix out(indices.size(), cols_);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        if (indices[r] >= rows_) {
            fail(ErrorCode::IndexOutOfRange, "row index " + std::to_string(indices[r]));
        }
        const auto src = row(indices[r]);
        std::copy(src.begin(), src.end(), out.row(r).begin());
    }
    return out;
}

Matrix matmul_nt(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.cols()) {
        fail(ErrorCode::ShapeMismatch, "matmul_nt: inner dimensions " + std::to_string(a.cols()) +
                                           " vs " + std::to_string(b.cols()));
    }
    Matrix c(a.rows(), b.rows());
    kernels::active().gemm_nt(a.data(), b.data(), c.data(), a.rows(), b.rows(), a.cols());
    return c;
}

void matmul_tn_accumulate(const Matrix& a, const Matrix& b, Matrix& c)
{
    if (a.rows() != b.rows() || c.rows() != a.cols() || c.cols() != b.cols()) {
        fail(ErrorCode::ShapeMismatch, "matmul_tn_accumulate: incompatible shapes");
    }
    kernels::active().gemm_tn_acc(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
}

Matrix matmul_nn(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows()) {
        fail(ErrorCode::ShapeMismatch, "matmul_nn: inner dimensions " + std::to_string(a.cols()) +
                                           " vs " + std::to_string(b.rows()));
    }
    Matrix c(a.rows(), b.cols());
    kernels::active().gemm_nn(a.data(), b.data(), c.data(), a.rows(), a.cols(), b.cols());
    return c;
}

} // namespace wbn
