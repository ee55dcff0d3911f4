#include "pure/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pure/error.hpp"

namespace pure {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op)
{
    if (a.rows() != b.rows() || a.cols() != b.cols())
        fail(ErrorCode::ShapeMismatch,
             std::string(op) + ": " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " vs " +
                 std::to_string(b.rows()) + "x" + std::to_string(b.cols()));
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill)
{
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data))
{
    if (data_.size() != rows_ * cols_)
        fail(ErrorCode::ShapeMismatch, "data length " + std::to_string(data_.size()) + " does not match " +
                                           std::to_string(rows_) + "x" + std::to_string(cols_));
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
{
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& r : rows) {
        if (r.size() != cols_)
            fail(ErrorCode::ShapeMismatch, "ragged initializer list");
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

Matrix Matrix::identity(std::size_t n)
{
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        m(i, i) = 1.0;
    return m;
}

Matrix Matrix::from_external(std::size_t rows, std::size_t cols, std::vector<double> data)
{
    for (std::size_t i = 0; i < data.size(); ++i)
        if (!std::isfinite(data[i]))
            fail(ErrorCode::NonFinite, "entry " + std::to_string(i) + " is not finite");
    return Matrix(rows, cols, std::move(data));
}

Vector Matrix::col(std::size_t c) const
{
    Vector out(rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        out[r] = (*this)(r, c);
    return out;
}

void Matrix::set_col(std::size_t c, std::span<const double> values)
{
    for (std::size_t r = 0; r < rows_; ++r)
        (*this)(r, c) = values[r];
}

Matrix Matrix::transpose() const
{
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c)
            t(c, r) = (*this)(r, c);
    return t;
}

Matrix Matrix::row_block(std::size_t first, std::size_t count) const
{
    if (first + count > rows_)
        fail(ErrorCode::OutOfRange, "row block exceeds matrix");
    std::vector<double> d(data_.begin() + static_cast<std::ptrdiff_t>(first * cols_),
                          data_.begin() + static_cast<std::ptrdiff_t>((first + count) * cols_));
    return Matrix(count, cols_, std::move(d));
}

Matrix Matrix::left_cols(std::size_t count) const
{
    if (count > cols_)
        fail(ErrorCode::OutOfRange, "column count exceeds matrix");
    Matrix out(rows_, count);
    for (std::size_t r = 0; r < rows_; ++r)
        std::copy_n(row(r).begin(), count, out.row(r).begin());
    return out;
}

Matrix operator*(const Matrix& a, const Matrix& b)
{
    if (a.cols() != b.rows())
        fail(ErrorCode::ShapeMismatch, "matrix product inner dimensions differ");
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto dst = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double s = a(i, k);
            if (s == 0.0)
                continue;
            auto src = b.row(k);
            for (std::size_t j = 0; j < b.cols(); ++j)
                dst[j] += s * src[j];
        }
    }
    return out;
}

Matrix multiply_tn(const Matrix& a, const Matrix& b)
{
    if (a.rows() != b.rows())
        fail(ErrorCode::ShapeMismatch, "transposed product row counts differ");
    Matrix out(a.cols(), b.cols());
    for (std::size_t k = 0; k < a.rows(); ++k) {
        auto ak = a.row(k);
        auto bk = b.row(k);
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double s = ak[i];
            if (s == 0.0)
                continue;
            auto dst = out.row(i);
            for (std::size_t j = 0; j < b.cols(); ++j)
                dst[j] += s * bk[j];
        }
    }
    return out;
}

Vector multiply(const Matrix& a, std::span<const double> x)
{
    if (a.cols() != x.size())
        fail(ErrorCode::ShapeMismatch, "matrix-vector product dimensions differ");
    Vector out(a.rows());
    for (std::size_t i = 0; i < a.rows(); ++i)
        out[i] = dot(a.row(i), x);
    return out;
}

Matrix operator-(const Matrix& a, const Matrix& b)
{
    require_same_shape(a, b, "subtract");
    Matrix out = a;
    auto d = out.data();
    auto s = b.data();
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] -= s[i];
    return out;
}

Matrix operator+(const Matrix& a, const Matrix& b)
{
    require_same_shape(a, b, "add");
    Matrix out = a;
    auto d = out.data();
    auto s = b.data();
    for (std::size_t i = 0; i < d.size(); ++i)
        d[i] += s[i];
    return out;
}

Matrix operator*(double s, const Matrix& a)
{
    Matrix out = a;
    for (auto& v : out.data())
        v *= s;
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) noexcept
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double norm2(std::span<const double> a) noexcept
{
    // scaled to avoid overflow/underflow on extreme inputs
    double scale = 0.0;
    for (double v : a)
        scale = std::max(scale, std::abs(v));
    if (scale == 0.0)
        return 0.0;
    double s = 0.0;
    for (double v : a) {
        const double t = v / scale;
        s += t * t;
    }
    return scale * std::sqrt(s);
}

double frobenius_norm(const Matrix& a) noexcept
{
    return norm2(a.data());
}

double max_abs(const Matrix& a) noexcept
{
    double m = 0.0;
    for (double v : a.data())
        m = std::max(m, std::abs(v));
    return m;
}

double max_abs_diff(const Matrix& a, const Matrix& b)
{
    require_same_shape(a, b, "max_abs_diff");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

Vector row_mean(const Matrix& a)
{
    Vector mean(a.cols(), 0.0);
    if (a.rows() == 0)
        return mean;
    for (std::size_t r = 0; r < a.rows(); ++r) {
        auto row = a.row(r);
        for (std::size_t c = 0; c < a.cols(); ++c)
            mean[c] += row[c];
    }
    const double inv = 1.0 / static_cast<double>(a.rows());
    for (auto& m : mean)
        m *= inv;
    return mean;
}

Matrix vstack(std::span<const Matrix> blocks)
{
    if (blocks.empty())
        return {};
    const std::size_t cols = blocks.front().cols();
    std::size_t rows = 0;
    for (const auto& b : blocks) {
        if (b.cols() != cols)
            fail(ErrorCode::ShapeMismatch, "vstack column counts differ");
        rows += b.rows();
    }
    std::vector<double> data;
    data.reserve(rows * cols);
    for (const auto& b : blocks)
        data.insert(data.end(), b.data().begin(), b.data().end());
    return Matrix(rows, cols, std::move(data));
}

}  // namespace pure
