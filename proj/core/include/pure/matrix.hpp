#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace pure {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
///
/// A default-constructed matrix is 0 x 0. Operations that need a non-empty
/// operand check for it themselves.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    /// Throws NonFinite if any entry is NaN or infinite.
    static Matrix from_external(std::size_t rows, std::size_t cols, std::vector<double> data);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    Vector col(std::size_t c) const;
    void set_col(std::size_t c, std::span<const double> values);

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    Matrix transpose() const;
    /// Rows [first, first + count).
    Matrix row_block(std::size_t first, std::size_t count) const;
    /// Columns [0, count).
    Matrix left_cols(std::size_t count) const;

    bool operator==(const Matrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator*(double s, const Matrix& a);
inline Matrix operator*(const Matrix& a, double s) { return s * a; }

/// a^T * b without forming the transpose.
Matrix multiply_tn(const Matrix& a, const Matrix& b);
Vector multiply(const Matrix& a, std::span<const double> x);

double dot(std::span<const double> a, std::span<const double> b) noexcept;
double norm2(std::span<const double> a) noexcept;
double frobenius_norm(const Matrix& a) noexcept;
double max_abs(const Matrix& a) noexcept;
/// max |a_ij - b_ij|; shapes must match.
double max_abs_diff(const Matrix& a, const Matrix& b);

Vector row_mean(const Matrix& a);
/// Stack matrices with equal column counts on top of each other.
Matrix vstack(std::span<const Matrix> blocks);

}  // namespace pure
