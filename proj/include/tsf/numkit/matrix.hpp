#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace tsf {

/// Dense row-major matrix of doubles.
///
/// A default-constructed matrix is empty (0x0); every other constructor
/// requires positive dimensions. No operation broadcasts: operand shapes
/// must match exactly.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, double fill);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    /// Builds from nested rows, e.g. Matrix::from_rows({{1, 2}, {3, 4}}).
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    /// Column vector (n x 1).
    static Matrix column(std::span<const double> values);
    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    void fill(double value);
    bool same_shape(const Matrix& other) const noexcept {
        return rows_ == other.rows_ && cols_ == other.cols_;
    }
    bool all_finite() const noexcept;
    std::string shape_string() const;

    /// Bitwise equality of shape and contents.
    friend bool operator==(const Matrix& a, const Matrix& b) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

enum class ElementOp { add, sub, mul, sigmoid, tanh, one_minus };

const char* to_string(ElementOp op);

Matrix matmul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);

/// Unary form: sigmoid, tanh, one_minus. Binary ops throw ArgumentError here.
Matrix elementwise(ElementOp op, const Matrix& a);
/// Binary form: add, sub, mul. Unary ops throw ArgumentError here.
Matrix elementwise(ElementOp op, const Matrix& a, const Matrix& b);

/// Numerically stable logistic function.
inline double sigmoid(double x) noexcept {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

} // namespace tsf
