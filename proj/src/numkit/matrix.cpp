#include "tsf/numkit/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "tsf/numkit/errors.hpp"
#include "tsf/numkit/kernels.hpp"

namespace tsf {

namespace {

void require_positive(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) {
        throw ShapeError("matrix dimensions must be positive, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
    }
}

void require_finite(const Matrix& m, const char* what) {
    if (!m.all_finite()) {
        throw NumericError(std::string(what) + " produced a non-finite value");
    }
}

} // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols) : Matrix(rows, cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols) {
    require_positive(rows, cols);
    data_.assign(rows * cols, fill);
}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    require_positive(rows, cols);
    if (data_.size() != rows * cols) {
        throw ShapeError("matrix " + shape_string() + " needs " + std::to_string(rows * cols) +
                         " values, got " + std::to_string(data_.size()));
    }
    require_finite(*this, "matrix construction");
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw ShapeError("ragged initializer: expected rows of length " + std::to_string(c));
        }
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
}

Matrix Matrix::column(std::span<const double> values) {
    return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

void Matrix::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Matrix::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string Matrix::shape_string() const {
    return "(" + std::to_string(rows_) + "x" + std::to_string(cols_) + ")";
}

const char* to_string(ElementOp op) {
    switch (op) {
    case ElementOp::add: return "add";
    case ElementOp::sub: return "sub";
    case ElementOp::mul: return "mul";
    case ElementOp::sigmoid: return "sigmoid";
    case ElementOp::tanh: return "tanh";
    case ElementOp::one_minus: return "one_minus";
    }
    return "?";
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.empty() || b.empty() || a.cols() != b.rows()) {
        throw ShapeError("matmul: cannot multiply " + a.shape_string() + " by " + b.shape_string());
    }
    Matrix out(a.rows(), b.cols());
    kernels::gemm_acc(a.rows(), a.cols(), b.cols(), a.data().data(), a.cols(), b.data().data(),
                      b.cols(), out.data().data(), out.cols());
    require_finite(out, "matmul");
    return out;
}

Matrix transpose(const Matrix& a) {
    if (a.empty()) {
        throw ShapeError("transpose of an empty matrix");
    }
    Matrix out(a.cols(), a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out(c, r) = a(r, c);
        }
    }
    return out;
}

Matrix elementwise(ElementOp op, const Matrix& a) {
    if (a.empty()) {
        throw ShapeError(std::string("elementwise ") + to_string(op) + " on an empty matrix");
    }
    Matrix out = a;
    auto d = out.data();
    switch (op) {
    case ElementOp::sigmoid:
        std::transform(d.begin(), d.end(), d.begin(), [](double x) { return sigmoid(x); });
        break;
    case ElementOp::tanh:
        std::transform(d.begin(), d.end(), d.begin(), [](double x) { return std::tanh(x); });
        break;
    case ElementOp::one_minus:
        std::transform(d.begin(), d.end(), d.begin(), [](double x) { return 1.0 - x; });
        break;
    default:
        throw ArgumentError(std::string("elementwise ") + to_string(op) + " needs two operands");
    }
    require_finite(out, to_string(op));
    return out;
}

Matrix elementwise(ElementOp op, const Matrix& a, const Matrix& b) {
    if (a.empty() || !a.same_shape(b)) {
        throw ShapeError(std::string("elementwise ") + to_string(op) + ": shape mismatch " +
                         a.shape_string() + " vs " + b.shape_string());
    }
    Matrix out = a;
    auto d = out.data();
    auto rhs = b.data();
    switch (op) {
    case ElementOp::add:
        std::transform(d.begin(), d.end(), rhs.begin(), d.begin(), std::plus<>{});
        break;
    case ElementOp::sub:
        std::transform(d.begin(), d.end(), rhs.begin(), d.begin(), std::minus<>{});
        break;
    case ElementOp::mul:
        std::transform(d.begin(), d.end(), rhs.begin(), d.begin(), std::multiplies<>{});
        break;
    default:
        throw ArgumentError(std::string("elementwise ") + to_string(op) + " takes one operand");
    }
    require_finite(out, to_string(op));
    return out;
}

} // namespace tsf
