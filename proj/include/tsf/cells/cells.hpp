#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tsf/numkit/matrix.hpp"
#include "tsf/numkit/rng.hpp"

namespace tsf {

enum class CellKind { lstm, gru };

const char* to_string(CellKind kind);
/// Accepts "lstm" or "gru"; throws ArgumentError otherwise.
CellKind parse_cell_kind(std::string_view text);

/// Weights of one gate for a univariate input: W (units x 1), U (units x units), b (units x 1).
struct GateParams {
    Matrix input_weight;
    Matrix recurrent_weight;
    Matrix bias;

    GateParams() = default;
    explicit GateParams(std::size_t units);
};

struct LstmParams {
    GateParams input;
    GateParams forget;
    GateParams output;
    GateParams candidate;

    LstmParams() = default;
    explicit LstmParams(std::size_t units);
};

/// The candidate gate applies the reset gate inside its recurrent term:
/// n = tanh(W_n x + U_n (r * h) + b_n).
struct GruParams {
    GateParams update;
    GateParams reset;
    GateParams candidate;

    GruParams() = default;
    explicit GruParams(std::size_t units);
};

/// Linear head mapping the final hidden state to the forecast: y = W h + b.
struct DenseParams {
    Matrix weight; // horizon x units
    Matrix bias;   // horizon x 1

    DenseParams() = default;
    DenseParams(std::size_t horizon, std::size_t units);
};

struct Parameters {
    std::variant<LstmParams, GruParams> cell;
    DenseParams head;
};

/// All trainable weights of a recurrent forecaster plus gradient buffers of
/// identical shape. Dimensions are fixed at construction; parameters start
/// at zero until initialize() is called.
class ModelState {
public:
    ModelState(CellKind kind, std::size_t units, std::size_t window, std::size_t horizon);

    CellKind kind() const noexcept { return kind_; }
    std::size_t units() const noexcept { return units_; }
    std::size_t window() const noexcept { return window_; }
    std::size_t horizon() const noexcept { return horizon_; }

    Parameters& params() noexcept { return params_; }
    const Parameters& params() const noexcept { return params_; }
    Parameters& grads() noexcept { return grads_; }
    const Parameters& grads() const noexcept { return grads_; }

    LstmParams& lstm();
    const LstmParams& lstm() const;
    GruParams& gru();
    const GruParams& gru() const;
    DenseParams& head() noexcept { return params_.head; }
    const DenseParams& head() const noexcept { return params_.head; }

    /// Tensors in a fixed order: cell gates (W, U, b per gate), then head W, b.
    std::vector<Matrix*> parameter_tensors();
    std::vector<const Matrix*> parameter_tensors() const;
    std::vector<Matrix*> gradient_tensors();
    std::vector<const Matrix*> gradient_tensors() const;
    /// Names matching parameter_tensors(), e.g. "lstm.forget.U" or "head.W".
    std::vector<std::string> tensor_names() const;

    void zero_grads();

    /// Weights uniform in [-1/sqrt(units), 1/sqrt(units)], biases zero.
    void initialize(Rng& rng);

private:
    CellKind kind_;
    std::size_t units_;
    std::size_t window_;
    std::size_t horizon_;
    Parameters params_;
    Parameters grads_;
};

struct LstmTrace {
    std::vector<Matrix> hidden; // h_1..h_w, each units x 1
    std::vector<Matrix> cell;   // c_1..c_w
    Matrix final_hidden;
};

struct GruTrace {
    std::vector<Matrix> hidden;
    Matrix final_hidden;
};

/// Runs the LSTM recurrence over one window from h_0 = c_0 = 0.
LstmTrace lstm_forward(const ModelState& state, std::span<const double> window);
/// Runs the GRU recurrence over one window from h_0 = 0.
GruTrace gru_forward(const ModelState& state, std::span<const double> window);

/// W h + b for a units x 1 hidden state; no activation.
Matrix dense_forward(const DenseParams& head, const Matrix& hidden);

/// Forecasts for every row of `windows` (n x w). Returns n x horizon.
Matrix predict(const ModelState& state, const Matrix& windows);

/// MSE loss (1/f) sum_k (yhat_k - y_k)^2 for one window; fills the gradient
/// buffers by backpropagation through time. With accumulate=false previous
/// gradients are overwritten.
double backward(ModelState& state, std::span<const double> window, std::span<const double> target,
                bool accumulate = false);

/// Batched form: returns the mean per-sample loss and writes the mean of the
/// per-sample gradients.
double backward_batch(ModelState& state, const Matrix& windows, const Matrix& targets,
                      bool accumulate = false);

} // namespace tsf
