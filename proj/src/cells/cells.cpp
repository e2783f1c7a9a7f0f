#include "tsf/cells/cells.hpp"

#include <algorithm>
#include <cmath>

#include "tsf/numkit/errors.hpp"
#include "tsf/numkit/kernels.hpp"

namespace tsf {

const char* to_string(CellKind kind) {
    return kind == CellKind::lstm ? "lstm" : "gru";
}

CellKind parse_cell_kind(std::string_view text) {
    if (text == "lstm") {
        return CellKind::lstm;
    }
    if (text == "gru") {
        return CellKind::gru;
    }
    throw ArgumentError("unknown cell kind '" + std::string(text) + "' (expected lstm or gru)");
}

GateParams::GateParams(std::size_t units)
    : input_weight(units, 1), recurrent_weight(units, units), bias(units, 1) {}

LstmParams::LstmParams(std::size_t units)
    : input(units), forget(units), output(units), candidate(units) {}

GruParams::GruParams(std::size_t units) : update(units), reset(units), candidate(units) {}

DenseParams::DenseParams(std::size_t horizon, std::size_t units)
    : weight(horizon, units), bias(horizon, 1) {}

namespace {

Parameters make_parameters(CellKind kind, std::size_t units, std::size_t horizon) {
    Parameters p;
    if (kind == CellKind::lstm) {
        p.cell = LstmParams(units);
    } else {
        p.cell = GruParams(units);
    }
    p.head = DenseParams(horizon, units);
    return p;
}

// Gate order matches the packed layouts used by the batch engines below.
std::vector<GateParams*> gates_of(Parameters& p) {
    if (auto* l = std::get_if<LstmParams>(&p.cell)) {
        return {&l->input, &l->forget, &l->output, &l->candidate};
    }
    auto& g = std::get<GruParams>(p.cell);
    return {&g.update, &g.reset, &g.candidate};
}

std::vector<const GateParams*> gates_of(const Parameters& p) {
    if (const auto* l = std::get_if<LstmParams>(&p.cell)) {
        return {&l->input, &l->forget, &l->output, &l->candidate};
    }
    const auto& g = std::get<GruParams>(p.cell);
    return {&g.update, &g.reset, &g.candidate};
}

template <typename P, typename M>
std::vector<M*> tensors_of(P& p) {
    std::vector<M*> out;
    for (auto* gate : gates_of(p)) {
        out.push_back(&gate->input_weight);
        out.push_back(&gate->recurrent_weight);
        out.push_back(&gate->bias);
    }
    out.push_back(&p.head.weight);
    out.push_back(&p.head.bias);
    return out;
}

} // namespace

ModelState::ModelState(CellKind kind, std::size_t units, std::size_t window, std::size_t horizon)
    : kind_(kind), units_(units), window_(window), horizon_(horizon) {
    if (units == 0 || window == 0 || horizon == 0) {
        throw ArgumentError("model dimensions must be positive (units=" + std::to_string(units) +
                            ", window=" + std::to_string(window) +
                            ", horizon=" + std::to_string(horizon) + ")");
    }
    params_ = make_parameters(kind, units, horizon);
    grads_ = make_parameters(kind, units, horizon);
}

LstmParams& ModelState::lstm() {
    if (kind_ != CellKind::lstm) {
        throw ArgumentError("model is a GRU, not an LSTM");
    }
    return std::get<LstmParams>(params_.cell);
}

const LstmParams& ModelState::lstm() const {
    return const_cast<ModelState*>(this)->lstm();
}

GruParams& ModelState::gru() {
    if (kind_ != CellKind::gru) {
        throw ArgumentError("model is an LSTM, not a GRU");
    }
    return std::get<GruParams>(params_.cell);
}

const GruParams& ModelState::gru() const {
    return const_cast<ModelState*>(this)->gru();
}

std::vector<Matrix*> ModelState::parameter_tensors() {
    return tensors_of<Parameters, Matrix>(params_);
}

std::vector<const Matrix*> ModelState::parameter_tensors() const {
    return tensors_of<const Parameters, const Matrix>(params_);
}

std::vector<Matrix*> ModelState::gradient_tensors() {
    return tensors_of<Parameters, Matrix>(grads_);
}

std::vector<const Matrix*> ModelState::gradient_tensors() const {
    return tensors_of<const Parameters, const Matrix>(grads_);
}

std::vector<std::string> ModelState::tensor_names() const {
    static const char* const lstm_gates[] = {"input", "forget", "output", "candidate"};
    static const char* const gru_gates[] = {"update", "reset", "candidate"};
    std::vector<std::string> names;
    const std::string prefix = to_string(kind_);
    const auto gates = kind_ == CellKind::lstm ? std::span<const char* const>(lstm_gates)
                                               : std::span<const char* const>(gru_gates);
    for (const char* gate : gates) {
        for (const char* t : {"W", "U", "b"}) {
            names.push_back(prefix + "." + gate + "." + t);
        }
    }
    names.emplace_back("head.W");
    names.emplace_back("head.b");
    return names;
}

void ModelState::zero_grads() {
    for (Matrix* g : gradient_tensors()) {
        g->fill(0.0);
    }
}

void ModelState::initialize(Rng& rng) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(units_));
    for (GateParams* gate : gates_of(params_)) {
        gate->input_weight = rng_uniform(rng, -scale, scale, units_, 1);
        gate->recurrent_weight = rng_uniform(rng, -scale, scale, units_, units_);
        gate->bias.fill(0.0);
    }
    params_.head.weight = rng_uniform(rng, -scale, scale, horizon_, units_);
    params_.head.bias.fill(0.0);
}

namespace {

void require_window(const ModelState& state, std::size_t length) {
    if (length != state.window()) {
        throw ShapeError("window length " + std::to_string(length) + " does not match model window " +
                         std::to_string(state.window()));
    }
}

void require_finite(std::span<const double> values, const char* what) {
    for (double v : values) {
        if (!std::isfinite(v)) {
            throw NumericError(std::string(what) + " contains a non-finite value");
        }
    }
}

inline double dsigmoid(double s) { return s * (1.0 - s); }
inline double dtanh(double t) { return 1.0 - t * t; }

// Parameters rearranged for the batched kernels: input weights and biases
// concatenated gate-wise, recurrent weights both stacked (natural layout,
// gates x units rows by units columns) and transposed (units x gates*units).
struct PackedCell {
    std::size_t units = 0;
    std::size_t gates = 0;
    std::vector<double> input_weight;
    std::vector<double> bias;
    std::vector<double> recurrent;
    std::vector<double> recurrent_t;

    PackedCell(const Parameters& p, std::size_t units_) : units(units_) {
        const auto gs = gates_of(p);
        gates = gs.size();
        const std::size_t width = gates * units;
        input_weight.resize(width);
        bias.resize(width);
        recurrent.resize(width * units);
        recurrent_t.resize(units * width);
        for (std::size_t g = 0; g < gates; ++g) {
            const GateParams& gate = *gs[g];
            const auto w = gate.input_weight.data();
            const auto b = gate.bias.data();
            const auto u = gate.recurrent_weight.data();
            std::copy(w.begin(), w.end(), input_weight.begin() + g * units);
            std::copy(b.begin(), b.end(), bias.begin() + g * units);
            std::copy(u.begin(), u.end(), recurrent.begin() + g * units * units);
            for (std::size_t j = 0; j < units; ++j) {
                for (std::size_t k = 0; k < units; ++k) {
                    recurrent_t[k * width + g * units + j] = u[j * units + k];
                }
            }
        }
    }
};

// Forward activations for a batch of windows, kept for backpropagation.
// Buffers are time-major: [t][batch][...]; hidden/cell hold t = 0..w with
// slot 0 the zero initial state.
struct BatchTrace {
    std::size_t batch = 0;
    std::size_t steps = 0;
    std::vector<double> gates;   // steps x batch x gates*units (activated)
    std::vector<double> hidden;  // (steps+1) x batch x units
    std::vector<double> cell;    // LSTM: (steps+1) x batch x units
    std::vector<double> aux;     // LSTM: tanh(c_t); GRU: r_t * h_{t-1}; steps x batch x units
    std::vector<double> output;  // batch x horizon
};

class Engine {
public:
    explicit Engine(const ModelState& state)
        : state_(state), packed_(state.params(), state.units()) {}

    // windows: batch x w, row-major. Buffers of `tr` are reused when large enough.
    void forward(const double* windows, std::size_t batch, BatchTrace& tr) const {
        const std::size_t u = state_.units();
        const std::size_t w = state_.window();
        const std::size_t width = packed_.gates * u;
        tr.batch = batch;
        tr.steps = w;
        tr.gates.assign(w * batch * width, 0.0);
        tr.hidden.assign((w + 1) * batch * u, 0.0);
        tr.aux.assign(w * batch * u, 0.0);
        if (state_.kind() == CellKind::lstm) {
            tr.cell.assign((w + 1) * batch * u, 0.0);
        }
        for (std::size_t t = 0; t < w; ++t) {
            double* g = tr.gates.data() + t * batch * width;
            for (std::size_t b = 0; b < batch; ++b) {
                const double x = windows[b * w + t];
                double* gb = g + b * width;
                for (std::size_t col = 0; col < width; ++col) {
                    gb[col] = packed_.bias[col] + packed_.input_weight[col] * x;
                }
            }
            if (state_.kind() == CellKind::lstm) {
                lstm_step(tr, t);
            } else {
                gru_step(tr, t);
            }
        }
        head_forward(tr);
    }

    // Fills `grads` with d(mean loss)/d(params); returns the mean loss.
    double backward(const BatchTrace& tr, const double* windows, const double* targets,
                    Parameters& grads) const {
        const std::size_t batch = tr.batch;
        const std::size_t u = state_.units();
        const std::size_t f = state_.horizon();
        const DenseParams& head = state_.head();

        double loss = 0.0;
        std::vector<double> dy(batch * f);
        const double scale = 2.0 / static_cast<double>(f * batch);
        for (std::size_t i = 0; i < batch * f; ++i) {
            const double e = tr.output[i] - targets[i];
            loss += e * e;
            dy[i] = scale * e;
        }
        loss /= static_cast<double>(f * batch);
        if (!std::isfinite(loss)) {
            throw NumericError("non-finite loss");
        }

        const double* h_last = tr.hidden.data() + tr.steps * batch * u;
        auto dw = grads.head.weight.data();
        auto db = grads.head.bias.data();
        const auto hw = head.weight.data();
        std::vector<double> dh(batch * u, 0.0);
        for (std::size_t b = 0; b < batch; ++b) {
            for (std::size_t m = 0; m < f; ++m) {
                const double d = dy[b * f + m];
                db[m] += d;
                for (std::size_t j = 0; j < u; ++j) {
                    dw[m * u + j] += d * h_last[b * u + j];
                    dh[b * u + j] += d * hw[m * u + j];
                }
            }
        }

        thread_local std::vector<double> da;
        da.assign(tr.steps * batch * packed_.gates * u, 0.0);
        if (state_.kind() == CellKind::lstm) {
            lstm_bptt(tr, dh, da);
        } else {
            gru_bptt(tr, dh, da);
        }
        accumulate_cell_grads(tr, windows, da, grads);
        return loss;
    }

private:
    void lstm_step(BatchTrace& tr, std::size_t t) const {
        const std::size_t batch = tr.batch;
        const std::size_t u = state_.units();
        const std::size_t width = 4 * u;
        double* g = tr.gates.data() + t * batch * width;
        const double* h_prev = tr.hidden.data() + t * batch * u;
        const double* c_prev = tr.cell.data() + t * batch * u;
        double* h_next = tr.hidden.data() + (t + 1) * batch * u;
        double* c_next = tr.cell.data() + (t + 1) * batch * u;
        double* tc = tr.aux.data() + t * batch * u;
        if (t > 0) {
            kernels::gemm_acc(batch, u, width, h_prev, u, packed_.recurrent_t.data(), width, g,
                              width);
        }
        for (std::size_t b = 0; b < batch; ++b) {
            double* gb = g + b * width;
            kernels::sigmoid_inplace(gb, 3 * u);
            kernels::tanh_inplace(gb + 3 * u, u);
            const double* cp = c_prev + b * u;
            double* cn = c_next + b * u;
            double* tcb = tc + b * u;
            for (std::size_t j = 0; j < u; ++j) {
                cn[j] = gb[u + j] * cp[j] + gb[j] * gb[3 * u + j];
                tcb[j] = cn[j];
            }
            kernels::tanh_inplace(tcb, u);
            double* hn = h_next + b * u;
            for (std::size_t j = 0; j < u; ++j) {
                hn[j] = gb[2 * u + j] * tcb[j];
            }
        }
    }

    void gru_step(BatchTrace& tr, std::size_t t) const {
        const std::size_t batch = tr.batch;
        const std::size_t u = state_.units();
        const std::size_t width = 3 * u;
        double* g = tr.gates.data() + t * batch * width;
        const double* h_prev = tr.hidden.data() + t * batch * u;
        double* h_next = tr.hidden.data() + (t + 1) * batch * u;
        double* rh = tr.aux.data() + t * batch * u;
        const double* rec_t = packed_.recurrent_t.data();
        if (t > 0) {
            // Update and reset gates read h_{t-1}; columns [0, 2u) of the transposed pack.
            kernels::gemm_acc(batch, u, 2 * u, h_prev, u, rec_t, width, g, width);
        }
        for (std::size_t b = 0; b < batch; ++b) {
            double* gb = g + b * width;
            kernels::sigmoid_inplace(gb, 2 * u);
            for (std::size_t j = 0; j < u; ++j) {
                rh[b * u + j] = gb[u + j] * h_prev[b * u + j];
            }
        }
        if (t > 0) {
            kernels::gemm_acc(batch, u, u, rh, u, rec_t + 2 * u, width, g + 2 * u, width);
        }
        for (std::size_t b = 0; b < batch; ++b) {
            double* gb = g + b * width;
            kernels::tanh_inplace(gb + 2 * u, u);
            for (std::size_t j = 0; j < u; ++j) {
                const double z = gb[j];
                const std::size_t k = b * u + j;
                h_next[k] = (1.0 - z) * gb[2 * u + j] + z * h_prev[k];
            }
        }
    }

    void head_forward(BatchTrace& tr) const {
        const std::size_t u = state_.units();
        const std::size_t f = state_.horizon();
        const auto hw = state_.head().weight.data();
        const auto hb = state_.head().bias.data();
        const double* h = tr.hidden.data() + tr.steps * tr.batch * u;
        tr.output.assign(tr.batch * f, 0.0);
        for (std::size_t b = 0; b < tr.batch; ++b) {
            for (std::size_t m = 0; m < f; ++m) {
                double s = hb[m];
                for (std::size_t j = 0; j < u; ++j) {
                    s += hw[m * u + j] * h[b * u + j];
                }
                tr.output[b * f + m] = s;
            }
        }
    }

    // dh: gradient w.r.t. h_w on entry. Writes pre-activation gradients into da.
    void lstm_bptt(const BatchTrace& tr, std::vector<double>& dh, std::vector<double>& da) const {
        const std::size_t batch = tr.batch;
        const std::size_t u = state_.units();
        const std::size_t width = 4 * u;
        std::vector<double> dc(batch * u, 0.0);
        for (std::size_t t = tr.steps; t-- > 0;) {
            const double* g = tr.gates.data() + t * batch * width;
            const double* c_prev = tr.cell.data() + t * batch * u;
            const double* tc = tr.aux.data() + t * batch * u;
            double* da_t = da.data() + t * batch * width;
            for (std::size_t b = 0; b < batch; ++b) {
                const double* gb = g + b * width;
                double* db = da_t + b * width;
                for (std::size_t j = 0; j < u; ++j) {
                    const std::size_t k = b * u + j;
                    const double i_g = gb[j];
                    const double f_g = gb[u + j];
                    const double o_g = gb[2 * u + j];
                    const double c_g = gb[3 * u + j];
                    const double d_h = dh[k];
                    const double d_c = dc[k] + d_h * o_g * dtanh(tc[k]);
                    db[j] = d_c * c_g * dsigmoid(i_g);
                    db[u + j] = d_c * c_prev[k] * dsigmoid(f_g);
                    db[2 * u + j] = d_h * tc[k] * dsigmoid(o_g);
                    db[3 * u + j] = d_c * i_g * dtanh(c_g);
                    dc[k] = d_c * f_g;
                }
            }
            if (t > 0) {
                std::fill(dh.begin(), dh.end(), 0.0);
                kernels::gemm_acc(batch, width, u, da_t, width, packed_.recurrent.data(), u,
                                  dh.data(), u);
            }
        }
    }

    void gru_bptt(const BatchTrace& tr, std::vector<double>& dh, std::vector<double>& da) const {
        const std::size_t batch = tr.batch;
        const std::size_t u = state_.units();
        const std::size_t width = 3 * u;
        std::vector<double> dh_prev(batch * u);
        std::vector<double> drh(batch * u);
        for (std::size_t t = tr.steps; t-- > 0;) {
            const double* g = tr.gates.data() + t * batch * width;
            const double* h_prev = tr.hidden.data() + t * batch * u;
            double* da_t = da.data() + t * batch * width;
            for (std::size_t b = 0; b < batch; ++b) {
                const double* gb = g + b * width;
                double* db = da_t + b * width;
                for (std::size_t j = 0; j < u; ++j) {
                    const std::size_t k = b * u + j;
                    const double z = gb[j];
                    const double n = gb[2 * u + j];
                    const double d_h = dh[k];
                    db[j] = d_h * (h_prev[k] - n) * dsigmoid(z);
                    db[2 * u + j] = d_h * (1.0 - z) * dtanh(n);
                    dh_prev[k] = d_h * z;
                }
            }
            if (t == 0) {
                // h_0 = 0: the reset gate and earlier states receive no gradient.
                break;
            }
            std::fill(drh.begin(), drh.end(), 0.0);
            kernels::gemm_acc(batch, u, u, da_t + 2 * u, width,
                              packed_.recurrent.data() + 2 * u * u, u, drh.data(), u);
            for (std::size_t b = 0; b < batch; ++b) {
                const double* gb = g + b * width;
                double* db = da_t + b * width;
                for (std::size_t j = 0; j < u; ++j) {
                    const std::size_t k = b * u + j;
                    const double r = gb[u + j];
                    db[u + j] = drh[k] * h_prev[k] * dsigmoid(r);
                    dh_prev[k] += drh[k] * r;
                }
            }
            kernels::gemm_acc(batch, 2 * u, u, da_t, width, packed_.recurrent.data(), u,
                              dh_prev.data(), u);
            dh.swap(dh_prev);
        }
    }

    void accumulate_cell_grads(const BatchTrace& tr, const double* windows,
                               const std::vector<double>& da, Parameters& grads) const {
        const std::size_t batch = tr.batch;
        const std::size_t u = state_.units();
        const std::size_t w = tr.steps;
        const std::size_t gates = packed_.gates;
        const std::size_t width = gates * u;
        std::vector<double> d_in(width, 0.0);
        std::vector<double> d_bias(width, 0.0);
        for (std::size_t t = 0; t < w; ++t) {
            for (std::size_t b = 0; b < batch; ++b) {
                const double x = windows[b * w + t];
                const double* db = da.data() + (t * batch + b) * width;
                for (std::size_t col = 0; col < width; ++col) {
                    d_in[col] += db[col] * x;
                    d_bias[col] += db[col];
                }
            }
        }
        // Recurrent gradients: sum over (t, b) of da_t^T h_{t-1}, one GEMM over
        // the stacked time-major rows. The t = 0 rows meet h_0 = 0.
        std::vector<double> d_rec(width * u, 0.0);
        const std::size_t rows = w * batch;
        if (state_.kind() == CellKind::lstm) {
            kernels::gemm_tn_acc(width, rows, u, da.data(), width, tr.hidden.data(), u,
                                 d_rec.data(), u);
        } else {
            kernels::gemm_tn_acc(2 * u, rows, u, da.data(), width, tr.hidden.data(), u,
                                 d_rec.data(), u);
            kernels::gemm_tn_acc(u, rows, u, da.data() + 2 * u, width, tr.aux.data(), u,
                                 d_rec.data() + 2 * u * u, u);
        }
        const auto gs = gates_of(grads);
        for (std::size_t g = 0; g < gates; ++g) {
            auto in = gs[g]->input_weight.data();
            auto bias = gs[g]->bias.data();
            auto rec = gs[g]->recurrent_weight.data();
            for (std::size_t j = 0; j < u; ++j) {
                in[j] += d_in[g * u + j];
                bias[j] += d_bias[g * u + j];
            }
            const double* block = d_rec.data() + g * u * u;
            for (std::size_t i = 0; i < u * u; ++i) {
                rec[i] += block[i];
            }
        }
    }

    const ModelState& state_;
    PackedCell packed_;
};

} // namespace

LstmTrace lstm_forward(const ModelState& state, std::span<const double> window) {
    if (state.kind() != CellKind::lstm) {
        throw ArgumentError("lstm_forward called on a GRU model");
    }
    require_window(state, window.size());
    require_finite(window, "input window");
    BatchTrace tr;
    Engine(state).forward(window.data(), 1, tr);
    const std::size_t u = state.units();
    LstmTrace out;
    for (std::size_t t = 1; t <= tr.steps; ++t) {
        const auto h = std::span(tr.hidden).subspan(t * u, u);
        const auto c = std::span(tr.cell).subspan(t * u, u);
        out.hidden.push_back(Matrix::column(h));
        out.cell.push_back(Matrix::column(c));
    }
    out.final_hidden = out.hidden.back();
    return out;
}

GruTrace gru_forward(const ModelState& state, std::span<const double> window) {
    if (state.kind() != CellKind::gru) {
        throw ArgumentError("gru_forward called on an LSTM model");
    }
    require_window(state, window.size());
    require_finite(window, "input window");
    BatchTrace tr;
    Engine(state).forward(window.data(), 1, tr);
    const std::size_t u = state.units();
    GruTrace out;
    for (std::size_t t = 1; t <= tr.steps; ++t) {
        out.hidden.push_back(Matrix::column(std::span(tr.hidden).subspan(t * u, u)));
    }
    out.final_hidden = out.hidden.back();
    return out;
}

Matrix dense_forward(const DenseParams& head, const Matrix& hidden) {
    if (hidden.cols() != 1 || hidden.rows() != head.weight.cols()) {
        throw ShapeError("dense_forward: hidden state " + hidden.shape_string() +
                         " does not match head weight " + head.weight.shape_string());
    }
    return elementwise(ElementOp::add, matmul(head.weight, hidden), head.bias);
}

Matrix predict(const ModelState& state, const Matrix& windows) {
    require_window(state, windows.cols());
    // Chunked to bound the activation buffers.
    constexpr std::size_t chunk = 64;
    const std::size_t f = state.horizon();
    Matrix out(windows.rows(), f);
    const Engine engine(state);
    thread_local BatchTrace tr;
    for (std::size_t start = 0; start < windows.rows(); start += chunk) {
        const std::size_t n = std::min(chunk, windows.rows() - start);
        engine.forward(windows.data().data() + start * windows.cols(), n, tr);
        std::copy(tr.output.begin(), tr.output.end(), out.data().begin() + start * f);
    }
    require_finite(out.data(), "forecast");
    return out;
}

double backward_batch(ModelState& state, const Matrix& windows, const Matrix& targets,
                      bool accumulate) {
    require_window(state, windows.cols());
    if (targets.cols() != state.horizon() || targets.rows() != windows.rows()) {
        throw ShapeError("targets " + targets.shape_string() + " do not match " +
                         std::to_string(windows.rows()) + " windows of horizon " +
                         std::to_string(state.horizon()));
    }
    if (!accumulate) {
        state.zero_grads();
    }
    const Engine engine(state);
    thread_local BatchTrace tr;
    engine.forward(windows.data().data(), windows.rows(), tr);
    return engine.backward(tr, windows.data().data(), targets.data().data(), state.grads());
}

double backward(ModelState& state, std::span<const double> window, std::span<const double> target,
                bool accumulate) {
    require_window(state, window.size());
    if (target.size() != state.horizon()) {
        throw ShapeError("target length " + std::to_string(target.size()) +
                         " does not match horizon " + std::to_string(state.horizon()));
    }
    require_finite(window, "input window");
    require_finite(target, "target");
    return backward_batch(state, Matrix(1, window.size(), {window.begin(), window.end()}),
                          Matrix(1, target.size(), {target.begin(), target.end()}), accumulate);
}

} // namespace tsf
