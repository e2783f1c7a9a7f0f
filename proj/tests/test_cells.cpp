#include <doctest.h>

#include <cmath>
#include <vector>

#include "support/oracles.hpp"
#include "tsf/cells/cells.hpp"
#include "tsf/numkit/errors.hpp"

using namespace tsf;

namespace {

ModelState random_model(CellKind kind, std::size_t units, std::size_t w, std::size_t f,
                        std::uint64_t seed, double scale = 0.5) {
    ModelState m(kind, units, w, f);
    Rng rng(seed);
    for (Matrix* t : m.parameter_tensors()) {
        for (double& v : t->data()) {
            v = rng.uniform(-scale, scale);
        }
    }
    return m;
}

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo = 0.0, double hi = 1.0) {
    std::vector<double> v(n);
    for (double& x : v) {
        x = rng.uniform(lo, hi);
    }
    return v;
}

} // namespace

TEST_CASE("zero parameters map every window to the zero hidden state") {
    Rng rng(1);
    for (CellKind kind : {CellKind::lstm, CellKind::gru}) {
        const ModelState m(kind, 6, 9, 2);
        for (int trial = 0; trial < 5; ++trial) {
            const auto window = random_vector(rng, 9, -5, 5);
            const Matrix h = kind == CellKind::lstm ? lstm_forward(m, window).final_hidden
                                                    : gru_forward(m, window).final_hidden;
            for (double v : h.data()) {
                CHECK(v == 0.0);
            }
        }
    }
}

TEST_CASE("saturated LSTM gates copy the squashed input into the cell") {
    ModelState m(CellKind::lstm, 1, 6, 1);
    auto& p = m.lstm();
    p.input.bias(0, 0) = 50.0;
    p.output.bias(0, 0) = 50.0;
    p.forget.bias(0, 0) = -50.0;
    p.candidate.input_weight(0, 0) = 1.0;
    const std::vector<double> window{0.3, -1.2, 2.0, 0.0, -0.4, 5.0};
    const LstmTrace tr = lstm_forward(m, window);
    REQUIRE(tr.hidden.size() == window.size());
    for (std::size_t t = 0; t < window.size(); ++t) {
        CHECK(tr.hidden[t](0, 0) == doctest::Approx(std::tanh(std::tanh(window[t]))).epsilon(1e-12));
        CHECK(tr.cell[t](0, 0) == doctest::Approx(std::tanh(window[t])).epsilon(1e-12));
    }
}

TEST_CASE("a closed GRU update gate holds the initial zero state") {
    ModelState m(CellKind::gru, 1, 8, 1);
    auto& p = m.gru();
    p.update.bias(0, 0) = 50.0;
    p.candidate.input_weight(0, 0) = 3.0;
    p.candidate.recurrent_weight(0, 0) = 1.0;
    const std::vector<double> window{1, -2, 3, -4, 5, -6, 7, 8};
    for (const Matrix& h : gru_forward(m, window).hidden) {
        CHECK(std::abs(h(0, 0)) < 1e-12);
    }
}

TEST_CASE("forward passes reject a window of the wrong length") {
    const ModelState lstm(CellKind::lstm, 3, 5, 1);
    const ModelState gru(CellKind::gru, 3, 5, 1);
    const std::vector<double> short_window(4, 0.1);
    CHECK_THROWS_AS(lstm_forward(lstm, short_window), ShapeError);
    CHECK_THROWS_AS(gru_forward(gru, short_window), ShapeError);
    CHECK_THROWS_AS(predict(lstm, Matrix(2, 4)), ShapeError);
    CHECK_THROWS_AS(lstm_forward(gru, std::vector<double>(5, 0.1)), ArgumentError);
}

TEST_CASE("forward passes match the reference recurrences") {
    Rng rng(17);
    for (CellKind kind : {CellKind::lstm, CellKind::gru}) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const ModelState m = random_model(kind, 7, 12, 3, seed, 1.0);
            const auto window = random_vector(rng, 12, -2, 2);
            const auto want = oracle::hidden_states(m, window);
            const std::vector<Matrix> got = kind == CellKind::lstm ? lstm_forward(m, window).hidden
                                                                   : gru_forward(m, window).hidden;
            REQUIRE(got.size() == want.size());
            for (std::size_t t = 0; t < got.size(); ++t) {
                for (std::size_t j = 0; j < 7; ++j) {
                    CHECK(std::abs(got[t](j, 0) - want[t][j]) <= 1e-13);
                }
            }
            const Matrix y = predict(m, Matrix(1, 12, window));
            const auto y_ref = oracle::forecast(m, window);
            for (std::size_t k = 0; k < 3; ++k) {
                CHECK(std::abs(y(0, k) - y_ref[k]) <= 1e-13);
            }
        }
    }
}

TEST_CASE("dense head examples") {
    DenseParams head(2, 2);
    head.bias = Matrix::from_rows({{0.3}, {0.7}});
    const Matrix h = Matrix::from_rows({{0.9}, {-0.4}});
    CHECK(dense_forward(head, h) == Matrix::from_rows({{0.3}, {0.7}}));

    DenseParams identity(3, 3);
    identity.weight = Matrix::identity(3);
    const Matrix h3 = Matrix::from_rows({{0.1}, {-0.2}, {0.3}});
    CHECK(dense_forward(identity, h3) == h3);

    Rng rng(8);
    DenseParams random(4, 5);
    random.weight = rng_uniform(rng, -1, 1, 4, 5);
    random.bias = rng_uniform(rng, -1, 1, 4, 1);
    const Matrix hr = rng_uniform(rng, -1, 1, 5, 1);
    const Matrix y = dense_forward(random, hr);
    for (std::size_t k = 0; k < 4; ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < 5; ++j) {
            s += random.weight(k, j) * hr(j, 0);
        }
        CHECK(y(k, 0) == s + random.bias(k, 0));
    }
    CHECK_THROWS_AS(dense_forward(random, Matrix(4, 1)), ShapeError);
}

TEST_CASE("loss is zero with zero head-bias gradient when the forecast hits the target") {
    ModelState m = random_model(CellKind::lstm, 3, 4, 2, 5);
    m.head().weight.fill(0.0);
    m.head().bias = Matrix::from_rows({{0.25}, {0.75}});
    const std::vector<double> window{0.1, 0.2, 0.3, 0.4};
    const std::vector<double> target{0.25, 0.75};
    CHECK(backward(m, window, target) == 0.0);
    for (double g : m.grads().head.bias.data()) {
        CHECK(g == 0.0);
    }
}

TEST_CASE("single-step loss is the squared error") {
    ModelState m(CellKind::gru, 2, 3, 1);
    m.head().bias(0, 0) = 0.8;
    const std::vector<double> window{0.5, 0.5, 0.5};
    const std::vector<double> target{0.5};
    CHECK(backward(m, window, target) == doctest::Approx(0.09).epsilon(1e-14));
}

TEST_CASE("analytic gradients match central finite differences") {
    for (CellKind kind : {CellKind::lstm, CellKind::gru}) {
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            ModelState m(kind, 4, 5, 2);
            Rng rng(seed);
            m.initialize(rng);
            for (Matrix* t : m.parameter_tensors()) {
                for (double& v : t->data()) {
                    v += rng.uniform(-0.3, 0.3);
                }
            }
            const auto window = random_vector(rng, 5);
            const auto target = random_vector(rng, 2);
            CAPTURE(seed);
            CHECK(oracle::worst_gradient_error(m, window, target) <= 1e-4);
        }
    }
}

TEST_CASE("batched gradients are the mean of per-sample gradients") {
    for (CellKind kind : {CellKind::lstm, CellKind::gru}) {
        ModelState m = random_model(kind, 5, 6, 3, 21);
        Rng rng(4);
        const Matrix windows = rng_uniform(rng, 0, 1, 7, 6);
        const Matrix targets = rng_uniform(rng, 0, 1, 7, 3);

        double mean_loss = 0.0;
        m.zero_grads();
        for (std::size_t i = 0; i < 7; ++i) {
            mean_loss += backward(m, windows.row(i), targets.row(i), true);
        }
        mean_loss /= 7.0;
        std::vector<Matrix> summed;
        for (const Matrix* g : m.gradient_tensors()) {
            summed.push_back(*g);
        }
        const double batch_loss = backward_batch(m, windows, targets);
        CHECK(batch_loss == doctest::Approx(mean_loss).epsilon(1e-12));
        const auto grads = m.gradient_tensors();
        for (std::size_t t = 0; t < grads.size(); ++t) {
            for (std::size_t i = 0; i < grads[t]->size(); ++i) {
                CHECK(std::abs(grads[t]->data()[i] - summed[t].data()[i] / 7.0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("accumulate adds onto existing gradients") {
    ModelState m = random_model(CellKind::lstm, 3, 4, 1, 2);
    const std::vector<double> window{0.2, 0.4, 0.1, 0.9};
    const std::vector<double> target{0.3};
    backward(m, window, target);
    std::vector<Matrix> once;
    for (const Matrix* g : m.gradient_tensors()) {
        once.push_back(*g);
    }
    backward(m, window, target, true);
    const auto twice = m.gradient_tensors();
    for (std::size_t t = 0; t < once.size(); ++t) {
        for (std::size_t i = 0; i < once[t].size(); ++i) {
            CHECK(twice[t]->data()[i] == doctest::Approx(2.0 * once[t].data()[i]).epsilon(1e-14));
        }
    }
    backward(m, window, target);
    CHECK(*m.gradient_tensors()[0] == once[0]);
}

TEST_CASE("hidden states stay inside the tanh range") {
    Rng rng(33);
    for (CellKind kind : {CellKind::lstm, CellKind::gru}) {
        const ModelState m = random_model(kind, 8, 30, 1, 9, 4.0);
        for (int trial = 0; trial < 10; ++trial) {
            const auto window = random_vector(rng, 30, -10, 10);
            const std::vector<Matrix> hs = kind == CellKind::lstm ? lstm_forward(m, window).hidden
                                                                  : gru_forward(m, window).hidden;
            for (const Matrix& h : hs) {
                for (double v : h.data()) {
                    if (kind == CellKind::lstm) {
                        CHECK(std::abs(v) < 1.0);
                    } else {
                        CHECK(std::abs(v) <= 1.0);
                    }
                }
            }
        }
    }
}

TEST_CASE("forward passes are deterministic") {
    const ModelState m = random_model(CellKind::gru, 16, 20, 4, 12);
    Rng rng(6);
    const Matrix windows = rng_uniform(rng, 0, 1, 70, 20);
    CHECK(predict(m, windows) == predict(m, windows));
    const Matrix single = predict(m, Matrix(1, 20, std::vector<double>(windows.row(69).begin(), windows.row(69).end())));
    for (std::size_t k = 0; k < 4; ++k) {
        CHECK(std::abs(single(0, k) - predict(m, windows)(69, k)) <= 1e-14);
    }
}

TEST_CASE("model state layout and initialization") {
    ModelState m(CellKind::lstm, 4, 5, 3);
    const auto params = m.parameter_tensors();
    const auto grads = m.gradient_tensors();
    const auto names = m.tensor_names();
    REQUIRE(params.size() == 14);
    REQUIRE(grads.size() == params.size());
    REQUIRE(names.size() == params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        CHECK(params[i]->same_shape(*grads[i]));
    }
    CHECK(names.front() == "lstm.input.W");
    CHECK(names[4] == "lstm.forget.U");
    CHECK(names.back() == "head.b");
    CHECK(m.head().weight.rows() == 3);
    CHECK(m.head().weight.cols() == 4);
    CHECK_THROWS_AS(m.gru(), ArgumentError);

    Rng rng(10);
    m.initialize(rng);
    const double limit = 1.0 / std::sqrt(4.0);
    for (std::size_t i = 0; i < params.size(); ++i) {
        const bool is_bias = names[i].back() == 'b';
        for (double v : params[i]->data()) {
            if (is_bias) {
                CHECK(v == 0.0);
            } else {
                CHECK(std::abs(v) <= limit);
            }
        }
    }
    ModelState g(CellKind::gru, 2, 3, 1);
    CHECK(g.parameter_tensors().size() == 11);
    CHECK(parse_cell_kind("gru") == CellKind::gru);
    CHECK_THROWS_AS(parse_cell_kind("rnn"), ArgumentError);
}
