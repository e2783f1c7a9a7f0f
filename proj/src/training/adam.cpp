#include "tsf/training/adam.hpp"

#include <cmath>
#include <string>

#include "tsf/numkit/errors.hpp"

namespace tsf {

AdamState::AdamState(AdamConfig config, std::span<const Matrix* const> params) : config_(config) {
    if (!(config.learning_rate > 0.0) || !(config.epsilon > 0.0) || !(config.beta1 >= 0.0) ||
        !(config.beta1 < 1.0) || !(config.beta2 >= 0.0) || !(config.beta2 < 1.0)) {
        throw ArgumentError("adam: need learning_rate > 0, epsilon > 0, beta1 and beta2 in [0, 1)");
    }
    m_.reserve(params.size());
    v_.reserve(params.size());
    for (const Matrix* p : params) {
        m_.emplace_back(p->rows(), p->cols());
        v_.emplace_back(p->rows(), p->cols());
    }
}

void AdamState::update(std::span<Matrix* const> params, std::span<const Matrix* const> grads) {
    if (params.size() != m_.size() || grads.size() != m_.size()) {
        throw ShapeError("adam: expected " + std::to_string(m_.size()) + " tensors, got " +
                         std::to_string(params.size()) + " params and " +
                         std::to_string(grads.size()) + " grads");
    }
    for (std::size_t i = 0; i < m_.size(); ++i) {
        if (!params[i]->same_shape(m_[i]) || !grads[i]->same_shape(m_[i])) {
            throw ShapeError("adam: tensor " + std::to_string(i) + " shape mismatch: param " +
                             params[i]->shape_string() + ", grad " + grads[i]->shape_string() +
                             ", moments " + m_[i].shape_string());
        }
        if (!grads[i]->all_finite()) {
            throw NumericError("adam: non-finite gradient in tensor " + std::to_string(i));
        }
    }
    ++step_;
    const double t = static_cast<double>(step_);
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    const double correction1 = 1.0 - std::pow(b1, t);
    const double correction2 = 1.0 - std::pow(b2, t);
    for (std::size_t i = 0; i < m_.size(); ++i) {
        auto theta = params[i]->data();
        const auto g = grads[i]->data();
        auto m = m_[i].data();
        auto v = v_[i].data();
        for (std::size_t k = 0; k < theta.size(); ++k) {
            m[k] = b1 * m[k] + (1.0 - b1) * g[k];
            v[k] = b2 * v[k] + (1.0 - b2) * g[k] * g[k];
            const double m_hat = m[k] / correction1;
            const double v_hat = v[k] / correction2;
            theta[k] -= config_.learning_rate * m_hat / (std::sqrt(v_hat) + config_.epsilon);
        }
    }
}

} // namespace tsf
