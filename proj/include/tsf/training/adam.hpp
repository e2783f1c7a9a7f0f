#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "tsf/numkit/matrix.hpp"

namespace tsf {

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First/second moment buffers mirroring a fixed list of parameter shapes.
class AdamState {
public:
    /// Throws ArgumentError unless beta1, beta2 in [0, 1) and learning_rate, epsilon > 0.
    AdamState(AdamConfig config, std::span<const Matrix* const> params);

    const AdamConfig& config() const noexcept { return config_; }
    std::uint64_t step() const noexcept { return step_; }
    const std::vector<Matrix>& first_moment() const noexcept { return m_; }
    const std::vector<Matrix>& second_moment() const noexcept { return v_; }

    /// One bias-corrected Adam update of every parameter in place.
    void update(std::span<Matrix* const> params, std::span<const Matrix* const> grads);

private:
    AdamConfig config_;
    std::uint64_t step_ = 0;
    std::vector<Matrix> m_;
    std::vector<Matrix> v_;
};

inline void adam_step(AdamState& adam, std::span<Matrix* const> params,
                      std::span<const Matrix* const> grads) {
    adam.update(params, grads);
}

} // namespace tsf
