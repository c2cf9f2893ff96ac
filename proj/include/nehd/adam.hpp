#pragma once

#include <cstdint>
#include <vector>

#include "nehd/tensor.hpp"

namespace nehd {

struct AdamConfig {
    double learning_rate = 0.001;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// Bias-corrected Adam. Moment buffers are keyed by parameter position, so
/// every step must pass the same parameter list in the same order.
class Adam {
public:
    explicit Adam(AdamConfig cfg) : cfg_(cfg) {}

    void step(const std::vector<NamedTensor>& params, const std::vector<const Tensor*>& grads);

    std::uint64_t step_count() const { return step_; }
    const AdamConfig& config() const { return cfg_; }

private:
    AdamConfig cfg_;
    std::uint64_t step_ = 0;
    std::vector<Tensor> m_;
    std::vector<Tensor> v_;
};

}  // namespace nehd
