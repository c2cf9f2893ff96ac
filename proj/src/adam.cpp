#include "nehd/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace nehd {

void Adam::step(const std::vector<NamedTensor>& params, const std::vector<const Tensor*>& grads) {
    if (params.size() != grads.size()) {
        throw std::invalid_argument("adam: " + std::to_string(grads.size()) + " grads for " +
                                    std::to_string(params.size()) + " params");
    }
    if (m_.empty()) {
        m_.reserve(params.size());
        v_.reserve(params.size());
        for (const auto& p : params) {
            m_.push_back(Tensor::zeros_like(*p.tensor));
            v_.push_back(Tensor::zeros_like(*p.tensor));
        }
    } else if (m_.size() != params.size()) {
        throw std::invalid_argument("adam: parameter list size changed between steps");
    }

    step_ += 1;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));

    for (std::size_t i = 0; i < params.size(); ++i) {
        Tensor& theta = *params[i].tensor;
        const Tensor& g = *grads[i];
        if (!theta.same_shape(g)) {
            throw std::invalid_argument("adam: grad shape " + g.shape_str() +
                                        " does not match param '" + params[i].name + "' " +
                                        theta.shape_str());
        }
        if (!m_[i].same_shape(theta)) {
            throw std::invalid_argument("adam: param '" + params[i].name +
                                        "' changed shape between steps");
        }
        Tensor& m = m_[i];
        Tensor& v = v_[i];
        for (std::size_t j = 0; j < theta.size(); ++j) {
            m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
            v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
            const double m_hat = m[j] / bc1;
            const double v_hat = v[j] / bc2;
            theta[j] -= cfg_.learning_rate * m_hat / (std::sqrt(v_hat) + cfg_.epsilon);
        }
    }
}

}  // namespace nehd
