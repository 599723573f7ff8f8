#pragma once

#include <cmath>
#include <vector>

#include "tiltlab/nn/tensor.hpp"

namespace tiltlab::nn {

/// Adaptive moment estimation with bias correction. Parameter order must be
/// stable across steps.
template <typename T>
class Adam {
public:
    explicit Adam(double lr = 1e-3, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {}

    void step(const std::vector<Tensor<T>*>& params) {
        if (m_.empty()) {
            for (auto* p : params) {
                m_.emplace_back(p->values.size(), T(0));
                v_.emplace_back(p->values.size(), T(0));
            }
        }
        ++t_;
        double bc1 = 1.0 - std::pow(beta1_, t_);
        double bc2 = 1.0 - std::pow(beta2_, t_);
        for (size_t pi = 0; pi < params.size(); ++pi) {
            auto& p = *params[pi];
            p.ensure_grad();
            for (size_t i = 0; i < p.values.size(); ++i) {
                double g = p.grad[i];
                double m = beta1_ * m_[pi][i] + (1.0 - beta1_) * g;
                double v = beta2_ * v_[pi][i] + (1.0 - beta2_) * g * g;
                m_[pi][i] = static_cast<T>(m);
                v_[pi][i] = static_cast<T>(v);
                p.values[i] -= static_cast<T>(lr_ * (m / bc1) / (std::sqrt(v / bc2) + eps_));
            }
        }
    }

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    std::vector<std::vector<T>> m_, v_;
};

}  // namespace tiltlab::nn
