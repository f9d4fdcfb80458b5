#pragma once

#include "egrl/common.hpp"

namespace egrl::rl {

class Adam {
public:
    Adam() = default;
    Adam(Eigen::Index n, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8)
        : lr_(lr), b1_(beta1), b2_(beta2), eps_(eps), m_(Vector::Zero(n)), v_(Vector::Zero(n)) {}

    void step(Vector& params, const Vector& grad) {
        ++t_;
        m_ = b1_ * m_ + (1.0 - b1_) * grad;
        v_ = b2_ * v_ + (1.0 - b2_) * grad.cwiseProduct(grad);
        const double c1 = 1.0 - std::pow(b1_, t_);
        const double c2 = 1.0 - std::pow(b2_, t_);
        params -= (lr_ / c1) *
                  m_.cwiseQuotient(((v_ / c2).cwiseSqrt().array() + eps_).matrix());
    }

    double lr() const { return lr_; }

private:
    double lr_ = 1e-3, b1_ = 0.9, b2_ = 0.999, eps_ = 1e-8;
    int t_ = 0;
    Vector m_, v_;
};

}  // namespace egrl::rl
