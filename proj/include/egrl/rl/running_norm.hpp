#pragma once

#include "egrl/common.hpp"

namespace egrl::rl {

// Welford running mean/variance. Statistics move only when update() is
// called, so evaluation can keep applying frozen statistics.
class RunningNorm {
public:
    explicit RunningNorm(Eigen::Index dim = 0, double epsilon = 1e-6)
        : eps_(epsilon), mean_(Vector::Zero(dim)), m2_(Vector::Zero(dim)) {}

    void update(const Vector& x) {
        if (x.size() != mean_.size()) throw std::invalid_argument("running norm: dim mismatch");
        ++count_;
        const Vector delta = x - mean_;
        mean_ += delta / static_cast<double>(count_);
        m2_ += delta.cwiseProduct(x - mean_);
    }

    /// (x - mean) / max(std, epsilon); identity before any update.
    Vector normalize(const Vector& x) const {
        if (count_ == 0) return x;
        return (x - mean_).cwiseQuotient(std_floor());
    }

    Matrix normalize_columns(const Matrix& x) const {
        if (count_ == 0) return x;
        return (x.colwise() - mean_).array().colwise() / std_floor().array();
    }

    long long count() const { return count_; }
    const Vector& mean() const { return mean_; }
    Vector std() const {
        if (count_ == 0) return Vector::Zero(mean_.size());
        return (m2_ / static_cast<double>(count_)).cwiseMax(0.0).cwiseSqrt();
    }
    double epsilon() const { return eps_; }
    const Vector& m2() const { return m2_; }
    void restore(long long count, const Vector& mean, const Vector& m2) {
        count_ = count;
        mean_ = mean;
        m2_ = m2;
    }

private:
    Vector std_floor() const { return std().cwiseMax(eps_); }

    double eps_;
    long long count_ = 0;
    Vector mean_, m2_;
};

}  // namespace egrl::rl
