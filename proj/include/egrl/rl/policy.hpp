#pragma once

#include "egrl/rl/mlp.hpp"

namespace egrl::rl {

// Squashed-Gaussian actor. The net outputs [mean; log_std_raw] stacked over
// rows; log_std is soft-clamped into [kLogStdMin, kLogStdMax] through a tanh
// so the whole head stays smooth for finite-difference checks.
class SquashedGaussianPolicy {
public:
    static constexpr double kLogStdMin = -5.0;
    static constexpr double kLogStdMax = 2.0;

    SquashedGaussianPolicy() = default;
    SquashedGaussianPolicy(int obs_dim, int act_dim, int hidden, Rng& rng);

    struct SampleCache {
        Mlp::Cache net;
        Matrix ls_raw, log_std, stddev, pre, tanh_pre, noise;
    };

    /// Reparameterized sample with externally drawn standard-normal noise
    /// (act_dim x B). Fills per-sample log-probabilities (tanh-corrected).
    Matrix sample(const Matrix& obs, const Matrix& noise, Vector& logp, SampleCache& cache) const;

    /// Backpropagates d(loss)/d(action) and d(loss)/d(logp) into parameter
    /// gradients.
    void backward(const SampleCache& cache, const Matrix& d_act, const Vector& d_logp,
                  MlpGrads& g) const;

    /// Deterministic evaluation action, tanh(mean).
    Vector mean_action(const Vector& obs) const;

    /// Log-density of a given pre-squash action matrix under the current
    /// policy (used by tests integrating the density).
    double log_prob_of_pre(const Vector& obs, const Vector& pre) const;

    int act_dim() const { return act_dim_; }
    Mlp net;

private:
    int act_dim_ = 0;
};

}  // namespace egrl::rl
