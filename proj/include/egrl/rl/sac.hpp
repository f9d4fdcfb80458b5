#pragma once

#include "egrl/integrate/gate.hpp"
#include "egrl/rl/adam.hpp"
#include "egrl/rl/policy.hpp"

#include <string>
#include <vector>

namespace egrl::rl {

struct SacHyper {
    double gamma = 0.99;
    double lr = 3e-4;
    double polyak = 0.005;  // target <- polyak*online + (1-polyak)*target
    int batch_size = 128;
    int hidden = 64;
    int critics = 2;
    double alpha_init = 0.2;
    double target_entropy = std::numeric_limits<double>::quiet_NaN();  // default -act_dim
};

struct Batch {
    Matrix obs;       // obs_dim x B, normalized
    Matrix act;       // act_dim x B
    Matrix next_obs;
    Vector rew;
    Vector done;      // 1.0 only for true terminal states, never for timeouts
    // Expert actions at the batch states, required by the residual composer
    // and the ibrl/lcb bootstrap variants; empty otherwise.
    Matrix expert_act;
    Matrix next_expert_act;

    Eigen::Index size() const { return obs.cols(); }
};

struct UpdateNoise {
    Matrix next_noise;  // act_dim x B, standard normal
    Matrix new_noise;
};

enum class BootstrapMode { standard, ibrl_max, lcb_gated };

struct UpdateOptions {
    BootstrapMode bootstrap = BootstrapMode::standard;
    gate::GateConfig boot_gate{};  // used by lcb_gated
    gate::ScoringRule boot_scoring = gate::ScoringRule::lcb_range;
    bool residual = false;         // executed action = clip(expert + bound*actor)
    double residual_bound = 1.0;
};

struct SacLosses {
    std::vector<double> critic;
    double actor = 0.0;
    double alpha_loss = 0.0;
    double alpha = 0.0;
};

class SacAgent {
public:
    SacAgent(int obs_dim, int act_dim, const SacHyper& hyper, std::uint64_t init_seed);

    Vector sample_action(const Vector& obs_norm, Rng& rng) const;
    Vector mean_action(const Vector& obs_norm) const { return policy.mean_action(obs_norm); }

    Vector q_values(const Vector& obs_norm, const Vector& act) const;
    Vector target_q_values(const Vector& obs_norm, const Vector& act) const;

    /// One full SAC step: critic regression, actor ascent, temperature
    /// adaptation, polyak target update. Throws on non-finite losses.
    SacLosses update(const Batch& batch, const UpdateNoise& noise, const UpdateOptions& opts = {});

    // Pure loss/gradient probes over the current parameters; update() runs
    // these same computations. Exposed so gradients can be checked against
    // finite differences.
    Vector compute_targets(const Batch& batch, const UpdateNoise& noise,
                           const UpdateOptions& opts) const;
    double critic_loss(int k, const Batch& batch, const Vector& targets) const;
    Vector critic_grad(int k, const Batch& batch, const Vector& targets) const;
    double actor_loss(const Batch& batch, const UpdateNoise& noise,
                      const UpdateOptions& opts) const;
    Vector actor_grad(const Batch& batch, const UpdateNoise& noise,
                      const UpdateOptions& opts) const;
    double alpha_loss(const Batch& batch, const UpdateNoise& noise,
                      const UpdateOptions& opts) const;
    double alpha_grad(const Batch& batch, const UpdateNoise& noise,
                      const UpdateOptions& opts) const;

    int num_critics() const { return static_cast<int>(critics.size()); }
    double alpha() const { return std::exp(log_alpha_); }
    double target_entropy() const { return target_entropy_; }
    const SacHyper& hyper() const { return h_; }

    std::string checkpoint_json() const;
    void restore_checkpoint_json(const std::string& text);

    SquashedGaussianPolicy policy;
    std::vector<Mlp> critics;
    std::vector<Mlp> targets;
    double log_alpha_ = 0.0;

private:
    Matrix composed_action(const Matrix& actor_act, const Matrix& expert_act,
                           const UpdateOptions& opts) const;
    Matrix ensemble_values(const std::vector<Mlp>& nets, const Matrix& obs,
                           const Matrix& act) const;  // n x B

    struct CriticPass {
        double loss = 0.0;
        MlpGrads grads;
    };
    CriticPass critic_pass(int k, const Batch& batch, const Vector& targets_y) const;

    struct ActorGradResult {
        double loss = 0.0;
        MlpGrads grads;
        Vector logp;
    };
    ActorGradResult actor_pass(const Batch& batch, const UpdateNoise& noise,
                               const UpdateOptions& opts) const;

    SacHyper h_;
    int obs_dim_ = 0, act_dim_ = 0;
    double target_entropy_ = 0.0;
    Adam actor_opt_;
    std::vector<Adam> critic_opt_;
    Adam alpha_opt_;
};

}  // namespace egrl::rl

namespace egrl::rl {

/// s_tilde = [s, z]; the plain-SAC path passes an empty z.
inline Vector augment(const Vector& obs, const Vector& expert_state) {
    Vector s(obs.size() + expert_state.size());
    s << obs, expert_state;
    return s;
}

}  // namespace egrl::rl
