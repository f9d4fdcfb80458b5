#pragma once

#include "egrl/common.hpp"
#include "egrl/rng.hpp"

namespace egrl::gate {

struct GateConfig {
    double kappa = 1.0;  // pessimism, >= 0
    double tau = 1.0;    // gate temperature, > 0

    void validate() const {
        if (!(kappa >= 0.0)) throw std::invalid_argument("gate: kappa must be >= 0");
        if (!(tau > 0.0)) throw std::invalid_argument("gate: tau must be > 0");
    }
};

enum class ScoringRule {
    lcb_range,   // min_n Q_n - kappa * (max_n Q_n - min_n Q_n)
    lcb_musigma, // mean_n Q_n - kappa * std_n Q_n
    min_q,
    mean_q,
};

/// Ensemble-pessimistic value: min - kappa * range over the member values.
template <typename Derived>
double pessimistic_score(const Eigen::MatrixBase<Derived>& qs, double kappa) {
    const double lo = qs.minCoeff();
    const double hi = qs.maxCoeff();
    return lo - kappa * (hi - lo);
}

/// mean - kappa * std variant (population std across the ensemble).
template <typename Derived>
double mu_sigma_score(const Eigen::MatrixBase<Derived>& qs, double kappa) {
    const double mu = qs.mean();
    const double var = (qs.array() - mu).square().mean();
    return mu - kappa * std::sqrt(std::max(var, 0.0));
}

template <typename Derived>
double score(const Eigen::MatrixBase<Derived>& qs, ScoringRule rule, double kappa) {
    switch (rule) {
        case ScoringRule::lcb_range: return pessimistic_score(qs, kappa);
        case ScoringRule::lcb_musigma: return mu_sigma_score(qs, kappa);
        case ScoringRule::min_q: return qs.minCoeff();
        case ScoringRule::mean_q: return qs.mean();
    }
    throw std::logic_error("unreachable scoring rule");
}

/// p = sigma(delta / tau).
inline double gate_probability(double delta, double tau) { return logistic(delta / tau); }

struct EdgeSelection {
    Vector action;
    double p = 0.0;     // expert-pick probability
    bool expert = false;  // realized Bernoulli draw b
    double delta = 0.0;
};

/// Pessimism-gated stochastic mixing: delta = score(expert) - score(policy),
/// p = sigma(delta/tau), b ~ Bernoulli(p).
template <typename QueryFn>
EdgeSelection edge_select(const Vector& s_tilde, const Vector& policy_action,
                          const Vector& expert_action, QueryFn&& q_ensemble,
                          const GateConfig& gate, Rng& rng,
                          ScoringRule rule = ScoringRule::lcb_range) {
    gate.validate();
    const Vector q_exp = q_ensemble(s_tilde, expert_action);
    const Vector q_pol = q_ensemble(s_tilde, policy_action);
    EdgeSelection sel;
    sel.delta = score(q_exp, rule, gate.kappa) - score(q_pol, rule, gate.kappa);
    sel.p = gate_probability(sel.delta, gate.tau);
    sel.expert = rng.bernoulli(sel.p);
    sel.action = sel.expert ? expert_action : policy_action;
    return sel;
}

/// Deterministic argmax between the two arms on reduced scores; exact ties
/// break to the policy action.
inline bool ibrl_pick_expert(double score_expert, double score_policy) {
    return score_expert > score_policy;
}

/// Gaussian-parametric Thompson draw per arm from the ensemble mean/std;
/// larger draw wins.
template <typename QueryFn>
bool literal_thompson_pick_expert(const Vector& s_tilde, const Vector& policy_action,
                                  const Vector& expert_action, QueryFn&& q_ensemble, Rng& rng) {
    const Vector q_exp = q_ensemble(s_tilde, expert_action);
    const Vector q_pol = q_ensemble(s_tilde, policy_action);
    auto draw = [&](const Vector& qs) {
        const double mu = qs.mean();
        const double var = (qs.array() - mu).square().mean();
        return rng.normal(mu, std::sqrt(std::max(var, 0.0)));
    };
    const double te = draw(q_exp);
    const double tp = draw(q_pol);
    return te > tp;
}

/// Expert controls the episode while t_episode < H_t.
inline bool jsrl_curriculum_pick_expert(int t_episode, double h_t) {
    return static_cast<double>(t_episode) < h_t;
}

/// Linear handoff-point decay from the episode horizon to zero.
inline double jsrl_curriculum_horizon(double training_progress, int horizon) {
    return clip(1.0 - training_progress, 0.0, 1.0) * horizon;
}

/// Expert for the first rho_warm * total_steps environment steps.
inline bool jsrl_tt_pick_expert(long long global_step, double rho_warm, long long total_steps) {
    return static_cast<double>(global_step) < rho_warm * static_cast<double>(total_steps);
}

/// a = clip(a_expert + bound * a_residual, -1, 1).
inline Vector residual_select(const Vector& expert_action, const Vector& residual_action,
                              double bound = 1.0) {
    return clip_box(expert_action + bound * residual_action);
}

}  // namespace egrl::gate
