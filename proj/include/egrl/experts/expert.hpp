#pragma once

#include "egrl/common.hpp"
#include "egrl/rng.hpp"

#include <memory>
#include <vector>

namespace egrl::experts {

// Deterministic controller with exposed internal state z. act() is a pure
// function of (observation, z) and advances z; outputs are clipped into
// [-1,1]^d.
class ExpertController {
public:
    virtual ~ExpertController() = default;

    virtual int action_dim() const = 0;
    virtual int state_dim() const = 0;

    virtual Vector internal_state() const = 0;
    virtual void set_internal_state(const Vector& z) = 0;

    /// Computes the action for the observation and advances z.
    virtual Vector act(const Vector& obs, double dt) = 0;

    virtual void reset() = 0;
    virtual std::unique_ptr<ExpertController> clone() const = 0;

    /// Calibrated parameters (gains), flat. Targets of the undertuning sweep.
    virtual std::vector<double> parameters() const = 0;
    virtual void set_parameters(const std::vector<double>& p) = 0;

    /// Query the action at an explicit internal state without touching this
    /// controller's own state.
    Vector act_at(const Vector& obs, const Vector& z, double dt) const {
        auto c = clone();
        c->set_internal_state(z);
        return c->act(obs, dt);
    }
};

/// Log-scale parameter perturbation: each positive parameter g becomes
/// g * exp(sigma * xi) with one xi per parameter; zeros stay zero.
std::unique_ptr<ExpertController> undertune(const ExpertController& expert, double sigma, Rng& rng);

/// action' = clip(action + bias, -1, 1).
Vector bias_action(const Vector& action, const Vector& bias);

/// Stateful seeded uniform policy standing in for an expert
/// (the random_expert ablation); z is the last drawn action.
std::unique_ptr<ExpertController> make_random_expert(int action_dim, std::uint64_t seed);

}  // namespace egrl::experts
