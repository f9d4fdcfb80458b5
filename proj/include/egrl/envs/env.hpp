#pragma once

#include "egrl/common.hpp"
#include "egrl/envs/constants.hpp"
#include "egrl/rng.hpp"

#include <cstdint>
#include <memory>
#include <string>

namespace egrl::envs {

struct EnvSpec {
    std::string id;
    int action_dim = 0;
    int obs_dim = 0;
    int horizon = 0;
    double reward_ceiling_per_step = 1.0;
    double j_ref = 0.0;   // reward_ceiling_per_step * horizon
    double j_exp = std::numeric_limits<double>::quiet_NaN();  // filled from gain file
    bool terminating = false;
    double control_dt = 1.0;  // seconds per env step
};

struct EnvState {
    Vector observation;
    Vector internal;   // full simulator state
    int step_index = 0;
    bool done = false;
};

struct StepResult {
    Vector observation;
    double reward = 0.0;
    bool done = false;      // horizon exhausted or terminal
    bool terminal = false;  // absorbing termination (crash), never a timeout
};

class Env {
public:
    virtual ~Env() = default;

    virtual const EnvSpec& spec() const = 0;

    /// Deterministic function of (env type, seed).
    virtual Vector reset(std::uint64_t seed) = 0;

    /// Advances one control step. Throws std::runtime_error on a done episode
    /// and std::invalid_argument on non-finite actions. Actions are clipped
    /// into [-1,1]^d before the dynamics.
    virtual StepResult step(const Vector& action) = 0;

    virtual EnvState snapshot() const = 0;

    int step_index() const { return snapshot().step_index; }
    bool done() const { return snapshot().done; }
};

/// env_id in {"fourtank", "plane3dcircle", "glassfurnace", "integrator1d"}.
/// Throws std::invalid_argument on unknown ids.
std::unique_ptr<Env> make_env(const std::string& env_id, const EnvConstants& c = default_constants());

/// obs' = obs + sigma * xi, xi ~ N(0, I). sigma must be >= 0.
Vector perturb_observation(const Vector& obs, double sigma, Rng& rng);

}  // namespace egrl::envs
