#pragma once

#include "egrl/envs/env.hpp"
#include "egrl/experts/gain_file.hpp"
#include "egrl/experts/relay.hpp"

namespace egrl::experts {

struct PidTuneOptions {
    int n_operating_points = 8;
    int return_seeds = 16;
    TuningRule rule;
};

/// Relay-autotunes every PID loop of the task across an operating-point
/// sweep, keeps the middle point's gains, and measures the tuned expert's
/// mean return. MIMO plants are tuned as sequential SISO loops with earlier
/// loops closed; cascades inside-out. Throws std::runtime_error with
/// diagnostics when a loop fails to oscillate.
GainFile tune_pid_expert(const std::string& env_id, const envs::EnvConstants& c,
                         const PidTuneOptions& opt = {});

/// Deterministic expert episode return on a fresh environment.
double expert_rollout_return(envs::Env& env, ExpertController& expert, std::uint64_t seed);

}  // namespace egrl::experts
