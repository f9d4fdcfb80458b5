#pragma once

#include "egrl/integrate/gate.hpp"
#include "egrl/rl/sac.hpp"

#include <string>
#include <vector>

namespace egrl::harness {

struct PerturbationSpec {
    std::string type = "none";  // none | undertune | action_bias | obs_noise
    double sigma = 0.0;
};

// Full run specification; serializes losslessly and hashes canonically.
struct RunConfig {
    int version = 1;
    std::string env;
    std::string method = "sac";
    std::vector<std::uint64_t> seeds = {0};

    long long total_steps = 50000;
    long long eval_interval = 2500;
    int eval_episodes = 5;
    double final_window_fraction = 0.2;

    std::string gains_path;      // required for expert-using methods
    std::string constants_path;  // optional; built-in defaults otherwise

    gate::GateConfig gate{};     // per-task defaults applied by resolve_defaults()
    bool gate_set = false;       // whether the file pinned kappa/tau explicitly

    // Method knobs.
    double rho_warm = 0.1;
    double residual_bound = 1.0;
    int gate_log_decimation = 25;
    std::string scoring;         // optional override: lcb_range|lcb_musigma|min_q|mean_q
    std::string ibrl_scoring;    // optional override: mean_q|min_q

    rl::SacHyper sac;
    long long buffer_capacity = 100000;
    long long update_after = 1000;

    PerturbationSpec perturbation;

    // When set, train_run writes <dir>/<env>__<method>__seed<k>.ckpt.json
    // holding the nets and the normalizer, round-trip exact.
    std::string checkpoint_dir;

    /// Fills the gate from the task defaults when the file did not pin it.
    void resolve_defaults();

    std::string to_json_string() const;
    static RunConfig from_json_string(const std::string& text);
    void save(const std::string& path) const;
    static RunConfig load(const std::string& path);

    /// Hash over everything except the seed list: identifies the
    /// experimental cell a record belongs to.
    std::string cell_hash() const;
};

/// HPO-tuned gate defaults per task.
gate::GateConfig task_gate_defaults(const std::string& env_id);

gate::ScoringRule scoring_rule_from_string(const std::string& name);
std::string scoring_rule_to_string(gate::ScoringRule rule);

}  // namespace egrl::harness
