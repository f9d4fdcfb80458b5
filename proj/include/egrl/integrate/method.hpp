#pragma once

#include "egrl/integrate/gate.hpp"
#include "egrl/rl/sac.hpp"

#include <string>
#include <vector>

namespace egrl::integrate {

enum class Mechanism { sac, expert_only, edge, ibrl, jsrl_curriculum, jsrl_tt, residual };
enum class GateForm { softmax, argmax };

// Per-step mechanism instrumentation; exactly one selection path runs per
// behavior step.
struct MechanismCounters {
    long long gate_draws = 0;
    long long argmax_picks = 0;
    long long thompson_draws = 0;
    long long handoff_tests = 0;
    long long warmstart_tests = 0;
    long long residual_steps = 0;
    long long plain_policy_steps = 0;
    long long expert_only_steps = 0;
    long long prefill_steps = 0;
    long long expert_arm = 0;
    long long policy_arm = 0;

    long long selection_total() const {
        return gate_draws + argmax_picks + thompson_draws + handoff_tests + warmstart_tests +
               residual_steps + plain_policy_steps + expert_only_steps + prefill_steps;
    }
};

// Resolved method/variant behavior. Variant ids are single-knob flips of the
// edge configuration and double as CLI names and result-file stems.
struct MethodSpec {
    std::string id;
    Mechanism mechanism = Mechanism::sac;

    bool uses_expert = false;
    bool augment_state = false;
    bool obs_norm = true;
    bool random_expert = false;
    bool store_policy_action = false;
    bool literal_thompson = false;
    bool force_zero_kappa = false;

    GateForm gate_form = GateForm::softmax;
    gate::ScoringRule scoring = gate::ScoringRule::lcb_range;     // edge-family selection
    gate::ScoringRule ibrl_scoring = gate::ScoringRule::mean_q;   // ibrl argmax reduction
    rl::BootstrapMode bootstrap = rl::BootstrapMode::standard;

    int ensemble_n = 0;             // 0 = use the run config's value
    double prefill_fraction = 0.0;  // fraction of total steps run as expert prefill

    bool is_edge_family() const { return mechanism == Mechanism::edge; }

    /// The variant_dispatch operation: maps a method/variant id to its
    /// behavior modifications. Throws std::invalid_argument on unknown ids.
    static MethodSpec from_id(const std::string& id);
    static const std::vector<std::string>& known_ids();
};

/// What the replay buffer records for a step: the executed action, unless the
/// off-policy-correctness breaker swaps in the policy sample.
inline Vector stored_action(const MethodSpec& m, const Vector& executed,
                            const Vector& policy_sample) {
    return m.store_policy_action && policy_sample.size() > 0 ? policy_sample : executed;
}

}  // namespace egrl::integrate
