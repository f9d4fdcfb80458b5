#include "egrl/integrate/method.hpp"

namespace egrl::integrate {

namespace {

MethodSpec edge_base(const std::string& id) {
    MethodSpec m;
    m.id = id;
    m.mechanism = Mechanism::edge;
    m.uses_expert = true;
    m.augment_state = true;
    m.gate_form = GateForm::softmax;
    m.scoring = gate::ScoringRule::lcb_range;
    return m;
}

}  // namespace

MethodSpec MethodSpec::from_id(const std::string& id) {
    // Base methods.
    if (id == "sac") {
        MethodSpec m;
        m.id = id;
        m.mechanism = Mechanism::sac;
        return m;
    }
    if (id == "expert") {
        MethodSpec m;
        m.id = id;
        m.mechanism = Mechanism::expert_only;
        m.uses_expert = true;
        return m;
    }
    if (id == "edge") return edge_base(id);
    if (id == "ibrl") {
        MethodSpec m;
        m.id = id;
        m.mechanism = Mechanism::ibrl;
        m.uses_expert = true;
        m.augment_state = true;
        m.gate_form = GateForm::argmax;
        m.bootstrap = rl::BootstrapMode::ibrl_max;
        return m;
    }
    if (id == "jsrl_curriculum" || id == "jsrl_tt") {
        MethodSpec m;
        m.id = id;
        m.mechanism = id == "jsrl_tt" ? Mechanism::jsrl_tt : Mechanism::jsrl_curriculum;
        m.uses_expert = true;
        m.augment_state = true;
        return m;
    }
    if (id == "residual") {
        MethodSpec m;
        m.id = id;
        m.mechanism = Mechanism::residual;
        m.uses_expert = true;
        m.augment_state = true;
        return m;
    }

    // Ablation variants: single-knob flips of edge.
    if (id == "gating_argmax") {
        MethodSpec m = edge_base(id);
        m.gate_form = GateForm::argmax;
        m.scoring = gate::ScoringRule::mean_q;
        return m;
    }
    if (id == "argmax_lcb") {
        MethodSpec m = edge_base(id);
        m.gate_form = GateForm::argmax;
        return m;
    }
    if (id == "no_pessimism") {
        MethodSpec m = edge_base(id);
        m.force_zero_kappa = true;  // softmax over plain ensemble min
        return m;
    }
    if (id == "bootstrap_argmax") {
        MethodSpec m = edge_base(id);
        m.bootstrap = rl::BootstrapMode::ibrl_max;
        return m;
    }
    if (id == "bootstrap_lcb_gated") {
        MethodSpec m = edge_base(id);
        m.bootstrap = rl::BootstrapMode::lcb_gated;
        return m;
    }
    if (id == "no_state_aug") {
        MethodSpec m = edge_base(id);
        m.augment_state = false;
        return m;
    }
    if (id == "no_obs_norm") {
        MethodSpec m = edge_base(id);
        m.obs_norm = false;
        return m;
    }
    if (id == "random_expert") {
        MethodSpec m = edge_base(id);
        m.random_expert = true;
        return m;
    }
    if (id == "store_policy_action") {
        MethodSpec m = edge_base(id);
        m.store_policy_action = true;
        return m;
    }
    if (id == "expert_prefill") {
        MethodSpec m = edge_base(id);
        m.prefill_fraction = 0.1;  // 100k of the 1M-step protocol, kept proportional
        return m;
    }
    if (id == "literal_thompson") {
        MethodSpec m = edge_base(id);
        m.literal_thompson = true;
        return m;
    }
    if (id == "literal_thompson_k10") {
        MethodSpec m = edge_base(id);
        m.literal_thompson = true;
        m.ensemble_n = 10;
        return m;
    }
    throw std::invalid_argument("unknown method/variant id: " + id);
}

const std::vector<std::string>& MethodSpec::known_ids() {
    static const std::vector<std::string> ids = {
        "sac",           "expert",
        "edge",          "ibrl",
        "jsrl_curriculum", "jsrl_tt",
        "residual",      "gating_argmax",
        "argmax_lcb",    "no_pessimism",
        "bootstrap_argmax", "bootstrap_lcb_gated",
        "no_state_aug",  "no_obs_norm",
        "random_expert", "store_policy_action",
        "expert_prefill", "literal_thompson",
        "literal_thompson_k10"};
    return ids;
}

}  // namespace egrl::integrate
