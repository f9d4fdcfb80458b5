#include "egrl/harness/config.hpp"

#include <json.hpp>

#include <fstream>

namespace egrl::harness {

using nlohmann::json;

gate::GateConfig task_gate_defaults(const std::string& env_id) {
    if (env_id == "fourtank") return {0.12, 1.64};
    if (env_id == "plane3dcircle") return {4.05, 8.51};
    if (env_id == "glassfurnace") return {2.61, 0.24};
    return {1.0, 1.0};
}

gate::ScoringRule scoring_rule_from_string(const std::string& name) {
    if (name == "lcb_range") return gate::ScoringRule::lcb_range;
    if (name == "lcb_musigma") return gate::ScoringRule::lcb_musigma;
    if (name == "min_q") return gate::ScoringRule::min_q;
    if (name == "mean_q") return gate::ScoringRule::mean_q;
    throw std::invalid_argument("unknown scoring rule: " + name);
}

std::string scoring_rule_to_string(gate::ScoringRule rule) {
    switch (rule) {
        case gate::ScoringRule::lcb_range: return "lcb_range";
        case gate::ScoringRule::lcb_musigma: return "lcb_musigma";
        case gate::ScoringRule::min_q: return "min_q";
        case gate::ScoringRule::mean_q: return "mean_q";
    }
    throw std::logic_error("unreachable");
}

void RunConfig::resolve_defaults() {
    if (!gate_set) {
        gate = task_gate_defaults(env);
        gate_set = true;
    }
}

namespace {

json config_to_json(const RunConfig& c) {
    json j;
    j["version"] = c.version;
    j["env"] = c.env;
    j["method"] = c.method;
    j["seeds"] = c.seeds;
    j["total_steps"] = c.total_steps;
    j["eval_interval"] = c.eval_interval;
    j["eval_episodes"] = c.eval_episodes;
    j["final_window_fraction"] = c.final_window_fraction;
    j["gains_path"] = c.gains_path;
    j["constants_path"] = c.constants_path;
    if (c.gate_set) j["gate"] = json{{"kappa", c.gate.kappa}, {"tau", c.gate.tau}};
    json knobs;
    knobs["rho_warm"] = c.rho_warm;
    knobs["residual_bound"] = c.residual_bound;
    knobs["gate_log_decimation"] = c.gate_log_decimation;
    if (!c.scoring.empty()) knobs["scoring"] = c.scoring;
    if (!c.ibrl_scoring.empty()) knobs["ibrl_scoring"] = c.ibrl_scoring;
    j["method_knobs"] = knobs;
    j["sac"] = json{{"gamma", c.sac.gamma},
                    {"lr", c.sac.lr},
                    {"polyak", c.sac.polyak},
                    {"batch_size", c.sac.batch_size},
                    {"hidden", c.sac.hidden},
                    {"critics", c.sac.critics},
                    {"alpha_init", c.sac.alpha_init}};
    j["buffer_capacity"] = c.buffer_capacity;
    j["update_after"] = c.update_after;
    j["checkpoint_dir"] = c.checkpoint_dir;
    j["perturbation"] = json{{"type", c.perturbation.type}, {"sigma", c.perturbation.sigma}};
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    c.version = j.value("version", 1);
    if (c.version != 1) throw std::runtime_error("unsupported run config version");
    c.env = j.at("env").get<std::string>();
    c.method = j.value("method", std::string("sac"));
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    c.total_steps = j.value("total_steps", c.total_steps);
    c.eval_interval = j.value("eval_interval", c.eval_interval);
    c.eval_episodes = j.value("eval_episodes", c.eval_episodes);
    c.final_window_fraction = j.value("final_window_fraction", c.final_window_fraction);
    c.gains_path = j.value("gains_path", std::string());
    c.constants_path = j.value("constants_path", std::string());
    if (j.contains("gate")) {
        c.gate.kappa = j.at("gate").at("kappa").get<double>();
        c.gate.tau = j.at("gate").at("tau").get<double>();
        c.gate_set = true;
    }
    if (j.contains("method_knobs")) {
        const auto& k = j.at("method_knobs");
        c.rho_warm = k.value("rho_warm", c.rho_warm);
        c.residual_bound = k.value("residual_bound", c.residual_bound);
        c.gate_log_decimation = k.value("gate_log_decimation", c.gate_log_decimation);
        c.scoring = k.value("scoring", std::string());
        c.ibrl_scoring = k.value("ibrl_scoring", std::string());
    }
    if (j.contains("sac")) {
        const auto& s = j.at("sac");
        c.sac.gamma = s.value("gamma", c.sac.gamma);
        c.sac.lr = s.value("lr", c.sac.lr);
        c.sac.polyak = s.value("polyak", c.sac.polyak);
        c.sac.batch_size = s.value("batch_size", c.sac.batch_size);
        c.sac.hidden = s.value("hidden", c.sac.hidden);
        c.sac.critics = s.value("critics", c.sac.critics);
        c.sac.alpha_init = s.value("alpha_init", c.sac.alpha_init);
    }
    c.buffer_capacity = j.value("buffer_capacity", c.buffer_capacity);
    c.update_after = j.value("update_after", c.update_after);
    c.checkpoint_dir = j.value("checkpoint_dir", std::string());
    if (j.contains("perturbation")) {
        c.perturbation.type = j.at("perturbation").value("type", std::string("none"));
        c.perturbation.sigma = j.at("perturbation").value("sigma", 0.0);
    }
    return c;
}

}  // namespace

std::string RunConfig::to_json_string() const { return config_to_json(*this).dump(2); }

RunConfig RunConfig::from_json_string(const std::string& text) {
    return config_from_json(json::parse(text));
}

void RunConfig::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    out << to_json_string() << "\n";
}

RunConfig RunConfig::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

std::string RunConfig::cell_hash() const {
    json j = config_to_json(*this);
    j.erase("seeds");
    return hex64(fnv1a64(j.dump()));
}

}  // namespace egrl::harness
