#include "egrl/harness/record.hpp"

#include <json.hpp>

#include <fstream>

namespace egrl::harness {

using nlohmann::json;

void GateStats::log_draw(double p, bool expert, double delta) {
    p_max = std::max(p_max, p);
    delta_max = std::max(delta_max, delta);
    const int bin = clip(static_cast<int>(p * 20.0), 0, 19);
    ++p_hist[static_cast<size_t>(bin)];
    if (windows.empty() || windows.back().steps >= window_size) windows.push_back({});
    auto& w = windows.back();
    w.p_max = std::max(w.p_max, p);
    w.expert_picks += expert ? 1 : 0;
    ++w.steps;
    if (decimation > 0 && draws % decimation == 0)
        samples.push_back({p, expert ? 1.0 : 0.0, delta});
    ++draws;
}

void GateStats::finish_window() {
    if (!windows.empty() && windows.back().steps == 0) windows.pop_back();
}

namespace {

json counters_to_json(const integrate::MechanismCounters& c) {
    return json{{"gate_draws", c.gate_draws},
                {"argmax_picks", c.argmax_picks},
                {"thompson_draws", c.thompson_draws},
                {"handoff_tests", c.handoff_tests},
                {"warmstart_tests", c.warmstart_tests},
                {"residual_steps", c.residual_steps},
                {"plain_policy_steps", c.plain_policy_steps},
                {"expert_only_steps", c.expert_only_steps},
                {"prefill_steps", c.prefill_steps},
                {"expert_arm", c.expert_arm},
                {"policy_arm", c.policy_arm}};
}

integrate::MechanismCounters counters_from_json(const json& j) {
    integrate::MechanismCounters c;
    c.gate_draws = j.value("gate_draws", 0LL);
    c.argmax_picks = j.value("argmax_picks", 0LL);
    c.thompson_draws = j.value("thompson_draws", 0LL);
    c.handoff_tests = j.value("handoff_tests", 0LL);
    c.warmstart_tests = j.value("warmstart_tests", 0LL);
    c.residual_steps = j.value("residual_steps", 0LL);
    c.plain_policy_steps = j.value("plain_policy_steps", 0LL);
    c.expert_only_steps = j.value("expert_only_steps", 0LL);
    c.prefill_steps = j.value("prefill_steps", 0LL);
    c.expert_arm = j.value("expert_arm", 0LL);
    c.policy_arm = j.value("policy_arm", 0LL);
    return c;
}

}  // namespace

std::string RunRecord::to_json_string() const {
    json j;
    j["version"] = version;
    j["config_hash"] = config_hash;
    j["config"] = json::parse(config_json.empty() ? "{}" : config_json);
    j["env"] = env;
    j["method"] = method;
    j["seed"] = seed;
    j["eval_steps"] = eval_steps;
    j["eval_returns"] = eval_returns;
    j["eval_episode_returns"] = eval_episode_returns;
    j["final_window_scalar"] = final_window_scalar;
    j["final_window_evals"] = final_window_evals;

    json g;
    g["p_max"] = gate.p_max;
    g["delta_max"] = std::isfinite(gate.delta_max) ? json(gate.delta_max) : json();
    g["p_hist"] = gate.p_hist;
    g["window_size"] = gate.window_size;
    json windows = json::array();
    for (const auto& w : gate.windows)
        windows.push_back(json{{"p_max", w.p_max}, {"expert_picks", w.expert_picks}, {"steps", w.steps}});
    g["windows"] = windows;
    g["decimation"] = gate.decimation;
    g["samples"] = gate.samples;
    g["draws"] = gate.draws;
    j["gate"] = g;

    j["counters"] = counters_to_json(counters);
    j["perturbation"] = json{{"type", perturbation.type}, {"sigma", perturbation.sigma}};
    j["expert_return_unperturbed"] =
        std::isnan(expert_return_unperturbed) ? json() : json(expert_return_unperturbed);
    j["wallclock_s"] = wallclock_s;
    j["rng_provenance"] = rng_provenance;
    j["aborted"] = aborted;
    j["error"] = error;
    return j.dump(2);
}

RunRecord RunRecord::from_json_string(const std::string& text) {
    const json j = json::parse(text);
    RunRecord r;
    r.version = j.at("version").get<int>();
    if (r.version != 1) throw std::runtime_error("unsupported run record version");
    r.config_hash = j.at("config_hash").get<std::string>();
    r.config_json = j.at("config").dump();
    r.env = j.at("env").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.eval_steps = j.at("eval_steps").get<std::vector<long long>>();
    r.eval_returns = j.at("eval_returns").get<std::vector<double>>();
    r.eval_episode_returns = j.at("eval_episode_returns").get<std::vector<std::vector<double>>>();
    r.final_window_scalar = j.at("final_window_scalar").is_null()
                                ? std::numeric_limits<double>::quiet_NaN()
                                : j.at("final_window_scalar").get<double>();
    r.final_window_evals = j.at("final_window_evals").get<int>();

    const auto& g = j.at("gate");
    r.gate.p_max = g.at("p_max").get<double>();
    r.gate.delta_max = g.at("delta_max").is_null() ? -std::numeric_limits<double>::infinity()
                                                   : g.at("delta_max").get<double>();
    r.gate.p_hist = g.at("p_hist").get<std::array<long long, 20>>();
    r.gate.window_size = g.at("window_size").get<long long>();
    for (const auto& w : g.at("windows"))
        r.gate.windows.push_back({w.at("p_max").get<double>(), w.at("expert_picks").get<long long>(),
                                  w.at("steps").get<long long>()});
    r.gate.decimation = g.at("decimation").get<int>();
    r.gate.samples = g.at("samples").get<std::vector<std::array<double, 3>>>();
    r.gate.draws = g.at("draws").get<long long>();

    r.counters = counters_from_json(j.at("counters"));
    r.perturbation.type = j.at("perturbation").at("type").get<std::string>();
    r.perturbation.sigma = j.at("perturbation").at("sigma").get<double>();
    r.expert_return_unperturbed = j.at("expert_return_unperturbed").is_null()
                                      ? std::numeric_limits<double>::quiet_NaN()
                                      : j.at("expert_return_unperturbed").get<double>();
    r.wallclock_s = j.at("wallclock_s").get<double>();
    r.rng_provenance = j.at("rng_provenance").get<std::string>();
    r.aborted = j.at("aborted").get<bool>();
    r.error = j.at("error").get<std::string>();
    return r;
}

void RunRecord::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write record: " + path);
    out << to_json_string() << "\n";
}

RunRecord RunRecord::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open record: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

}  // namespace egrl::harness
