#include "egrl/experts/gain_file.hpp"

#include "egrl/envs/constants.hpp"
#include "egrl/experts/controllers.hpp"

#include <json.hpp>

#include <fstream>

namespace egrl::experts {

using nlohmann::json;

namespace {

json gains_to_json(const PidGains& g) {
    return json{{"kp", g.kp},
                {"ki", g.ki},
                {"kd", g.kd},
                {"deriv_filter_tau", g.deriv_filter_tau},
                {"u_min", g.u_min},
                {"u_max", g.u_max}};
}

PidGains gains_from_json(const json& j) {
    PidGains g;
    j.at("kp").get_to(g.kp);
    j.at("ki").get_to(g.ki);
    j.at("kd").get_to(g.kd);
    j.at("deriv_filter_tau").get_to(g.deriv_filter_tau);
    j.at("u_min").get_to(g.u_min);
    j.at("u_max").get_to(g.u_max);
    return g;
}

}  // namespace

std::string GainFile::to_json_string() const {
    json j;
    j["version"] = version;
    j["task"] = task;
    j["controller"] = controller;
    if (controller == "pid_loops") {
        json loops_j = json::array();
        for (const auto& l : loops)
            loops_j.push_back(json{{"name", l.name}, {"gains", gains_to_json(l.gains)}});
        j["loops"] = loops_j;
    } else {
        j["cpg"] = json{{"frequency_hz", cpg_frequency_hz},
                        {"amplitudes", cpg_amplitudes},
                        {"phases", cpg_phases}};
    }
    json tuning;
    tuning["rule"] = json{{"kp_per_ku", rule.kp_per_ku},
                          {"ti_per_tu", rule.ti_per_tu},
                          {"td_per_tu", rule.td_per_tu}};
    tuning["n_operating_points"] = n_operating_points;
    tuning["selected_operating_point"] = selected_operating_point;
    tuning["relay_amplitudes"] = relay_amplitudes;
    json ops = json::array();
    for (const auto& op : operating_points)
        ops.push_back(json{{"loop", op.loop},
                           {"setpoint", op.setpoint},
                           {"ku", op.ku},
                           {"tu", op.tu},
                           {"oscillation_amplitude", op.oscillation_amplitude}});
    tuning["operating_points"] = ops;
    tuning["de_fitness_history"] = de_fitness_history;
    j["tuning"] = tuning;
    j["expert_return"] = json{{"mean", expert_return.mean},
                              {"seeds", expert_return.seeds},
                              {"per_seed", expert_return.per_seed}};
    return j.dump(2);
}

GainFile GainFile::from_json_string(const std::string& text) {
    const json j = json::parse(text);
    GainFile g;
    j.at("version").get_to(g.version);
    if (g.version != 1) throw std::runtime_error("unsupported gain file version");
    j.at("task").get_to(g.task);
    j.at("controller").get_to(g.controller);
    if (g.controller == "pid_loops") {
        for (const auto& l : j.at("loops"))
            g.loops.push_back({l.at("name").get<std::string>(), gains_from_json(l.at("gains"))});
    } else if (g.controller == "cpg") {
        const auto& c = j.at("cpg");
        c.at("frequency_hz").get_to(g.cpg_frequency_hz);
        c.at("amplitudes").get_to(g.cpg_amplitudes);
        c.at("phases").get_to(g.cpg_phases);
    } else {
        throw std::runtime_error("unknown controller kind: " + g.controller);
    }
    const auto& tuning = j.at("tuning");
    const auto& rule = tuning.at("rule");
    rule.at("kp_per_ku").get_to(g.rule.kp_per_ku);
    rule.at("ti_per_tu").get_to(g.rule.ti_per_tu);
    rule.at("td_per_tu").get_to(g.rule.td_per_tu);
    tuning.at("n_operating_points").get_to(g.n_operating_points);
    tuning.at("selected_operating_point").get_to(g.selected_operating_point);
    tuning.at("relay_amplitudes").get_to(g.relay_amplitudes);
    for (const auto& op : tuning.at("operating_points"))
        g.operating_points.push_back({op.at("loop").get<int>(), op.at("setpoint").get<double>(),
                                      op.at("ku").get<double>(), op.at("tu").get<double>(),
                                      op.at("oscillation_amplitude").get<double>()});
    tuning.at("de_fitness_history").get_to(g.de_fitness_history);
    const auto& er = j.at("expert_return");
    er.at("mean").get_to(g.expert_return.mean);
    er.at("seeds").get_to(g.expert_return.seeds);
    er.at("per_seed").get_to(g.expert_return.per_seed);
    return g;
}

void GainFile::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write gain file: " + path);
    out << to_json_string() << "\n";
}

GainFile GainFile::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open gain file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

std::unique_ptr<ExpertController> make_expert(const std::string& env_id, const GainFile& g) {
    return make_expert(env_id, g, envs::default_constants());
}

std::unique_ptr<ExpertController> make_expert(const std::string& env_id, const GainFile& g,
                                              const envs::EnvConstants& c) {
    if (g.task != env_id)
        throw std::invalid_argument("gain file is for task '" + g.task + "', not '" + env_id + "'");
    if (g.controller == "cpg")
        return std::make_unique<CpgExpert>(g.cpg_frequency_hz, g.cpg_amplitudes, g.cpg_phases);

    std::vector<PidGains> gains;
    for (const auto& l : g.loops) gains.push_back(l.gains);
    if (env_id == "fourtank") return std::make_unique<FourTankPidExpert>(gains, c.fourtank);
    if (env_id == "plane3dcircle") return std::make_unique<PlanePidExpert>(gains, c.plane);
    if (env_id == "glassfurnace") return std::make_unique<FurnacePidExpert>(gains, c.furnace);
    throw std::invalid_argument("make_expert: unknown env id: " + env_id);
}

}  // namespace egrl::experts
