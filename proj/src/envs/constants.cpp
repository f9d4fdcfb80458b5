#include "egrl/envs/constants.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace egrl::envs {

using nlohmann::json;

namespace {

json to_json(const FourTankConstants& c) {
    return json{{"tank_area", c.tank_area},
                {"orifice_area", c.orifice_area},
                {"gravity", c.gravity},
                {"pump_gain_1", c.pump_gain_1},
                {"pump_gain_2", c.pump_gain_2},
                {"valve_split_1", c.valve_split_1},
                {"valve_split_2", c.valve_split_2},
                {"pump_max_volts", c.pump_max_volts},
                {"level_max", c.level_max},
                {"dt", c.dt},
                {"substeps", c.substeps},
                {"setpoint_lo", c.setpoint_lo},
                {"setpoint_hi", c.setpoint_hi},
                {"init_lower_lo", c.init_lower_lo},
                {"init_lower_hi", c.init_lower_hi},
                {"init_upper_lo", c.init_upper_lo},
                {"init_upper_hi", c.init_upper_hi},
                {"reward_scale", c.reward_scale}};
}

void from_json_ft(const json& j, FourTankConstants& c) {
    j.at("tank_area").get_to(c.tank_area);
    j.at("orifice_area").get_to(c.orifice_area);
    j.at("gravity").get_to(c.gravity);
    j.at("pump_gain_1").get_to(c.pump_gain_1);
    j.at("pump_gain_2").get_to(c.pump_gain_2);
    j.at("valve_split_1").get_to(c.valve_split_1);
    j.at("valve_split_2").get_to(c.valve_split_2);
    j.at("pump_max_volts").get_to(c.pump_max_volts);
    j.at("level_max").get_to(c.level_max);
    j.at("dt").get_to(c.dt);
    j.at("substeps").get_to(c.substeps);
    j.at("setpoint_lo").get_to(c.setpoint_lo);
    j.at("setpoint_hi").get_to(c.setpoint_hi);
    j.at("init_lower_lo").get_to(c.init_lower_lo);
    j.at("init_lower_hi").get_to(c.init_lower_hi);
    j.at("init_upper_lo").get_to(c.init_upper_lo);
    j.at("init_upper_hi").get_to(c.init_upper_hi);
    j.at("reward_scale").get_to(c.reward_scale);
}

json to_json(const PlaneConstants& c) {
    return json{{"v_min", c.v_min},
                {"v_max", c.v_max},
                {"tau_v", c.tau_v},
                {"hdot_max", c.hdot_max},
                {"tau_hdot", c.tau_hdot},
                {"bank_max", c.bank_max},
                {"tau_bank", c.tau_bank},
                {"gravity", c.gravity},
                {"dt", c.dt},
                {"substeps", c.substeps},
                {"altitude_target", c.altitude_target},
                {"radius_lo", c.radius_lo},
                {"radius_hi", c.radius_hi},
                {"init_radial_offset", c.init_radial_offset},
                {"init_altitude_offset", c.init_altitude_offset},
                {"init_heading_offset", c.init_heading_offset},
                {"cruise_speed", c.cruise_speed},
                {"altitude_scale", c.altitude_scale},
                {"radial_scale", c.radial_scale},
                {"altitude_ceiling", c.altitude_ceiling}};
}

void from_json_pl(const json& j, PlaneConstants& c) {
    j.at("v_min").get_to(c.v_min);
    j.at("v_max").get_to(c.v_max);
    j.at("tau_v").get_to(c.tau_v);
    j.at("hdot_max").get_to(c.hdot_max);
    j.at("tau_hdot").get_to(c.tau_hdot);
    j.at("bank_max").get_to(c.bank_max);
    j.at("tau_bank").get_to(c.tau_bank);
    j.at("gravity").get_to(c.gravity);
    j.at("dt").get_to(c.dt);
    j.at("substeps").get_to(c.substeps);
    j.at("altitude_target").get_to(c.altitude_target);
    j.at("radius_lo").get_to(c.radius_lo);
    j.at("radius_hi").get_to(c.radius_hi);
    j.at("init_radial_offset").get_to(c.init_radial_offset);
    j.at("init_altitude_offset").get_to(c.init_altitude_offset);
    j.at("init_heading_offset").get_to(c.init_heading_offset);
    j.at("cruise_speed").get_to(c.cruise_speed);
    j.at("altitude_scale").get_to(c.altitude_scale);
    j.at("radial_scale").get_to(c.radial_scale);
    j.at("altitude_ceiling").get_to(c.altitude_ceiling);
}

json to_json(const FurnaceConstants& c) {
    return json{{"zones", c.zones},
                {"ambient", c.ambient},
                {"loss_rate", c.loss_rate},
                {"coupling", c.coupling},
                {"heater_gain", c.heater_gain},
                {"dt", c.dt},
                {"substeps", c.substeps},
                {"setpoint_lo", c.setpoint_lo},
                {"setpoint_hi", c.setpoint_hi},
                {"setpoint_interval", c.setpoint_interval},
                {"init_lo", c.init_lo},
                {"init_hi", c.init_hi},
                {"reward_scale", c.reward_scale}};
}

void from_json_gf(const json& j, FurnaceConstants& c) {
    j.at("zones").get_to(c.zones);
    j.at("ambient").get_to(c.ambient);
    j.at("loss_rate").get_to(c.loss_rate);
    j.at("coupling").get_to(c.coupling);
    j.at("heater_gain").get_to(c.heater_gain);
    j.at("dt").get_to(c.dt);
    j.at("substeps").get_to(c.substeps);
    j.at("setpoint_lo").get_to(c.setpoint_lo);
    j.at("setpoint_hi").get_to(c.setpoint_hi);
    j.at("setpoint_interval").get_to(c.setpoint_interval);
    j.at("init_lo").get_to(c.init_lo);
    j.at("init_hi").get_to(c.init_hi);
    j.at("reward_scale").get_to(c.reward_scale);
}

json to_json(const Integrator1dConstants& c) {
    return json{{"step_gain", c.step_gain},
                {"x_limit", c.x_limit},
                {"init_range", c.init_range},
                {"horizon", c.horizon}};
}

void from_json_toy(const json& j, Integrator1dConstants& c) {
    j.at("step_gain").get_to(c.step_gain);
    j.at("x_limit").get_to(c.x_limit);
    j.at("init_range").get_to(c.init_range);
    j.at("horizon").get_to(c.horizon);
}

}  // namespace

const EnvConstants& default_constants() {
    static const EnvConstants c{};
    return c;
}

EnvConstants load_constants(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open constants file: " + path);
    json j;
    in >> j;
    EnvConstants c;
    c.version = j.at("version").get<int>();
    if (c.version != 1)
        throw std::runtime_error("unsupported constants version in " + path);
    from_json_ft(j.at("fourtank"), c.fourtank);
    from_json_pl(j.at("plane3dcircle"), c.plane);
    from_json_gf(j.at("glassfurnace"), c.furnace);
    from_json_toy(j.at("integrator1d"), c.integrator);
    return c;
}

void save_constants(const EnvConstants& c, const std::string& path) {
    json j{{"version", c.version},
           {"fourtank", to_json(c.fourtank)},
           {"plane3dcircle", to_json(c.plane)},
           {"glassfurnace", to_json(c.furnace)},
           {"integrator1d", to_json(c.integrator)}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write constants file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace egrl::envs
