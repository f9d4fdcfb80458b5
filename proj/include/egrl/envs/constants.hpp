#pragma once

#include <array>
#include <string>

namespace egrl::envs {

// All physical parameters live here and in the matching versioned JSON file
// (config/env_constants.json). Units: FourTank cm/s/V, Plane3DCircle SI,
// GlassFurnace K/s.

struct FourTankConstants {
    std::array<double, 4> tank_area{28.0, 32.0, 28.0, 32.0};     // cm^2
    std::array<double, 4> orifice_area{0.071, 0.057, 0.071, 0.057};  // cm^2
    double gravity = 981.0;           // cm/s^2
    double pump_gain_1 = 3.14;        // cm^3/(V s)
    double pump_gain_2 = 3.29;
    double valve_split_1 = 0.43;      // gamma_1, non-minimum-phase setting
    double valve_split_2 = 0.34;      // gamma_2 (gamma_1 + gamma_2 < 1)
    double pump_max_volts = 10.0;
    double level_max = 20.0;          // overflow cap, cm
    double dt = 5.0;                  // env step, s
    int substeps = 10;
    double setpoint_lo = 10.0;        // tracked-level setpoint range, cm
    double setpoint_hi = 14.0;
    double init_lower_lo = 6.0;       // initial lower-tank levels
    double init_lower_hi = 10.0;
    double init_upper_lo = 2.0;       // initial upper-tank levels
    double init_upper_hi = 5.0;
    double reward_scale = 1.0;        // tracking-factor scale, cm
};

struct PlaneConstants {
    double v_min = 15.0;              // airspeed command range, m/s
    double v_max = 35.0;
    double tau_v = 3.0;               // airspeed lag, s
    double hdot_max = 5.0;            // climb-rate command limit, m/s
    double tau_hdot = 1.5;
    double bank_max = 0.785398163397448;  // rad (45 deg)
    double tau_bank = 1.0;
    double gravity = 9.81;
    double dt = 0.1;
    int substeps = 10;
    double altitude_target = 100.0;   // m
    double radius_lo = 200.0;         // drawn circle radius range, m
    double radius_hi = 400.0;
    double init_radial_offset = 40.0; // +- m around the drawn radius
    double init_altitude_offset = 10.0;
    double init_heading_offset = 0.2; // rad
    double cruise_speed = 25.0;       // expert airspeed setpoint
    double altitude_scale = 50.0;     // reward scales (before the ^10 shaping)
    double radial_scale = 150.0;
    double altitude_ceiling = 1000.0;
};

struct FurnaceConstants {
    int zones = 4;
    double ambient = 300.0;           // K
    double loss_rate = 1.0 / 3600.0;  // 1/s per zone
    double coupling = 1.0 / 7200.0;   // 1/s between adjacent zones
    double heater_gain = 0.15;        // K/s at full power
    double dt = 30.0;
    int substeps = 10;
    double setpoint_lo = 620.0;
    double setpoint_hi = 780.0;
    int setpoint_interval = 240;      // steps between seeded setpoint redraws
    double init_lo = 600.0;
    double init_hi = 700.0;
    double reward_scale = 10.0;       // K
};

// 1-D toy: x' = x + step_gain * a, reward max(0, 1 - x^2).
struct Integrator1dConstants {
    double step_gain = 0.2;
    double x_limit = 5.0;
    double init_range = 3.0;
    int horizon = 200;
};

struct EnvConstants {
    int version = 1;
    FourTankConstants fourtank;
    PlaneConstants plane;
    FurnaceConstants furnace;
    Integrator1dConstants integrator;
};

/// Built-in defaults; identical to the shipped config/env_constants.json.
const EnvConstants& default_constants();

EnvConstants load_constants(const std::string& path);
void save_constants(const EnvConstants& c, const std::string& path);

}  // namespace egrl::envs
