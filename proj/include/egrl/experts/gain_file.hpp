#pragma once

#include "egrl/experts/expert.hpp"
#include "egrl/experts/pid.hpp"

namespace egrl::envs { struct EnvConstants; }

#include <string>
#include <vector>

namespace egrl::experts {

struct TuningRule {
    double kp_per_ku = 0.45;
    double ti_per_tu = 0.83;
    double td_per_tu = 0.125;
};

/// Maps a measured ultimate point to PID gains. The derivative term gets a
/// first-order filter at Td/10.
PidGains gains_from_ultimate(double ku, double tu, const TuningRule& rule,
                             double u_min, double u_max);

struct OperatingPointRecord {
    int loop = 0;
    double setpoint = 0.0;
    double ku = 0.0;
    double tu = 0.0;
    double oscillation_amplitude = 0.0;
};

struct ExpertReturnStats {
    double mean = std::numeric_limits<double>::quiet_NaN();
    int seeds = 0;
    std::vector<double> per_seed;
};

struct LoopGains {
    std::string name;
    PidGains gains;
};

// Versioned controller file with tuning provenance; round-trips losslessly
// through JSON.
struct GainFile {
    int version = 1;
    std::string task;
    std::string controller;  // "pid_loops" or "cpg"

    std::vector<LoopGains> loops;

    double cpg_frequency_hz = 0.0;
    std::vector<double> cpg_amplitudes;
    std::vector<double> cpg_phases;

    TuningRule rule;
    int n_operating_points = 0;
    int selected_operating_point = -1;
    std::vector<double> relay_amplitudes;  // one per loop
    std::vector<OperatingPointRecord> operating_points;
    std::vector<double> de_fitness_history;

    ExpertReturnStats expert_return;

    std::string to_json_string() const;
    static GainFile from_json_string(const std::string& text);
    void save(const std::string& path) const;
    static GainFile load(const std::string& path);
};

/// Builds the task's controller from a gain file. Throws if env_id does not
/// match the file's task.
std::unique_ptr<ExpertController> make_expert(const std::string& env_id, const GainFile& gains);
std::unique_ptr<ExpertController> make_expert(const std::string& env_id, const GainFile& gains,
                                              const envs::EnvConstants& constants);

}  // namespace egrl::experts
