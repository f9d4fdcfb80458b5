#pragma once

#include "egrl/harness/config.hpp"
#include "egrl/integrate/method.hpp"

#include <array>
#include <string>
#include <vector>

namespace egrl::harness {

struct GateWindow {
    double p_max = 0.0;
    long long expert_picks = 0;
    long long steps = 0;
};

// Gate diagnostics logged per softmax-gate draw.
struct GateStats {
    double p_max = 0.0;
    double delta_max = -std::numeric_limits<double>::infinity();
    std::array<long long, 20> p_hist{};  // 20 uniform bins over [0,1]
    long long window_size = 1000;
    std::vector<GateWindow> windows;
    int decimation = 25;
    std::vector<std::array<double, 3>> samples;  // (p, b, delta) every `decimation` draws
    long long draws = 0;

    void log_draw(double p, bool expert, double delta);
    void finish_window();
};

// Per-seed training trace: self-describing, append-only while training.
struct RunRecord {
    int version = 1;
    std::string config_hash;
    std::string config_json;  // embedded full config
    std::string env;
    std::string method;
    std::uint64_t seed = 0;

    std::vector<long long> eval_steps;
    std::vector<double> eval_returns;  // mean over eval episodes
    std::vector<std::vector<double>> eval_episode_returns;

    double final_window_scalar = std::numeric_limits<double>::quiet_NaN();
    int final_window_evals = 0;

    GateStats gate;
    integrate::MechanismCounters counters;

    PerturbationSpec perturbation;
    // Unperturbed tuned-expert mean return (gain-file metadata): the only
    // J_exp any report may use.
    double expert_return_unperturbed = std::numeric_limits<double>::quiet_NaN();

    double wallclock_s = 0.0;
    std::string rng_provenance;
    bool aborted = false;
    std::string error;

    std::string to_json_string() const;
    static RunRecord from_json_string(const std::string& text);
    void save(const std::string& path) const;
    static RunRecord load(const std::string& path);
};

}  // namespace egrl::harness
