#pragma once

#include "egrl/harness/trainer.hpp"

namespace egrl::harness {

// Degradation/comparison sweep: methods x sigmas x seeds over one base
// config. Undertuning perturbs the training-time expert; action bias and
// observation noise apply at deployment evaluation.
struct SweepSpec {
    RunConfig base;
    std::vector<std::string> methods;
    std::string perturbation_type = "none";
    std::vector<double> sigmas = {0.0};

    long long cell_count() const {
        return static_cast<long long>(methods.size()) * static_cast<long long>(sigmas.size()) *
               static_cast<long long>(base.seeds.size());
    }

    std::string to_json_string() const;
    static SweepSpec from_json_string(const std::string& text);
    static SweepSpec load(const std::string& path);
};

struct SweepError {
    std::string method;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string message;
};

struct SweepOutcome {
    std::vector<RunRecord> records;
    std::vector<SweepError> errors;
};

/// Runs every cell; failures become error entries and the sweep continues.
/// Cells are independent, so jobs > 1 runs them on a thread pool.
SweepOutcome run_sweep(const SweepSpec& spec, int jobs = 1);

}  // namespace egrl::harness
