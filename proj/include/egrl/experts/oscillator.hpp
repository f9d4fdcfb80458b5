#pragma once

#include "egrl/common.hpp"
#include "egrl/experts/de.hpp"
#include "egrl/experts/gain_file.hpp"

namespace egrl::experts {

// Lightly damped resonator driven by the mean of the six CPG actuator
// channels. Episodic return peaks when the drive frequency matches the
// natural frequency, which makes it a compact stand-in for gait tuning.
struct OscillatorConstants {
    double natural_freq_hz = 2.0;
    double damping_ratio = 0.05;
    double dt = 0.01;
    int substeps = 2;
    int horizon = 500;
    double response_scale = 0.03;  // reward = x^2 / (x^2 + scale^2)
    double init_noise = 0.005;
};

/// Episodic return of a 13-parameter CPG vector on the resonator plant;
/// deterministic given the seed.
double oscillator_return(const Vector& cpg_params, std::uint64_t seed,
                         const OscillatorConstants& c = OscillatorConstants{});

struct CpgTuneOptions {
    DeOptions de;
    int seeds_per_eval = 8;
    int return_seeds = 16;  // seeds for the final J_exp measurement
    OscillatorConstants plant;
};

/// DE over the CPG box with fitness = mean episodic return over
/// seeds_per_eval fixed seeds. Returns the gain file for task "oscillator".
GainFile de_tune_cpg(const CpgTuneOptions& opt, Rng& rng);

}  // namespace egrl::experts
