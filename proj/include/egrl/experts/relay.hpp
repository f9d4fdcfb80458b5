#pragma once

#include "egrl/common.hpp"
#include "egrl/experts/gain_file.hpp"

#include <functional>
#include <string>

namespace egrl::experts {

// One tunable SISO loop of a plant: all other actuators are held at their
// bias or driven by already-tuned controllers inside apply().
class SisoLoop {
public:
    virtual ~SisoLoop() = default;

    virtual double sample_dt() const = 0;

    /// Brings the plant to the operating point; returns the actuator bias
    /// that holds it there.
    virtual double seek(double operating_point) = 0;

    virtual double read() const = 0;

    /// Sets the loop actuator to an absolute value and advances one sample.
    virtual void apply(double actuator) = 0;
};

struct RelayConfig {
    double amplitude = 1.0;        // d, in actuator units
    double hysteresis = 0.0;       // in process-variable units
    int discard_switches = 5;
    int agree_half_periods = 4;    // consecutive half-periods that must agree
    double agree_tolerance = 0.05;
    int measure_periods = 2;       // Fourier window after agreement
    double max_time = 1e4;         // probe budget, s
    double min_amplitude = 1e-9;   // below this the oscillation is noise
};

struct RelayResult {
    bool ok = false;
    std::string message;
    double ku = 0.0;
    double tu = 0.0;
    double oscillation_amplitude = 0.0;
    int switch_count = 0;
};

/// Drives a bang-bang relay around the operating point, detects the sustained
/// limit cycle, and measures (K_u, T_u). The oscillation amplitude is the
/// fundamental Fourier component of the process variable at the cycle
/// frequency, measured over an integer number of periods; K_u = 4d / (pi a).
RelayResult relay_probe(SisoLoop& loop, double operating_point, const RelayConfig& cfg);

}  // namespace egrl::experts
