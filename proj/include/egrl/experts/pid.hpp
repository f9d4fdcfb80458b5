#pragma once

#include "egrl/common.hpp"

namespace egrl::experts {

struct PidGains {
    double kp = 0.0;
    double ki = 0.0;
    double kd = 0.0;
    double deriv_filter_tau = 0.0;  // first-order filter on the error derivative
    double u_min = -1.0;
    double u_max = 1.0;
};

// Per-loop state exposed through z: [integral, d_filt, prev_error].
struct PidLoopState {
    double integral = 0.0;   // accumulates ki * e * dt
    double d_filt = 0.0;
    double prev_error = 0.0;

    static constexpr int kDim = 3;

    void reset() { *this = PidLoopState{}; }

    void write(double* out) const {
        out[0] = integral;
        out[1] = d_filt;
        out[2] = prev_error;
    }
    void read(const double* in) {
        integral = in[0];
        d_filt = in[1];
        prev_error = in[2];
    }
};

/// One PID update with filtered error derivative and conditional-integration
/// anti-windup (the integrator freezes while the output saturates in the
/// error's direction). Returns the saturated output.
inline double pid_step(const PidGains& g, PidLoopState& s, double error, double dt) {
    const double d_raw = (error - s.prev_error) / dt;
    if (g.deriv_filter_tau > 0.0) {
        s.d_filt += dt / (g.deriv_filter_tau + dt) * (d_raw - s.d_filt);
    } else {
        s.d_filt = d_raw;
    }
    const double unsat = g.kp * error + s.integral + g.kd * s.d_filt;
    const double u = clip(unsat, g.u_min, g.u_max);
    const bool windup = (unsat > g.u_max && error > 0.0) || (unsat < g.u_min && error < 0.0);
    if (!windup) s.integral += g.ki * error * dt;
    s.prev_error = error;
    return u;
}

}  // namespace egrl::experts
