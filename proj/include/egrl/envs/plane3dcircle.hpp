#pragma once

#include "egrl/envs/env.hpp"

#include <Eigen/Core>

namespace egrl::envs::plane3d {

// Kinematic 3-DOF point-mass aircraft state:
// [x, y, z, airspeed, heading, climb_rate, bank]
using State = Eigen::Matrix<double, 7, 1>;
using Controls = Eigen::Vector3d;  // [throttle, stick, aileron] in [-1,1]

State rhs(const State& s, const Controls& u, const PlaneConstants& c);

/// One control interval; returns the state and whether the aircraft hit the
/// ground (z <= 0) during the interval.
struct IntegrateResult {
    State state;
    bool crashed = false;
};
IntegrateResult integrate_step(const State& s, const Controls& u, const PlaneConstants& c);

/// Reward: (altitude factor)^10 * (radial factor)^10, each factor in (0,1].
double reward(const State& s, double radius, const PlaneConstants& c);

/// Heading error to the counter-clockwise tangent of the circle through the
/// aircraft's current position, wrapped into (-pi, pi].
double tangent_heading_error(const State& s);

// Observation layout:
// [alt_err, climb_rate, airspeed, bank, radial_err, tangent_heading_err, radius]
inline constexpr int kObsDim = 7;

Vector observation(const State& s, double radius, const PlaneConstants& c);

std::unique_ptr<Env> make(const EnvConstants& c);

}  // namespace egrl::envs::plane3d
