#pragma once

#include "egrl/envs/env.hpp"

#include <Eigen/Core>

namespace egrl::envs::furnace {

using Temps = Eigen::Vector4d;
using Heat = Eigen::Vector4d;  // heater fractions in [0, 1]

/// Linear first-order zone thermals with chain coupling 1-2-3-4; diagonally
/// dominant and stable.
Temps rhs(const Temps& t, const Heat& u, const FurnaceConstants& c);

Temps integrate_step(const Temps& t, const Heat& u, const FurnaceConstants& c);

/// Heater fractions holding every zone at the same temperature (couplings
/// cancel for a uniform profile).
Heat uniform_equilibrium_heat(double temp, const FurnaceConstants& c);

double reward(const Temps& t, const Temps& sp, const FurnaceConstants& c);

// Observation layout: [T1..T4, sp1..sp4].
inline constexpr int kObsDim = 8;

std::unique_ptr<Env> make(const EnvConstants& c);

}  // namespace egrl::envs::furnace
