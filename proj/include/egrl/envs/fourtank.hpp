#pragma once

#include "egrl/envs/env.hpp"

#include <Eigen/Core>

namespace egrl::envs::fourtank {

using Levels = Eigen::Vector4d;
using Pumps = Eigen::Vector2d;

/// Quadruple-tank ODE right-hand side. Torricelli outflow sqrt(2 g h) per
/// tank plus pump and crossover inflows; pumps in volts.
Levels rhs(const Levels& h, const Pumps& v, const FourTankConstants& c);

/// Integrates one control interval (c.dt split into c.substeps RK4 steps),
/// clamping levels into [0, level_max] after every substep.
Levels integrate_step(const Levels& h, const Pumps& v, const FourTankConstants& c);

struct Equilibrium {
    Levels levels;
    Pumps pumps;
};

/// Solves the steady state for given lower-tank setpoints (linear 2x2 in the
/// pump flows, then upper levels from the crossover balance).
Equilibrium equilibrium(double sp1, double sp2, const FourTankConstants& c);

/// Mean of the two tracked-level tracking factors, in [0, 1].
double reward(const Levels& h, double sp1, double sp2, const FourTankConstants& c);

// Observation layout: [h1 h2 h3 h4 sp1 sp2].
inline constexpr int kObsDim = 6;

std::unique_ptr<Env> make(const EnvConstants& c);

}  // namespace egrl::envs::fourtank
