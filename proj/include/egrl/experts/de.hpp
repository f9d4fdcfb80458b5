#pragma once

#include "egrl/common.hpp"
#include "egrl/rng.hpp"

#include <functional>
#include <vector>

namespace egrl::experts {

struct DeOptions {
    int population_multiplier = 5;  // population = multiplier * dim
    int iterations = 30;
    double weight = 0.5;            // F
    double crossover = 0.9;         // CR
    enum class Strategy { best1bin, rand1bin };
    Strategy strategy = Strategy::best1bin;
};

struct DeResult {
    Vector best;
    double best_fitness = -std::numeric_limits<double>::infinity();
    std::vector<double> best_history;  // population best after each iteration
    long long evaluations = 0;
};

/// Differential evolution over a box, maximizing fitness. Mutants are clipped
/// into [lo, hi], so every evaluated candidate stays inside the bounds.
/// Selection is elitist; deterministic given the rng.
DeResult differential_evolution(const std::function<double(const Vector&)>& fitness,
                                const Vector& lo, const Vector& hi,
                                const DeOptions& opt, Rng& rng);

}  // namespace egrl::experts
