#include "egrl/experts/de.hpp"

namespace egrl::experts {

DeResult differential_evolution(const std::function<double(const Vector&)>& fitness,
                                const Vector& lo, const Vector& hi,
                                const DeOptions& opt, Rng& rng) {
    if (lo.size() != hi.size() || lo.size() == 0)
        throw std::invalid_argument("differential_evolution: bad bounds");
    const int dim = static_cast<int>(lo.size());
    const int npop = std::max(4, opt.population_multiplier * dim);

    std::vector<Vector> pop(static_cast<size_t>(npop));
    std::vector<double> fit(static_cast<size_t>(npop));
    DeResult res;
    for (int i = 0; i < npop; ++i) {
        Vector x(dim);
        for (int j = 0; j < dim; ++j) x[j] = rng.uniform(lo[j], hi[j]);
        pop[static_cast<size_t>(i)] = x;
        fit[static_cast<size_t>(i)] = fitness(x);
        ++res.evaluations;
    }

    auto best_index = [&] {
        size_t b = 0;
        for (size_t i = 1; i < fit.size(); ++i)
            if (fit[i] > fit[b]) b = i;
        return b;
    };

    for (int it = 0; it < opt.iterations; ++it) {
        for (int i = 0; i < npop; ++i) {
            const size_t best = best_index();  // refreshed as trials land
            // three distinct indices, none equal to i
            int r[3];
            for (int k = 0; k < 3; ++k) {
                int idx;
                bool dup;
                do {
                    idx = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(npop)));
                    dup = idx == i;
                    for (int m = 0; m < k; ++m) dup = dup || idx == r[m];
                } while (dup);
                r[k] = idx;
            }
            const Vector& base = opt.strategy == DeOptions::Strategy::best1bin
                                     ? pop[best]
                                     : pop[static_cast<size_t>(r[0])];
            Vector mutant = base + opt.weight * (pop[static_cast<size_t>(r[1])] -
                                                 pop[static_cast<size_t>(r[2])]);
            for (int j = 0; j < dim; ++j) mutant[j] = clip(mutant[j], lo[j], hi[j]);

            Vector trial = pop[static_cast<size_t>(i)];
            const int j_rand = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(dim)));
            for (int j = 0; j < dim; ++j)
                if (j == j_rand || rng.uniform() < opt.crossover) trial[j] = mutant[j];

            const double f = fitness(trial);
            ++res.evaluations;
            if (f >= fit[static_cast<size_t>(i)]) {
                pop[static_cast<size_t>(i)] = trial;
                fit[static_cast<size_t>(i)] = f;
            }
        }
        res.best_history.push_back(fit[best_index()]);
    }

    const size_t b = best_index();
    res.best = pop[b];
    res.best_fitness = fit[b];
    return res;
}

}  // namespace egrl::experts
