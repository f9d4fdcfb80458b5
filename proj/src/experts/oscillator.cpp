#include "egrl/experts/oscillator.hpp"

#include "egrl/experts/controllers.hpp"
#include "egrl/rng.hpp"

namespace egrl::experts {

double oscillator_return(const Vector& cpg_params, std::uint64_t seed,
                         const OscillatorConstants& c) {
    if (cpg_params.size() != CpgExpert::kParamCount)
        throw std::invalid_argument("oscillator_return: need 13 CPG parameters");
    std::vector<double> p(cpg_params.data(), cpg_params.data() + cpg_params.size());
    CpgExpert cpg(p[0], {p.begin() + 1, p.begin() + 7}, {p.begin() + 7, p.end()});

    Rng rng(derive_seed(seed, "oscillator.reset"));
    const double wn = 2.0 * kPi * c.natural_freq_hz;
    Eigen::Vector2d s(rng.normal(0.0, c.init_noise), 0.0);  // [x, xdot]
    const Vector no_obs = Vector::Zero(1);
    double total = 0.0;
    const double sub_dt = c.dt / c.substeps;
    for (int t = 0; t < c.horizon; ++t) {
        const Vector a = cpg.act(no_obs, c.dt);
        const double force = a.mean();
        for (int k = 0; k < c.substeps; ++k) {
            s = rk4_step(s, sub_dt, [&](const Eigen::Vector2d& y) {
                return Eigen::Vector2d(y[1], -wn * wn * y[0] -
                                                 2.0 * c.damping_ratio * wn * y[1] + force);
            });
        }
        const double x2 = s[0] * s[0];
        total += x2 / (x2 + c.response_scale * c.response_scale);
    }
    return total;
}

GainFile de_tune_cpg(const CpgTuneOptions& opt, Rng& rng) {
    const Vector lo = CpgExpert::bounds_lo();
    const Vector hi = CpgExpert::bounds_hi();
    const auto fitness = [&](const Vector& params) {
        double sum = 0.0;
        for (int s = 0; s < opt.seeds_per_eval; ++s)
            sum += oscillator_return(params, static_cast<std::uint64_t>(s), opt.plant);
        return sum / opt.seeds_per_eval;
    };
    const DeResult de = differential_evolution(fitness, lo, hi, opt.de, rng);

    GainFile g;
    g.task = "oscillator";
    g.controller = "cpg";
    g.cpg_frequency_hz = de.best[0];
    g.cpg_amplitudes.assign(de.best.data() + 1, de.best.data() + 7);
    g.cpg_phases.assign(de.best.data() + 7, de.best.data() + 13);
    g.de_fitness_history = de.best_history;

    g.expert_return.seeds = opt.return_seeds;
    double sum = 0.0;
    for (int s = 0; s < opt.return_seeds; ++s) {
        const double r = oscillator_return(de.best, static_cast<std::uint64_t>(s), opt.plant);
        g.expert_return.per_seed.push_back(r);
        sum += r;
    }
    g.expert_return.mean = sum / opt.return_seeds;
    return g;
}

}  // namespace egrl::experts
