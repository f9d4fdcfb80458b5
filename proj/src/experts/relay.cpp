#include "egrl/experts/relay.hpp"

#include <vector>

namespace egrl::experts {

PidGains gains_from_ultimate(double ku, double tu, const TuningRule& rule,
                             double u_min, double u_max) {
    PidGains g;
    g.kp = rule.kp_per_ku * ku;
    const double ti = rule.ti_per_tu * tu;
    const double td = rule.td_per_tu * tu;
    g.ki = ti > 0.0 ? g.kp / ti : 0.0;
    g.kd = g.kp * td;
    g.deriv_filter_tau = td / 10.0;
    g.u_min = u_min;
    g.u_max = u_max;
    return g;
}

RelayResult relay_probe(SisoLoop& loop, double operating_point, const RelayConfig& cfg) {
    RelayResult res;
    const double dt = loop.sample_dt();
    const double bias = loop.seek(operating_point);
    const double d = cfg.amplitude;

    bool high = true;
    std::vector<double> switch_times;
    std::vector<double> ys;
    ys.reserve(static_cast<size_t>(cfg.max_time / dt) + 1);
    double t = 0.0;

    const int need_switches = cfg.discard_switches + cfg.agree_half_periods + 1;

    while (t < cfg.max_time) {
        const double y = loop.read();
        const double e = operating_point - y;
        if (high && e < -cfg.hysteresis) {
            high = false;
            switch_times.push_back(t);
        } else if (!high && e > cfg.hysteresis) {
            high = true;
            switch_times.push_back(t);
        }
        loop.apply(bias + (high ? d : -d));
        t += dt;
        ys.push_back(y);

        if (static_cast<int>(switch_times.size()) >= need_switches) {
            const size_t n = switch_times.size();
            double mean_half = 0.0;
            for (int k = 0; k < cfg.agree_half_periods; ++k)
                mean_half += switch_times[n - 1 - k] - switch_times[n - 2 - k];
            mean_half /= cfg.agree_half_periods;
            bool agree = mean_half > 0.0;
            for (int k = 0; agree && k < cfg.agree_half_periods; ++k) {
                const double half = switch_times[n - 1 - k] - switch_times[n - 2 - k];
                agree = std::abs(half - mean_half) <= cfg.agree_tolerance * mean_half;
            }
            if (!agree) continue;

            const double tu = 2.0 * mean_half;
            // Integer number of periods covering at least 8 samples.
            int periods = cfg.measure_periods;
            while (periods * tu / dt < 8.0) ++periods;
            const size_t samples = static_cast<size_t>(periods * tu / dt + 0.5);
            if (samples > ys.size()) continue;

            double mean = 0.0;
            for (size_t k = ys.size() - samples; k < ys.size(); ++k) mean += ys[k];
            mean /= static_cast<double>(samples);

            const double w = 2.0 * kPi / tu;
            double cs = 0.0, sn = 0.0;
            for (size_t k = ys.size() - samples; k < ys.size(); ++k) {
                const double tk = (static_cast<double>(k) + 1.0) * dt;
                const double yk = ys[k] - mean;
                cs += yk * std::cos(w * tk);
                sn += yk * std::sin(w * tk);
            }
            const double amp = 2.0 / (static_cast<double>(samples) * dt) * std::hypot(cs, sn) * dt;
            if (amp < cfg.min_amplitude) {
                res.message = "oscillation amplitude below noise floor";
                res.switch_count = static_cast<int>(switch_times.size());
                return res;
            }
            res.ok = true;
            res.ku = 4.0 * d / (kPi * amp);
            res.tu = tu;
            res.oscillation_amplitude = amp;
            res.switch_count = static_cast<int>(switch_times.size());
            return res;
        }
    }

    res.message = "no sustained oscillation within the probe budget (switches=" +
                  std::to_string(switch_times.size()) + ", budget=" +
                  std::to_string(cfg.max_time) + "s)";
    res.switch_count = static_cast<int>(switch_times.size());
    return res;
}

}  // namespace egrl::experts
