#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "egrl/envs/fourtank.hpp"
#include "egrl/experts/controllers.hpp"
#include "egrl/experts/de.hpp"
#include "egrl/experts/oscillator.hpp"
#include "egrl/experts/relay.hpp"
#include "egrl/experts/tuning.hpp"

#include <algorithm>

using namespace egrl;
using namespace egrl::experts;

namespace {

// First-order-plus-dead-time test plant G(s) = e^{-Ls}/(1 + Ts), exact
// zero-order-hold discretization with a delay buffer.
class FopdtLoop final : public SisoLoop {
public:
    FopdtLoop(double lag, double delay, double dt) : t_(lag), dt_(dt) {
        buf_.assign(static_cast<size_t>(delay / dt + 0.5), 0.0);
    }
    double sample_dt() const override { return dt_; }
    double seek(double) override {
        y_ = 0.0;
        std::fill(buf_.begin(), buf_.end(), 0.0);
        head_ = 0;
        return 0.0;
    }
    double read() const override { return y_; }
    void apply(double u) override {
        const double delayed = buf_[head_];
        buf_[head_] = u;
        head_ = (head_ + 1) % buf_.size();
        y_ = delayed + (y_ - delayed) * std::exp(-dt_ / t_);
    }

private:
    double t_, dt_, y_ = 0.0;
    std::vector<double> buf_;
    size_t head_ = 0;
};

class IntegratorLoop final : public SisoLoop {
public:
    explicit IntegratorLoop(double dt) : dt_(dt) {}
    double sample_dt() const override { return dt_; }
    double seek(double) override {
        y_ = 0.0;
        return 0.0;
    }
    double read() const override { return y_; }
    void apply(double u) override { y_ += u * dt_; }

private:
    double dt_, y_ = 0.0;
};

class DeadLoop final : public SisoLoop {  // zero gain: never oscillates
public:
    double sample_dt() const override { return 0.01; }
    double seek(double) override { return 0.0; }
    double read() const override { return 0.0; }
    void apply(double) override {}
};

// Frequency-domain oracle for the FOPDT ultimate point: the phase of
// e^{-jw}/(1+jw) hits -pi where w + atan(w) = pi.
struct UltimateOracle {
    double ku, tu;
};
UltimateOracle fopdt_ultimate_oracle() {
    double lo = 1.0, hi = 3.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid + std::atan(mid) < kPi ? lo : hi) = mid;
    }
    const double w = 0.5 * (lo + hi);
    return {std::sqrt(1.0 + w * w), 2.0 * kPi / w};
}

PidGains unsaturated(double kp, double ki, double kd, double tf = 0.0) {
    return {kp, ki, kd, tf, -1e9, 1e9};
}

}  // namespace

TEST_CASE("pid building blocks") {
    PidLoopState s;
    const PidGains g{2.0, 0.5, 1.0, 0.0, -1.0, 1.0};

    SUBCASE("zero error history, zero error: output 0 and state unchanged") {
        const double u = pid_step(g, s, 0.0, 0.1);
        CHECK(u == 0.0);
        CHECK(s.integral == 0.0);
        CHECK(s.d_filt == 0.0);
        CHECK(s.prev_error == 0.0);
    }

    SUBCASE("integral action strictly increases under constant positive error") {
        PidLoopState st;
        const PidGains gi = unsaturated(0.1, 1.0, 0.0);
        pid_step(gi, st, 0.5, 0.1);
        const double i1 = st.integral;
        pid_step(gi, st, 0.5, 0.1);
        const double i2 = st.integral;
        CHECK(i1 > 0.0);
        CHECK(i2 > i1);
    }

    SUBCASE("conditional integration freezes the integrator at saturation") {
        PidLoopState st;
        const PidGains gs{10.0, 1.0, 0.0, 0.0, -1.0, 1.0};
        pid_step(gs, st, 5.0, 0.1);  // deep saturation, error pushing further
        CHECK(st.integral == 0.0);
        pid_step(gs, st, -0.01, 0.1);  // error reverses: integration resumes
        CHECK(st.integral < 0.0);
    }
}

TEST_CASE("relay autotuning matches the FOPDT frequency-domain oracle") {
    const auto oracle = fopdt_ultimate_oracle();
    FopdtLoop plant(1.0, 1.0, 0.005);
    RelayConfig cfg;
    cfg.amplitude = 1.0;
    cfg.hysteresis = 1e-4;
    cfg.max_time = 300.0;
    const RelayResult r = relay_probe(plant, 0.0, cfg);
    REQUIRE(r.ok);
    CHECK(std::abs(r.ku / oracle.ku - 1.0) < 0.05);
    CHECK(std::abs(r.tu / oracle.tu - 1.0) < 0.05);
}

TEST_CASE("relay on a pure integrator: closed-form triangle-wave amplitude") {
    const double d = 1.0, hyst = 0.1, dt = 0.0005;
    IntegratorLoop plant(dt);
    RelayConfig cfg;
    cfg.amplitude = d;
    cfg.hysteresis = hyst;
    cfg.max_time = 50.0;
    const RelayResult r = relay_probe(plant, 0.0, cfg);
    REQUIRE(r.ok);
    // Symmetric triangle between the hysteresis bands: period 4*hyst/d, peak
    // hyst, fundamental Fourier amplitude 8*hyst/pi^2.
    CHECK(std::abs(r.tu / (4.0 * hyst / d) - 1.0) < 0.02);
    const double amp_oracle = 8.0 * hyst / (kPi * kPi);
    CHECK(std::abs(r.oscillation_amplitude / amp_oracle - 1.0) < 0.02);
    CHECK(r.ku == doctest::Approx(4.0 * d / (kPi * r.oscillation_amplitude)));
}

TEST_CASE("relay amplitude scale invariance on a linear plant") {
    auto run = [](double d) {
        FopdtLoop plant(1.0, 1.0, 0.005);
        RelayConfig cfg;
        cfg.amplitude = d;
        cfg.hysteresis = 1e-4 * d;  // hysteresis scales with the relay
        cfg.max_time = 300.0;
        return relay_probe(plant, 0.0, cfg);
    };
    const auto r1 = run(0.5);
    const auto r2 = run(1.0);
    REQUIRE(r1.ok);
    REQUIRE(r2.ok);
    CHECK(std::abs(r2.oscillation_amplitude / r1.oscillation_amplitude - 2.0) < 0.04);
    CHECK(std::abs(r2.ku / r1.ku - 1.0) < 0.02);
}

TEST_CASE("relay reports diagnostics when nothing oscillates") {
    DeadLoop plant;
    RelayConfig cfg;
    cfg.max_time = 5.0;
    const RelayResult r = relay_probe(plant, 0.0, cfg);
    CHECK_FALSE(r.ok);
    CHECK(r.message.find("no sustained oscillation") != std::string::npos);
}

TEST_CASE("relay rejects oscillations below the noise floor") {
    FopdtLoop plant(1.0, 1.0, 0.005);
    RelayConfig cfg;
    cfg.amplitude = 1.0;
    cfg.hysteresis = 1e-4;
    cfg.max_time = 300.0;
    cfg.min_amplitude = 10.0;  // any real cycle is far smaller
    const RelayResult r = relay_probe(plant, 0.0, cfg);
    CHECK_FALSE(r.ok);
    CHECK(r.message.find("below noise floor") != std::string::npos);
}

TEST_CASE("ultimate-point to PID gain mapping") {
    TuningRule rule;
    const PidGains g = gains_from_ultimate(2.0, 10.0, rule, -1.0, 1.0);
    CHECK(g.kp == doctest::Approx(0.9));
    CHECK(g.ki == doctest::Approx(0.9 / 8.3));
    CHECK(g.kd == doctest::Approx(0.9 * 1.25));
    CHECK(g.deriv_filter_tau == doctest::Approx(0.125));
}

TEST_CASE("differential evolution") {
    const Vector lo = Vector::Zero(13);
    const Vector hi = Vector::Ones(13);
    Vector target(13);
    for (int i = 0; i < 13; ++i) target[i] = 0.2 + 0.6 * i / 12.0;

    SUBCASE("reaches the synthetic quadratic optimum within 1e-3") {
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            Rng rng(seed);
            const auto res = differential_evolution(
                [&](const Vector& x) { return -(x - target).squaredNorm(); }, lo, hi, {}, rng);
            CHECK(res.best_fitness > -1e-3);
        }
    }

    SUBCASE("every evaluated candidate stays inside the box") {
        Rng rng(7);
        bool all_inside = true;
        differential_evolution(
            [&](const Vector& x) {
                all_inside = all_inside && (x.array() >= lo.array() - 1e-12).all() &&
                             (x.array() <= hi.array() + 1e-12).all();
                return -x.squaredNorm();
            },
            lo, hi, {}, rng);
        CHECK(all_inside);
    }

    SUBCASE("elitist: population best never degrades") {
        Rng rng(9);
        const auto res = differential_evolution(
            [&](const Vector& x) { return -(x - target).squaredNorm(); }, lo, hi, {}, rng);
        for (size_t i = 1; i < res.best_history.size(); ++i)
            CHECK(res.best_history[i] >= res.best_history[i - 1]);
        CHECK(res.best_fitness >= res.best_history.front());
    }
}

TEST_CASE("cpg expert") {
    SUBCASE("zero amplitudes give zero action regardless of phase") {
        CpgExpert cpg(2.0, std::vector<double>(6, 0.0), std::vector<double>(6, 1.0));
        Vector z(1);
        z[0] = 2.2;
        cpg.set_internal_state(z);
        CHECK(cpg.act(Vector::Zero(1), 0.01) == Vector::Zero(6));
    }
    SUBCASE("parameters clamp into the CPG box") {
        CpgExpert cpg(99.0, std::vector<double>(6, 2.0), std::vector<double>(6, -1.0));
        const auto p = cpg.parameters();
        CHECK(p[0] == CpgExpert::kFreqHi);
        CHECK(p[1] == 1.0);
        CHECK(p[7] == 0.0);
    }
    SUBCASE("phase advances deterministically") {
        CpgExpert a(1.0, std::vector<double>(6, 0.5), std::vector<double>(6, 0.0));
        CpgExpert b = a;
        for (int i = 0; i < 10; ++i) {
            CHECK(a.act(Vector::Zero(1), 0.02) == b.act(Vector::Zero(1), 0.02));
        }
        CHECK(a.internal_state() == b.internal_state());
    }
}

TEST_CASE("de_tune_cpg recovers the resonant frequency within 10%") {
    CpgTuneOptions opt;
    opt.return_seeds = 4;
    Rng rng(42);
    const GainFile g = de_tune_cpg(opt, rng);
    CHECK(std::abs(g.cpg_frequency_hz / opt.plant.natural_freq_hz - 1.0) < 0.10);
    for (size_t i = 1; i < g.de_fitness_history.size(); ++i)
        CHECK(g.de_fitness_history[i] >= g.de_fitness_history[i - 1]);
    CHECK(g.expert_return.mean > 0.0);
}

TEST_CASE("undertune") {
    CpgExpert proto(2.0, std::vector<double>(6, 0.5), std::vector<double>(6, 1.0));

    SUBCASE("sigma 0 is the identity") {
        Rng rng(1);
        const auto out = undertune(proto, 0.0, rng);
        CHECK(out->parameters() == proto.parameters());
    }
    SUBCASE("fixed rng reproduces the same perturbed gains") {
        Rng r1(5), r2(5);
        CHECK(undertune(proto, 0.3, r1)->parameters() == undertune(proto, 0.3, r2)->parameters());
    }
    SUBCASE("negative sigma rejected") {
        Rng rng(1);
        CHECK_THROWS_AS(undertune(proto, -0.5, rng), std::invalid_argument);
    }
    SUBCASE("lognormal multiplier has median 1 within 2%") {
        // One positive gain, many draws; amplitude 0.5 keeps exp() inside the
        // clamp so the ratio is the raw lognormal.
        std::vector<double> ratios;
        Rng rng(11);
        FourTankPidExpert pid({unsaturated(1.0, 0.1, 0.01), unsaturated(1.0, 0.1, 0.01)},
                              envs::default_constants().fourtank);
        const auto base = pid.parameters();
        for (int i = 0; i < 100000 / 6; ++i) {
            const auto p = undertune(pid, 0.5, rng)->parameters();
            for (size_t k = 0; k < p.size(); ++k) ratios.push_back(p[k] / base[k]);
        }
        std::nth_element(ratios.begin(), ratios.begin() + ratios.size() / 2, ratios.end());
        CHECK(std::abs(ratios[ratios.size() / 2] - 1.0) < 0.02);
    }
}

TEST_CASE("bias_action") {
    Vector a(2), b(2);
    a << 0.9, -1.0;
    b << 0.25, -0.5;
    const Vector out = bias_action(a, b);
    CHECK(out[0] == 1.0);
    CHECK(out[1] == -1.0);
    CHECK(bias_action(a, Vector::Zero(2)) == a);
}

TEST_CASE("gain file round-trips losslessly") {
    const auto& c = envs::default_constants();
    const GainFile g = tune_pid_expert("fourtank", c, []{
        PidTuneOptions o;
        o.return_seeds = 4;
        return o;
    }());
    const std::string once = g.to_json_string();
    const GainFile back = GainFile::from_json_string(once);
    CHECK(back.to_json_string() == once);
    CHECK(back.expert_return.mean == g.expert_return.mean);
    CHECK(back.loops.size() == 2);
    CHECK(back.operating_points.size() == 16);

    CHECK_THROWS_AS(make_expert("plane3dcircle", back), std::invalid_argument);
}

TEST_CASE("tuned fourtank expert: tracking, determinism, undertuning direction") {
    const auto& c = envs::default_constants();
    PidTuneOptions opt;
    opt.return_seeds = 8;
    const GainFile gains = tune_pid_expert("fourtank", c, opt);
    auto expert = make_expert("fourtank", gains);

    SUBCASE("steady-state tracked-level error < 5% at the nominal operating point") {
        const double sp = 12.0;
        auto eq0 = envs::fourtank::equilibrium(10.0, 10.0, c.fourtank);  // start away
        envs::fourtank::Levels h = eq0.levels;
        expert->reset();
        Vector obs(6);
        double err_sum = 0.0;
        int err_n = 0;
        for (int t = 0; t < 400; ++t) {
            obs << h[0], h[1], h[2], h[3], sp, sp;
            const Vector a = expert->act(obs, c.fourtank.dt);
            envs::fourtank::Pumps v(0.5 * (a[0] + 1.0) * c.fourtank.pump_max_volts,
                                    0.5 * (a[1] + 1.0) * c.fourtank.pump_max_volts);
            h = envs::fourtank::integrate_step(h, v, c.fourtank);
            if (t >= 350) {
                err_sum += std::abs(h[0] - sp) + std::abs(h[1] - sp);
                err_n += 2;
            }
        }
        CHECK(err_sum / err_n < 0.05 * sp);
    }

    SUBCASE("rollout return is a pure function of (seed, gains)") {
        auto env = envs::make_env("fourtank", c);
        auto e1 = make_expert("fourtank", gains);
        auto e2 = make_expert("fourtank", gains);
        CHECK(expert_rollout_return(*env, *e1, 3) == expert_rollout_return(*env, *e2, 3));
    }

    SUBCASE("undertuning at sigma 0.5 strictly degrades the mean return") {
        auto env = envs::make_env("fourtank", c);
        const std::uint64_t eval_seeds[] = {0, 1, 2};
        auto mean_return = [&](ExpertController& e) {
            double s = 0.0;
            for (auto sd : eval_seeds) s += expert_rollout_return(*env, e, sd);
            return s / 3.0;
        };
        const double clean = mean_return(*expert);
        double perturbed_sum = 0.0;
        const int draws = 20;
        for (int d = 0; d < draws; ++d) {
            Rng rng(derive_seed(static_cast<std::uint64_t>(d), "undertune.test"));
            auto bad = undertune(*expert, 0.5, rng);
            perturbed_sum += mean_return(*bad);
        }
        CHECK(perturbed_sum / draws < clean);
    }
}

TEST_CASE("random expert draws uniformly over the action box") {
    auto re = make_random_expert(2, 99);
    // chi-square over a 10x10 grid, 1e4 draws
    const int bins = 10, n = 10000;
    std::vector<int> counts(bins * bins, 0);
    for (int i = 0; i < n; ++i) {
        const Vector a = re->act(Vector::Zero(1), 1.0);
        const int bx = clip(static_cast<int>((a[0] + 1.0) / 2.0 * bins), 0, bins - 1);
        const int by = clip(static_cast<int>((a[1] + 1.0) / 2.0 * bins), 0, bins - 1);
        ++counts[static_cast<size_t>(bx * bins + by)];
        CHECK(re->internal_state() == a);  // z is the last action
    }
    const double expected = static_cast<double>(n) / (bins * bins);
    double chi2 = 0.0;
    for (int cnt : counts) chi2 += (cnt - expected) * (cnt - expected) / expected;
    // 99% quantile of chi-square with 99 dof (Wilson-Hilferty).
    const double k = 99.0, z = 2.3263478740408408;
    const double q99 = k * std::pow(1.0 - 2.0 / (9.0 * k) + z * std::sqrt(2.0 / (9.0 * k)), 3.0);
    CHECK(chi2 < q99);
}
