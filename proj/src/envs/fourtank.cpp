#include "egrl/envs/fourtank.hpp"

#include <Eigen/Dense>

namespace egrl::envs::fourtank {

Levels rhs(const Levels& h, const Pumps& v, const FourTankConstants& c) {
    Levels q;
    for (int i = 0; i < 4; ++i) {
        const double hi = std::max(h[i], 0.0);
        q[i] = c.orifice_area[static_cast<size_t>(i)] * std::sqrt(2.0 * c.gravity * hi);
    }
    const double f1 = c.pump_gain_1 * v[0];
    const double f2 = c.pump_gain_2 * v[1];
    Levels d;
    d[0] = (-q[0] + q[2] + c.valve_split_1 * f1) / c.tank_area[0];
    d[1] = (-q[1] + q[3] + c.valve_split_2 * f2) / c.tank_area[1];
    d[2] = (-q[2] + (1.0 - c.valve_split_2) * f2) / c.tank_area[2];
    d[3] = (-q[3] + (1.0 - c.valve_split_1) * f1) / c.tank_area[3];
    return d;
}

Levels integrate_step(const Levels& h, const Pumps& v, const FourTankConstants& c) {
    Levels x = h;
    const double dt = c.dt / c.substeps;
    for (int s = 0; s < c.substeps; ++s) {
        x = rk4_step(x, dt, [&](const Levels& y) { return rhs(y, v, c); });
        x = x.cwiseMax(0.0).cwiseMin(c.level_max);
    }
    return x;
}

Equilibrium equilibrium(double sp1, double sp2, const FourTankConstants& c) {
    const double q1 = c.orifice_area[0] * std::sqrt(2.0 * c.gravity * sp1);
    const double q2 = c.orifice_area[1] * std::sqrt(2.0 * c.gravity * sp2);
    Eigen::Matrix2d m;
    m << c.valve_split_1, 1.0 - c.valve_split_2,
         1.0 - c.valve_split_1, c.valve_split_2;
    const Eigen::Vector2d f = m.lu().solve(Eigen::Vector2d(q1, q2));  // pump flows k_i v_i
    Equilibrium eq;
    eq.pumps = Pumps(f[0] / c.pump_gain_1, f[1] / c.pump_gain_2);
    const double q3 = (1.0 - c.valve_split_2) * f[1];
    const double q4 = (1.0 - c.valve_split_1) * f[0];
    eq.levels[0] = sp1;
    eq.levels[1] = sp2;
    eq.levels[2] = q3 * q3 / (c.orifice_area[2] * c.orifice_area[2] * 2.0 * c.gravity);
    eq.levels[3] = q4 * q4 / (c.orifice_area[3] * c.orifice_area[3] * 2.0 * c.gravity);
    return eq;
}

double reward(const Levels& h, double sp1, double sp2, const FourTankConstants& c) {
    return 0.5 * (tracking_factor(h[0] - sp1, c.reward_scale) +
                  tracking_factor(h[1] - sp2, c.reward_scale));
}

namespace {

class FourTankEnv final : public Env {
public:
    explicit FourTankEnv(const EnvConstants& all) : c_(all.fourtank) {
        spec_.id = "fourtank";
        spec_.action_dim = 2;
        spec_.obs_dim = kObsDim;
        spec_.horizon = 500;
        spec_.reward_ceiling_per_step = 1.0;
        spec_.j_ref = spec_.reward_ceiling_per_step * spec_.horizon;
        spec_.terminating = false;
        spec_.control_dt = c_.dt;
    }

    const EnvSpec& spec() const override { return spec_; }

    Vector reset(std::uint64_t seed) override {
        Rng rng(derive_seed(seed, "fourtank.reset"));
        sp1_ = rng.uniform(c_.setpoint_lo, c_.setpoint_hi);
        sp2_ = rng.uniform(c_.setpoint_lo, c_.setpoint_hi);
        h_[0] = rng.uniform(c_.init_lower_lo, c_.init_lower_hi);
        h_[1] = rng.uniform(c_.init_lower_lo, c_.init_lower_hi);
        h_[2] = rng.uniform(c_.init_upper_lo, c_.init_upper_hi);
        h_[3] = rng.uniform(c_.init_upper_lo, c_.init_upper_hi);
        step_ = 0;
        done_ = false;
        return observation();
    }

    StepResult step(const Vector& action) override {
        if (done_) throw std::runtime_error("fourtank: step on done episode");
        if (action.size() != 2 || !all_finite(action))
            throw std::invalid_argument("fourtank: action must be a finite 2-vector");
        const Vector a = clip_box(action);
        Pumps v;
        v[0] = 0.5 * (a[0] + 1.0) * c_.pump_max_volts;
        v[1] = 0.5 * (a[1] + 1.0) * c_.pump_max_volts;
        h_ = integrate_step(h_, v, c_);
        ++step_;
        done_ = step_ >= spec_.horizon;
        return {observation(), reward(h_, sp1_, sp2_, c_), done_};
    }

    EnvState snapshot() const override {
        EnvState s;
        s.observation = observation();
        s.internal.resize(6);
        s.internal << h_[0], h_[1], h_[2], h_[3], sp1_, sp2_;
        s.step_index = step_;
        s.done = done_;
        return s;
    }

private:
    Vector observation() const {
        Vector o(kObsDim);
        o << h_[0], h_[1], h_[2], h_[3], sp1_, sp2_;
        return o;
    }

    FourTankConstants c_;
    EnvSpec spec_;
    Levels h_ = Levels::Zero();
    double sp1_ = 0.0, sp2_ = 0.0;
    int step_ = 0;
    bool done_ = true;
};

}  // namespace

std::unique_ptr<Env> make(const EnvConstants& c) { return std::make_unique<FourTankEnv>(c); }

}  // namespace egrl::envs::fourtank
