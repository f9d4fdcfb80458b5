#include "egrl/envs/glassfurnace.hpp"

namespace egrl::envs::furnace {

Temps rhs(const Temps& t, const Heat& u, const FurnaceConstants& c) {
    Temps d = -c.loss_rate * (t.array() - c.ambient).matrix() + c.heater_gain * u;
    for (int i = 0; i + 1 < c.zones; ++i) {
        const double flow = c.coupling * (t[i + 1] - t[i]);
        d[i] += flow;
        d[i + 1] -= flow;
    }
    return d;
}

Temps integrate_step(const Temps& t, const Heat& u, const FurnaceConstants& c) {
    Temps x = t;
    const double dt = c.dt / c.substeps;
    for (int s = 0; s < c.substeps; ++s) {
        x = rk4_step(x, dt, [&](const Temps& y) { return rhs(y, u, c); });
        x = x.cwiseMax(1.0);
    }
    return x;
}

Heat uniform_equilibrium_heat(double temp, const FurnaceConstants& c) {
    const double u = c.loss_rate * (temp - c.ambient) / c.heater_gain;
    return Heat::Constant(clip(u, 0.0, 1.0));
}

double reward(const Temps& t, const Temps& sp, const FurnaceConstants& c) {
    double r = 0.0;
    for (int i = 0; i < 4; ++i) r += tracking_factor(t[i] - sp[i], c.reward_scale);
    return r / 4.0;
}

namespace {

class FurnaceEnv final : public Env {
public:
    explicit FurnaceEnv(const EnvConstants& all) : c_(all.furnace) {
        spec_.id = "glassfurnace";
        spec_.action_dim = 4;
        spec_.obs_dim = kObsDim;
        spec_.horizon = 5760;
        spec_.reward_ceiling_per_step = 1.0;
        spec_.j_ref = spec_.reward_ceiling_per_step * spec_.horizon;
        spec_.terminating = false;
        spec_.control_dt = c_.dt;
    }

    const EnvSpec& spec() const override { return spec_; }

    Vector reset(std::uint64_t seed) override {
        sp_rng_ = Rng(derive_seed(seed, "glassfurnace.reset"));
        for (int i = 0; i < 4; ++i) sp_[i] = sp_rng_.uniform(c_.setpoint_lo, c_.setpoint_hi);
        for (int i = 0; i < 4; ++i) t_[i] = sp_rng_.uniform(c_.init_lo, c_.init_hi);
        step_ = 0;
        done_ = false;
        return observation();
    }

    StepResult step(const Vector& action) override {
        if (done_) throw std::runtime_error("glassfurnace: step on done episode");
        if (action.size() != 4 || !all_finite(action))
            throw std::invalid_argument("glassfurnace: action must be a finite 4-vector");
        const Vector a = clip_box(action);
        Heat u;
        for (int i = 0; i < 4; ++i) u[i] = 0.5 * (a[i] + 1.0);
        t_ = integrate_step(t_, u, c_);
        ++step_;
        // Seeded setpoint schedule: the tracked profile changes every
        // setpoint_interval steps.
        if (c_.setpoint_interval > 0 && step_ % c_.setpoint_interval == 0 &&
            step_ < spec_.horizon)
            for (int i = 0; i < 4; ++i) sp_[i] = sp_rng_.uniform(c_.setpoint_lo, c_.setpoint_hi);
        done_ = step_ >= spec_.horizon;
        return {observation(), reward(t_, sp_, c_), done_};
    }

    EnvState snapshot() const override {
        EnvState s;
        s.observation = observation();
        s.internal.resize(8);
        s.internal << t_[0], t_[1], t_[2], t_[3], sp_[0], sp_[1], sp_[2], sp_[3];
        s.step_index = step_;
        s.done = done_;
        return s;
    }

private:
    Vector observation() const {
        Vector o(kObsDim);
        o << t_[0], t_[1], t_[2], t_[3], sp_[0], sp_[1], sp_[2], sp_[3];
        return o;
    }

    FurnaceConstants c_;
    EnvSpec spec_;
    Rng sp_rng_{0};
    Temps t_ = Temps::Zero();
    Temps sp_ = Temps::Zero();
    int step_ = 0;
    bool done_ = true;
};

}  // namespace

std::unique_ptr<Env> make(const EnvConstants& c) { return std::make_unique<FurnaceEnv>(c); }

}  // namespace egrl::envs::furnace
