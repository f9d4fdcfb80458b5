#include "egrl/envs/plane3dcircle.hpp"

namespace egrl::envs::plane3d {

State rhs(const State& s, const Controls& u, const PlaneConstants& c) {
    const double v = s[3], psi = s[4], hdot = s[5], bank = s[6];
    const double v_cmd = c.v_min + 0.5 * (u[0] + 1.0) * (c.v_max - c.v_min);
    const double hdot_cmd = u[1] * c.hdot_max;
    const double bank_cmd = u[2] * c.bank_max;
    State d;
    d[0] = v * std::cos(psi);
    d[1] = v * std::sin(psi);
    d[2] = hdot;
    d[3] = (v_cmd - v) / c.tau_v;
    d[4] = c.gravity * std::tan(bank) / v;
    d[5] = (hdot_cmd - hdot) / c.tau_hdot;
    d[6] = (bank_cmd - bank) / c.tau_bank;
    return d;
}

IntegrateResult integrate_step(const State& s, const Controls& u, const PlaneConstants& c) {
    IntegrateResult r{s, false};
    const double dt = c.dt / c.substeps;
    for (int i = 0; i < c.substeps; ++i) {
        r.state = rk4_step(r.state, dt, [&](const State& x) { return rhs(x, u, c); });
        r.state[4] = wrap_angle(r.state[4]);
        r.state[6] = clip(r.state[6], -c.bank_max, c.bank_max);
        if (r.state[2] > c.altitude_ceiling) r.state[2] = c.altitude_ceiling;
        if (r.state[2] <= 0.0) {
            r.state[2] = 0.0;
            r.crashed = true;
            return r;
        }
    }
    return r;
}

double reward(const State& s, double radius, const PlaneConstants& c) {
    const double rho = std::hypot(s[0], s[1]);
    const double fa = tracking_factor(s[2] - c.altitude_target, c.altitude_scale);
    const double fr = tracking_factor(rho - radius, c.radial_scale);
    return std::pow(fa, 10.0) * std::pow(fr, 10.0);
}

double tangent_heading_error(const State& s) {
    const double theta = std::atan2(s[1], s[0]);
    return wrap_angle(theta + 0.5 * kPi - s[4]);
}

Vector observation(const State& s, double radius, const PlaneConstants& c) {
    const double rho = std::hypot(s[0], s[1]);
    Vector o(kObsDim);
    o << s[2] - c.altitude_target, s[5], s[3], s[6], rho - radius,
        tangent_heading_error(s), radius;
    return o;
}

namespace {

class PlaneEnv final : public Env {
public:
    explicit PlaneEnv(const EnvConstants& all) : c_(all.plane) {
        spec_.id = "plane3dcircle";
        spec_.action_dim = 3;
        spec_.obs_dim = kObsDim;
        spec_.horizon = 10000;
        spec_.reward_ceiling_per_step = 1.0;
        spec_.j_ref = spec_.reward_ceiling_per_step * spec_.horizon;
        spec_.terminating = true;
        spec_.control_dt = c_.dt;
    }

    const EnvSpec& spec() const override { return spec_; }

    Vector reset(std::uint64_t seed) override {
        Rng rng(derive_seed(seed, "plane3dcircle.reset"));
        radius_ = rng.uniform(c_.radius_lo, c_.radius_hi);
        const double theta0 = rng.uniform(0.0, 2.0 * kPi);
        const double rho0 = radius_ + rng.uniform(-c_.init_radial_offset, c_.init_radial_offset);
        s_[0] = rho0 * std::cos(theta0);
        s_[1] = rho0 * std::sin(theta0);
        s_[2] = c_.altitude_target +
                rng.uniform(-c_.init_altitude_offset, c_.init_altitude_offset);
        s_[3] = c_.cruise_speed;
        s_[4] = wrap_angle(theta0 + 0.5 * kPi +
                           rng.uniform(-c_.init_heading_offset, c_.init_heading_offset));
        s_[5] = 0.0;
        s_[6] = 0.0;
        step_ = 0;
        done_ = false;
        return observation(s_, radius_, c_);
    }

    StepResult step(const Vector& action) override {
        if (done_) throw std::runtime_error("plane3dcircle: step on done episode");
        if (action.size() != 3 || !all_finite(action))
            throw std::invalid_argument("plane3dcircle: action must be a finite 3-vector");
        const Vector a = clip_box(action);
        const IntegrateResult r = integrate_step(s_, Controls(a[0], a[1], a[2]), c_);
        s_ = r.state;
        ++step_;
        double rew;
        if (r.crashed) {
            done_ = true;
            rew = 0.0;
        } else {
            done_ = step_ >= spec_.horizon;
            rew = reward(s_, radius_, c_);
        }
        return {observation(s_, radius_, c_), rew, done_, r.crashed};
    }

    EnvState snapshot() const override {
        EnvState st;
        st.observation = observation(s_, radius_, c_);
        st.internal.resize(8);
        st.internal << s_[0], s_[1], s_[2], s_[3], s_[4], s_[5], s_[6], radius_;
        st.step_index = step_;
        st.done = done_;
        return st;
    }

private:
    PlaneConstants c_;
    EnvSpec spec_;
    State s_ = State::Zero();
    double radius_ = 0.0;
    int step_ = 0;
    bool done_ = true;
};

}  // namespace

std::unique_ptr<Env> make(const EnvConstants& c) { return std::make_unique<PlaneEnv>(c); }

}  // namespace egrl::envs::plane3d
