#include "egrl/experts/tuning.hpp"

#include "egrl/envs/fourtank.hpp"
#include "egrl/envs/glassfurnace.hpp"
#include "egrl/envs/plane3dcircle.hpp"
#include "egrl/experts/controllers.hpp"

namespace egrl::experts {

namespace {

using envs::EnvConstants;

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        v[static_cast<size_t>(i)] = lo + (hi - lo) * (n == 1 ? 0.5 : static_cast<double>(i) / (n - 1));
    return v;
}

struct LoopPlan {
    std::string name;
    double op_lo = 0.0, op_hi = 0.0;
    RelayConfig relay;
};

// Runs the operating-point sweep for one loop and appends provenance.
PidGains sweep_loop(SisoLoop& loop, int loop_index, const LoopPlan& plan,
                    const PidTuneOptions& opt, double u_min, double u_max, GainFile& out) {
    const auto ops = linspace(plan.op_lo, plan.op_hi, opt.n_operating_points);
    const int keep = (opt.n_operating_points - 1) / 2;
    PidGains selected;
    for (int i = 0; i < opt.n_operating_points; ++i) {
        const RelayResult r = relay_probe(loop, ops[static_cast<size_t>(i)], plan.relay);
        if (!r.ok)
            throw std::runtime_error("relay tuning failed for loop '" + plan.name +
                                     "' at operating point " +
                                     std::to_string(ops[static_cast<size_t>(i)]) + ": " + r.message);
        out.operating_points.push_back(
            {loop_index, ops[static_cast<size_t>(i)], r.ku, r.tu, r.oscillation_amplitude});
        if (i == keep) selected = gains_from_ultimate(r.ku, r.tu, opt.rule, u_min, u_max);
    }
    out.relay_amplitudes.push_back(plan.relay.amplitude);
    out.selected_operating_point = keep;
    return selected;
}

// --------------------------- FourTank loops --------------------------------

// Loop under tuning actuates one pump in volts; the other pump sits at its
// equilibrium bias or runs an already-tuned PID.
class TankLoop final : public SisoLoop {
public:
    TankLoop(const envs::FourTankConstants& c, int measured_tank, int actuator_pump,
             const PidGains* other_gains, int other_tank, int other_pump)
        : c_(c), measured_(measured_tank), pump_(actuator_pump),
          other_gains_(other_gains), other_tank_(other_tank), other_pump_(other_pump) {}

    double sample_dt() const override { return c_.dt; }

    double seek(double op) override {
        const auto eq = envs::fourtank::equilibrium(op, op, c_);
        h_ = eq.levels;
        bias_ = eq.pumps;
        op_ = op;
        other_state_.reset();
        return bias_[pump_];
    }

    double read() const override { return h_[measured_]; }

    void apply(double u) override {
        envs::fourtank::Pumps v = bias_;
        v[pump_] = clip(u, 0.0, c_.pump_max_volts);
        if (other_gains_ != nullptr) {
            const double e = op_ - h_[other_tank_];
            v[other_pump_] = pid_step(*other_gains_, other_state_, e, c_.dt);
        }
        h_ = envs::fourtank::integrate_step(h_, v, c_);
    }

private:
    envs::FourTankConstants c_;
    int measured_, pump_;
    const PidGains* other_gains_;
    int other_tank_, other_pump_;
    envs::fourtank::Levels h_ = envs::fourtank::Levels::Zero();
    envs::fourtank::Pumps bias_ = envs::fourtank::Pumps::Zero();
    PidLoopState other_state_;
    double op_ = 0.0;
};

GainFile tune_fourtank(const EnvConstants& all, const PidTuneOptions& opt) {
    const auto& c = all.fourtank;
    GainFile g;
    g.task = "fourtank";
    g.controller = "pid_loops";
    g.n_operating_points = opt.n_operating_points;
    g.rule = opt.rule;

    RelayConfig relay;
    relay.amplitude = 1.0;   // volts
    relay.hysteresis = 0.05; // cm
    relay.max_time = 40000.0;

    LoopPlan plan0{"h1_from_pump2", c.setpoint_lo, c.setpoint_hi, relay};
    TankLoop loop0(c, 0, 1, nullptr, 0, 0);
    const PidGains g0 = sweep_loop(loop0, 0, plan0, opt, 0.0, c.pump_max_volts, g);

    LoopPlan plan1{"h2_from_pump1", c.setpoint_lo, c.setpoint_hi, relay};
    TankLoop loop1(c, 1, 0, &g0, 0, 1);  // loop 0 closed while tuning loop 1
    const PidGains g1 = sweep_loop(loop1, 1, plan1, opt, 0.0, c.pump_max_volts, g);

    g.loops = {{plan0.name, g0}, {plan1.name, g1}};
    return g;
}

// ----------------------------- Plane loops ---------------------------------

// Shared plane trim-and-step core; each loop picks its actuator and readout.
class PlaneLoopBase : public SisoLoop {
public:
    explicit PlaneLoopBase(const envs::PlaneConstants& c) : c_(c) {}
    double sample_dt() const override { return c_.dt; }

protected:
    void trim(double altitude, double speed, double heading, double bank) {
        s_.setZero();
        s_[2] = altitude;
        s_[3] = speed;
        s_[4] = heading;
        s_[6] = bank;
    }
    void advance(const envs::plane3d::Controls& u) {
        s_ = envs::plane3d::integrate_step(s_, u, c_).state;
    }
    double throttle_for(double speed) const {
        return 2.0 * (speed - c_.v_min) / (c_.v_max - c_.v_min) - 1.0;
    }

    envs::PlaneConstants c_;
    envs::plane3d::State s_ = envs::plane3d::State::Zero();
};

class BankLoop final : public PlaneLoopBase {
public:
    using PlaneLoopBase::PlaneLoopBase;
    double seek(double op) override {
        trim(c_.altitude_target, c_.cruise_speed, 0.0, op);
        return op / c_.bank_max;
    }
    double read() const override { return s_[6]; }
    void apply(double u) override {
        advance({throttle_for(c_.cruise_speed), 0.0, clip(u, -1.0, 1.0)});
    }
};

class HeadingLoop final : public PlaneLoopBase {
public:
    HeadingLoop(const envs::PlaneConstants& c, const PidGains& bank_gains)
        : PlaneLoopBase(c), bank_gains_(bank_gains) {}
    double seek(double op) override {
        trim(c_.altitude_target, c_.cruise_speed, op, 0.0);
        bank_state_.reset();
        return 0.0;
    }
    double read() const override { return s_[4]; }
    void apply(double bank_cmd) override {
        bank_cmd = clip(bank_cmd, -c_.bank_max, c_.bank_max);
        const double ail = pid_step(bank_gains_, bank_state_, bank_cmd - s_[6], c_.dt);
        advance({throttle_for(c_.cruise_speed), 0.0, ail});
    }

private:
    PidGains bank_gains_;
    PidLoopState bank_state_;
};

class AltitudeLoop final : public PlaneLoopBase {
public:
    using PlaneLoopBase::PlaneLoopBase;
    double seek(double op) override {
        trim(op, c_.cruise_speed, 0.0, 0.0);
        return 0.0;
    }
    double read() const override { return s_[2]; }
    void apply(double stick) override {
        advance({throttle_for(c_.cruise_speed), clip(stick, -1.0, 1.0), 0.0});
    }
};

class AirspeedLoop final : public PlaneLoopBase {
public:
    using PlaneLoopBase::PlaneLoopBase;
    double seek(double op) override {
        trim(c_.altitude_target, op, 0.0, 0.0);
        return throttle_for(op);
    }
    double read() const override { return s_[3]; }
    void apply(double thr) override { advance({clip(thr, -1.0, 1.0), 0.0, 0.0}); }
};

GainFile tune_plane(const EnvConstants& all, const PidTuneOptions& opt) {
    const auto& c = all.plane;
    GainFile g;
    g.task = "plane3dcircle";
    g.controller = "pid_loops";
    g.n_operating_points = opt.n_operating_points;
    g.rule = opt.rule;

    // Cascade tuned inside-out: bank before heading.
    RelayConfig bank_relay;
    bank_relay.amplitude = 0.3;
    bank_relay.hysteresis = 0.002;
    bank_relay.max_time = 300.0;
    BankLoop bank_loop(c);
    const PidGains bank =
        sweep_loop(bank_loop, 1, {"bank_from_aileron", -0.5236, 0.5236, bank_relay}, opt, -1.0, 1.0, g);

    RelayConfig heading_relay;
    heading_relay.amplitude = 0.3;  // bank command, rad
    heading_relay.hysteresis = 0.002;
    heading_relay.max_time = 600.0;
    HeadingLoop heading_loop(c, bank);
    const PidGains heading = sweep_loop(heading_loop, 0, {"heading_from_bank_cmd", -1.5, 1.5, heading_relay},
                                        opt, -c.bank_max, c.bank_max, g);

    RelayConfig alt_relay;
    alt_relay.amplitude = 0.5;
    alt_relay.hysteresis = 0.02;
    alt_relay.max_time = 900.0;
    AltitudeLoop alt_loop(c);
    const PidGains alt =
        sweep_loop(alt_loop, 2, {"altitude_from_stick", 80.0, 120.0, alt_relay}, opt, -1.0, 1.0, g);

    RelayConfig spd_relay;
    spd_relay.amplitude = 0.3;
    spd_relay.hysteresis = 0.01;
    spd_relay.max_time = 600.0;
    AirspeedLoop spd_loop(c);
    const PidGains spd =
        sweep_loop(spd_loop, 3, {"airspeed_from_throttle", 20.0, 30.0, spd_relay}, opt, -1.0, 1.0, g);

    g.loops = {{"heading_from_bank_cmd", heading},
               {"bank_from_aileron", bank},
               {"altitude_from_stick", alt},
               {"airspeed_from_throttle", spd}};
    return g;
}

// ---------------------------- Furnace loops --------------------------------

class FurnaceLoop final : public SisoLoop {
public:
    FurnaceLoop(const envs::FurnaceConstants& c, int zone, const std::vector<PidGains>& closed)
        : c_(c), zone_(zone), closed_(closed), closed_state_(closed.size()) {}

    double sample_dt() const override { return c_.dt; }

    double seek(double op) override {
        t_ = envs::furnace::Temps::Constant(op);
        bias_ = envs::furnace::uniform_equilibrium_heat(op, c_);
        op_ = op;
        for (auto& s : closed_state_) s.reset();
        return bias_[zone_];
    }

    double read() const override { return t_[zone_]; }

    void apply(double u) override {
        envs::furnace::Heat heat = bias_;
        heat[zone_] = clip(u, 0.0, 1.0);
        for (size_t z = 0; z < closed_.size(); ++z)
            heat[static_cast<int>(z)] =
                pid_step(closed_[z], closed_state_[z], op_ - t_[static_cast<int>(z)], c_.dt);
        t_ = envs::furnace::integrate_step(t_, heat, c_);
    }

private:
    envs::FurnaceConstants c_;
    int zone_;
    std::vector<PidGains> closed_;
    std::vector<PidLoopState> closed_state_;
    envs::furnace::Temps t_ = envs::furnace::Temps::Zero();
    envs::furnace::Heat bias_ = envs::furnace::Heat::Zero();
    double op_ = 0.0;
};

GainFile tune_furnace(const EnvConstants& all, const PidTuneOptions& opt) {
    const auto& c = all.furnace;
    GainFile g;
    g.task = "glassfurnace";
    g.controller = "pid_loops";
    g.n_operating_points = opt.n_operating_points;
    g.rule = opt.rule;

    RelayConfig relay;
    relay.amplitude = 0.1;   // heater fraction
    relay.hysteresis = 0.5;  // K
    relay.max_time = 500000.0;

    std::vector<PidGains> done;
    for (int z = 0; z < 4; ++z) {
        FurnaceLoop loop(c, z, done);
        const std::string name = "zone" + std::to_string(z + 1) + "_temp";
        done.push_back(sweep_loop(loop, z, {name, c.setpoint_lo, c.setpoint_hi, relay}, opt, 0.0, 1.0, g));
        g.loops.push_back({name, done.back()});
    }
    return g;
}

}  // namespace

double expert_rollout_return(envs::Env& env, ExpertController& expert, std::uint64_t seed) {
    Vector obs = env.reset(seed);
    expert.reset();
    const double dt = env.spec().control_dt;
    double total = 0.0;
    const int horizon = env.spec().horizon;
    for (int t = 0; t < horizon; ++t) {
        const Vector a = expert.act(obs, dt);
        const auto r = env.step(a.head(env.spec().action_dim));
        total += r.reward;
        obs = r.observation;
        if (r.done) break;
    }
    return total;
}

GainFile tune_pid_expert(const std::string& env_id, const EnvConstants& c, const PidTuneOptions& opt) {
    GainFile g;
    if (env_id == "fourtank") {
        g = tune_fourtank(c, opt);
    } else if (env_id == "plane3dcircle") {
        g = tune_plane(c, opt);
    } else if (env_id == "glassfurnace") {
        g = tune_furnace(c, opt);
    } else {
        throw std::invalid_argument("tune_pid_expert: unknown env id: " + env_id);
    }

    auto env = envs::make_env(env_id, c);
    auto expert = make_expert(env_id, g);
    g.expert_return.seeds = opt.return_seeds;
    double sum = 0.0;
    for (int s = 0; s < opt.return_seeds; ++s) {
        const double r = expert_rollout_return(*env, *expert, static_cast<std::uint64_t>(s));
        g.expert_return.per_seed.push_back(r);
        sum += r;
    }
    g.expert_return.mean = sum / opt.return_seeds;
    return g;
}

}  // namespace egrl::experts
