#include "egrl/experts/controllers.hpp"

namespace egrl::experts {

MultiLoopPidExpert::MultiLoopPidExpert(std::vector<PidGains> gains)
    : gains_(std::move(gains)), loops_(gains_.size()) {}

Vector MultiLoopPidExpert::internal_state() const {
    Vector z(state_dim());
    for (size_t i = 0; i < loops_.size(); ++i) loops_[i].write(z.data() + i * PidLoopState::kDim);
    return z;
}

void MultiLoopPidExpert::set_internal_state(const Vector& z) {
    if (z.size() != state_dim())
        throw std::invalid_argument("pid expert: internal state dimension mismatch");
    for (size_t i = 0; i < loops_.size(); ++i) loops_[i].read(z.data() + i * PidLoopState::kDim);
}

void MultiLoopPidExpert::reset() {
    for (auto& l : loops_) l.reset();
}

std::vector<double> MultiLoopPidExpert::parameters() const {
    std::vector<double> p;
    p.reserve(gains_.size() * 3);
    for (const auto& g : gains_) {
        p.push_back(g.kp);
        p.push_back(g.ki);
        p.push_back(g.kd);
    }
    return p;
}

void MultiLoopPidExpert::set_parameters(const std::vector<double>& p) {
    if (p.size() != gains_.size() * 3)
        throw std::invalid_argument("pid expert: parameter count mismatch");
    for (size_t i = 0; i < gains_.size(); ++i) {
        gains_[i].kp = p[3 * i];
        gains_[i].ki = p[3 * i + 1];
        gains_[i].kd = p[3 * i + 2];
    }
}

// ---------------------------------------------------------------------------

FourTankPidExpert::FourTankPidExpert(std::vector<PidGains> gains, const envs::FourTankConstants& c)
    : MultiLoopPidExpert(std::move(gains)), c_(c) {
    if (gains_.size() != 2) throw std::invalid_argument("fourtank expert needs 2 loops");
}

Vector FourTankPidExpert::act(const Vector& obs, double dt) {
    if (obs.size() != 6 || !all_finite(obs))
        throw std::invalid_argument("fourtank expert: bad observation");
    const double v2 = run_loop(0, obs[4] - obs[0], dt);  // h1 <- pump 2
    const double v1 = run_loop(1, obs[5] - obs[1], dt);  // h2 <- pump 1
    Vector a(2);
    a[0] = 2.0 * v1 / c_.pump_max_volts - 1.0;
    a[1] = 2.0 * v2 / c_.pump_max_volts - 1.0;
    return clip_box(a);
}

std::unique_ptr<ExpertController> FourTankPidExpert::clone() const {
    return std::make_unique<FourTankPidExpert>(*this);
}

// ---------------------------------------------------------------------------

PlanePidExpert::PlanePidExpert(std::vector<PidGains> gains, const envs::PlaneConstants& c)
    : MultiLoopPidExpert(std::move(gains)), c_(c) {
    if (gains_.size() != 4) throw std::invalid_argument("plane expert needs 4 loops");
}

Vector PlanePidExpert::act(const Vector& obs, double dt) {
    if (obs.size() != 7 || !all_finite(obs))
        throw std::invalid_argument("plane expert: bad observation");
    const double alt_err = obs[0], airspeed = obs[2], bank = obs[3], chi_err = obs[5];
    const double bank_cmd = run_loop(0, chi_err, dt);           // heading -> bank command
    const double aileron = run_loop(1, bank_cmd - bank, dt);    // bank -> aileron
    const double stick = run_loop(2, -alt_err, dt);             // altitude -> stick
    const double throttle = run_loop(3, c_.cruise_speed - airspeed, dt);
    Vector a(3);
    a << throttle, stick, aileron;
    return clip_box(a);
}

std::unique_ptr<ExpertController> PlanePidExpert::clone() const {
    return std::make_unique<PlanePidExpert>(*this);
}

// ---------------------------------------------------------------------------

FurnacePidExpert::FurnacePidExpert(std::vector<PidGains> gains, const envs::FurnaceConstants& c)
    : MultiLoopPidExpert(std::move(gains)), c_(c) {
    if (gains_.size() != 4) throw std::invalid_argument("furnace expert needs 4 loops");
}

Vector FurnacePidExpert::act(const Vector& obs, double dt) {
    if (obs.size() != 8 || !all_finite(obs))
        throw std::invalid_argument("furnace expert: bad observation");
    Vector a(4);
    for (int i = 0; i < 4; ++i) {
        const double u = run_loop(static_cast<size_t>(i), obs[4 + i] - obs[i], dt);
        a[i] = 2.0 * u - 1.0;
    }
    return clip_box(a);
}

std::unique_ptr<ExpertController> FurnacePidExpert::clone() const {
    return std::make_unique<FurnacePidExpert>(*this);
}

// ---------------------------------------------------------------------------

CpgExpert::CpgExpert(double frequency_hz, std::vector<double> amplitudes, std::vector<double> phases) {
    std::vector<double> p;
    p.push_back(frequency_hz);
    p.insert(p.end(), amplitudes.begin(), amplitudes.end());
    p.insert(p.end(), phases.begin(), phases.end());
    set_parameters(p);
}

Vector CpgExpert::internal_state() const {
    Vector z(1);
    z[0] = phase_;
    return z;
}

void CpgExpert::set_internal_state(const Vector& z) {
    if (z.size() != 1) throw std::invalid_argument("cpg expert: internal state dimension mismatch");
    phase_ = z[0];
}

Vector CpgExpert::act(const Vector&, double dt) {
    Vector a(kActuators);
    for (int i = 0; i < kActuators; ++i)
        a[i] = amp_[static_cast<size_t>(i)] * std::sin(phase_ + pha_[static_cast<size_t>(i)]);
    phase_ = std::fmod(phase_ + 2.0 * kPi * freq_ * dt, 2.0 * kPi);
    return clip_box(a);
}

std::unique_ptr<ExpertController> CpgExpert::clone() const {
    return std::make_unique<CpgExpert>(*this);
}

std::vector<double> CpgExpert::parameters() const {
    std::vector<double> p(kParamCount);
    p[0] = freq_;
    for (int i = 0; i < kActuators; ++i) {
        p[static_cast<size_t>(1 + i)] = amp_[static_cast<size_t>(i)];
        p[static_cast<size_t>(1 + kActuators + i)] = pha_[static_cast<size_t>(i)];
    }
    return p;
}

void CpgExpert::set_parameters(const std::vector<double>& p) {
    if (p.size() != kParamCount) throw std::invalid_argument("cpg expert: need 13 parameters");
    freq_ = clip(p[0], kFreqLo, kFreqHi);
    for (int i = 0; i < kActuators; ++i) {
        amp_[static_cast<size_t>(i)] = clip(p[static_cast<size_t>(1 + i)], 0.0, 1.0);
        pha_[static_cast<size_t>(i)] = clip(p[static_cast<size_t>(1 + kActuators + i)], 0.0, 2.0 * kPi);
    }
}

Vector CpgExpert::bounds_lo() {
    Vector lo(kParamCount);
    lo[0] = kFreqLo;
    for (int i = 0; i < kActuators; ++i) {
        lo[1 + i] = 0.0;
        lo[1 + kActuators + i] = 0.0;
    }
    return lo;
}

Vector CpgExpert::bounds_hi() {
    Vector hi(kParamCount);
    hi[0] = kFreqHi;
    for (int i = 0; i < kActuators; ++i) {
        hi[1 + i] = 1.0;
        hi[1 + kActuators + i] = 2.0 * kPi;
    }
    return hi;
}

}  // namespace egrl::experts
