#pragma once

#include "egrl/envs/constants.hpp"
#include "egrl/experts/expert.hpp"
#include "egrl/experts/pid.hpp"

#include <array>
#include <string>
#include <vector>

namespace egrl::experts {

// Shared machinery for the per-task PID controller stacks. Loop state is
// exposed as z = [loop0.integral, loop0.d_filt, loop0.prev_error, loop0.primed,
// loop1..., ...].
class MultiLoopPidExpert : public ExpertController {
public:
    explicit MultiLoopPidExpert(std::vector<PidGains> gains);

    int state_dim() const override { return static_cast<int>(loops_.size()) * PidLoopState::kDim; }
    Vector internal_state() const override;
    void set_internal_state(const Vector& z) override;
    void reset() override;

    std::vector<double> parameters() const override;
    void set_parameters(const std::vector<double>& p) override;

    const std::vector<PidGains>& gains() const { return gains_; }

protected:
    double run_loop(size_t loop, double error, double dt) {
        return pid_step(gains_[loop], loops_[loop], error, dt);
    }

    std::vector<PidGains> gains_;
    std::vector<PidLoopState> loops_;
};

// Loop 0 tracks h1 with pump 2, loop 1 tracks h2 with pump 1 (the crossover
// paths carry the dominant steady-state gain in the non-minimum-phase valve
// setting).
class FourTankPidExpert final : public MultiLoopPidExpert {
public:
    FourTankPidExpert(std::vector<PidGains> gains, const envs::FourTankConstants& c);
    int action_dim() const override { return 2; }
    Vector act(const Vector& obs, double dt) override;
    std::unique_ptr<ExpertController> clone() const override;

private:
    envs::FourTankConstants c_;
};

// Loops: [heading, bank, altitude, airspeed]. The heading loop tracks the
// rotating tangent reference directly; radius is not actively controlled.
class PlanePidExpert final : public MultiLoopPidExpert {
public:
    PlanePidExpert(std::vector<PidGains> gains, const envs::PlaneConstants& c);
    int action_dim() const override { return 3; }
    Vector act(const Vector& obs, double dt) override;
    std::unique_ptr<ExpertController> clone() const override;

private:
    envs::PlaneConstants c_;
};

// One loop per heating zone.
class FurnacePidExpert final : public MultiLoopPidExpert {
public:
    FurnacePidExpert(std::vector<PidGains> gains, const envs::FurnaceConstants& c);
    int action_dim() const override { return 4; }
    Vector act(const Vector& obs, double dt) override;
    std::unique_ptr<ExpertController> clone() const override;

private:
    envs::FurnaceConstants c_;
};

// Open-loop sinusoid bank: action_i = amp_i * sin(phase_z + phase_i), with
// the shared phase advancing 2*pi*f*dt per call. z = [phase].
class CpgExpert final : public ExpertController {
public:
    static constexpr double kFreqLo = 0.5, kFreqHi = 5.0;
    static constexpr int kActuators = 6;
    static constexpr int kParamCount = 1 + 2 * kActuators;

    CpgExpert(double frequency_hz, std::vector<double> amplitudes, std::vector<double> phases);

    int action_dim() const override { return kActuators; }
    int state_dim() const override { return 1; }
    Vector internal_state() const override;
    void set_internal_state(const Vector& z) override;
    Vector act(const Vector& obs, double dt) override;
    void reset() override { phase_ = 0.0; }
    std::unique_ptr<ExpertController> clone() const override;

    std::vector<double> parameters() const override;
    /// Clamps into the CPG box: f in [0.5, 5] Hz, amplitudes in [0, 1],
    /// phases in [0, 2*pi].
    void set_parameters(const std::vector<double>& p) override;

    static Vector bounds_lo();
    static Vector bounds_hi();

private:
    double freq_ = 1.0;
    std::array<double, kActuators> amp_{};
    std::array<double, kActuators> pha_{};
    double phase_ = 0.0;
};

}  // namespace egrl::experts
