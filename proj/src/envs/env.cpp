#include "egrl/envs/env.hpp"

#include "egrl/envs/fourtank.hpp"
#include "egrl/envs/glassfurnace.hpp"
#include "egrl/envs/plane3dcircle.hpp"

namespace egrl::envs {

namespace {

// 1-D integrator with quadratic reward, used for learning smoke tests and
// frozen-critic toys.
class Integrator1dEnv final : public Env {
public:
    explicit Integrator1dEnv(const EnvConstants& all) : c_(all.integrator) {
        spec_.id = "integrator1d";
        spec_.action_dim = 1;
        spec_.obs_dim = 1;
        spec_.horizon = c_.horizon;
        spec_.reward_ceiling_per_step = 1.0;
        spec_.j_ref = spec_.reward_ceiling_per_step * spec_.horizon;
        spec_.terminating = false;
    }

    const EnvSpec& spec() const override { return spec_; }

    Vector reset(std::uint64_t seed) override {
        Rng rng(derive_seed(seed, "integrator1d.reset"));
        x_ = rng.uniform(-c_.init_range, c_.init_range);
        step_ = 0;
        done_ = false;
        return obs();
    }

    StepResult step(const Vector& action) override {
        if (done_) throw std::runtime_error("integrator1d: step on done episode");
        if (action.size() != 1 || !all_finite(action))
            throw std::invalid_argument("integrator1d: action must be a finite scalar");
        const double a = clip(action[0], -1.0, 1.0);
        x_ = clip(x_ + c_.step_gain * a, -c_.x_limit, c_.x_limit);
        ++step_;
        done_ = step_ >= spec_.horizon;
        return {obs(), std::max(0.0, 1.0 - x_ * x_), done_};
    }

    EnvState snapshot() const override {
        EnvState s;
        s.observation = obs();
        s.internal = obs();
        s.step_index = step_;
        s.done = done_;
        return s;
    }

private:
    Vector obs() const {
        Vector o(1);
        o[0] = x_;
        return o;
    }

    Integrator1dConstants c_;
    EnvSpec spec_;
    double x_ = 0.0;
    int step_ = 0;
    bool done_ = true;
};

}  // namespace

std::unique_ptr<Env> make_env(const std::string& env_id, const EnvConstants& c) {
    if (env_id == "fourtank") return fourtank::make(c);
    if (env_id == "plane3dcircle") return plane3d::make(c);
    if (env_id == "glassfurnace") return furnace::make(c);
    if (env_id == "integrator1d") return std::make_unique<Integrator1dEnv>(c);
    throw std::invalid_argument("unknown env id: " + env_id);
}

Vector perturb_observation(const Vector& obs, double sigma, Rng& rng) {
    if (sigma < 0.0) throw std::invalid_argument("perturb_observation: sigma must be >= 0");
    if (sigma == 0.0) return obs;
    return obs + sigma * rng.normal_vector(obs.size());
}

}  // namespace egrl::envs
