#include "egrl/experts/expert.hpp"

namespace egrl::experts {

std::unique_ptr<ExpertController> undertune(const ExpertController& expert, double sigma, Rng& rng) {
    if (sigma < 0.0) throw std::invalid_argument("undertune: sigma must be >= 0");
    auto out = expert.clone();
    if (sigma == 0.0) return out;
    std::vector<double> p = out->parameters();
    for (double& g : p) {
        const double xi = rng.normal();  // one draw per parameter
        if (g > 0.0) g *= std::exp(sigma * xi);
    }
    out->set_parameters(p);
    return out;
}

Vector bias_action(const Vector& action, const Vector& bias) {
    if (bias.size() != action.size())
        throw std::invalid_argument("bias_action: dimension mismatch");
    return clip_box(action + bias);
}

namespace {

class RandomExpert final : public ExpertController {
public:
    RandomExpert(int action_dim, std::uint64_t seed)
        : dim_(action_dim), seed_(seed), rng_(seed), last_(Vector::Zero(action_dim)) {}

    int action_dim() const override { return dim_; }
    int state_dim() const override { return dim_; }
    Vector internal_state() const override { return last_; }
    void set_internal_state(const Vector& z) override {
        if (z.size() != dim_) throw std::invalid_argument("random expert: state dim mismatch");
        last_ = z;
    }

    Vector act(const Vector&, double) override {
        last_ = rng_.uniform_vector(dim_, -1.0, 1.0);
        return last_;
    }

    void reset() override {
        rng_ = Rng(seed_);
        last_.setZero();
    }

    std::unique_ptr<ExpertController> clone() const override {
        return std::make_unique<RandomExpert>(*this);
    }

    std::vector<double> parameters() const override { return {}; }
    void set_parameters(const std::vector<double>& p) override {
        if (!p.empty()) throw std::invalid_argument("random expert has no parameters");
    }

private:
    int dim_;
    std::uint64_t seed_;
    Rng rng_;
    Vector last_;
};

}  // namespace

std::unique_ptr<ExpertController> make_random_expert(int action_dim, std::uint64_t seed) {
    return std::make_unique<RandomExpert>(action_dim, seed);
}

}  // namespace egrl::experts
