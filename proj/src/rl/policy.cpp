#include "egrl/rl/policy.hpp"

namespace egrl::rl {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;  // log(2*pi)

// log(1 - tanh(x)^2) = 2*(log 2 - x - softplus(-2x)), stable for large |x|.
inline double log_one_minus_tanh_sq(double x) {
    const double sp = x > 0.0 ? std::log1p(std::exp(-2.0 * x))
                              : -2.0 * x + std::log1p(std::exp(2.0 * x));
    return 2.0 * (std::log(2.0) - x - sp);
}
}  // namespace

SquashedGaussianPolicy::SquashedGaussianPolicy(int obs_dim, int act_dim, int hidden, Rng& rng)
    : act_dim_(act_dim) {
    net = Mlp({obs_dim, hidden, 2 * act_dim}, rng, /*zero_output_layer=*/true);
}

Matrix SquashedGaussianPolicy::sample(const Matrix& obs, const Matrix& noise, Vector& logp,
                                      SampleCache& cache) const {
    const Matrix y = net.forward(obs, cache.net);
    const Eigen::Index b = obs.cols();
    const Matrix mean = y.topRows(act_dim_);
    cache.ls_raw = y.bottomRows(act_dim_);
    const double half_span = 0.5 * (kLogStdMax - kLogStdMin);
    cache.log_std =
        (kLogStdMin + half_span * (tanh_fast(cache.ls_raw).array() + 1.0)).matrix();
    cache.stddev = cache.log_std.array().exp().matrix();
    cache.noise = noise;
    cache.pre = mean + cache.stddev.cwiseProduct(noise);
    cache.tanh_pre = tanh_fast(cache.pre);

    logp.resize(b);
    for (Eigen::Index j = 0; j < b; ++j) {
        double lp = 0.0;
        for (int i = 0; i < act_dim_; ++i) {
            const double xi = noise(i, j);
            lp += -0.5 * xi * xi - 0.5 * kLog2Pi - cache.log_std(i, j);
            lp -= log_one_minus_tanh_sq(cache.pre(i, j));
        }
        logp[j] = lp;
    }
    return cache.tanh_pre;
}

void SquashedGaussianPolicy::backward(const SampleCache& cache, const Matrix& d_act,
                                      const Vector& d_logp, MlpGrads& g) const {
    const Eigen::Index b = cache.pre.cols();
    // d/dpre of -log(1 - tanh(pre)^2) is 2*tanh(pre).
    Matrix d_pre = d_act.cwiseProduct((1.0 - cache.tanh_pre.array().square()).matrix());
    d_pre += (2.0 * cache.tanh_pre.array()).matrix() * d_logp.asDiagonal();

    const Matrix d_mean = d_pre;
    // pre = mean + exp(log_std) * xi; logp carries an explicit -log_std term.
    Matrix d_log_std = d_pre.cwiseProduct(cache.stddev.cwiseProduct(cache.noise));
    d_log_std -= Matrix::Ones(act_dim_, b) * d_logp.asDiagonal();

    const double half_span = 0.5 * (kLogStdMax - kLogStdMin);
    const Matrix d_ls_raw = d_log_std.cwiseProduct(
        (half_span * (1.0 - tanh_fast(cache.ls_raw).array().square())).matrix());

    Matrix dy(2 * act_dim_, b);
    dy.topRows(act_dim_) = d_mean;
    dy.bottomRows(act_dim_) = d_ls_raw;
    net.backward(cache.net, dy, g);
}

Vector SquashedGaussianPolicy::mean_action(const Vector& obs) const {
    const Matrix y = net.forward(obs);
    return tanh_fast(y.topRows(act_dim_)).col(0);
}

double SquashedGaussianPolicy::log_prob_of_pre(const Vector& obs, const Vector& pre) const {
    const Matrix y = net.forward(obs);
    double lp = 0.0;
    const double half_span = 0.5 * (kLogStdMax - kLogStdMin);
    for (int i = 0; i < act_dim_; ++i) {
        const double mean = y(i, 0);
        const double log_std = kLogStdMin + half_span * (std::tanh(y(act_dim_ + i, 0)) + 1.0);
        const double z = (pre[i] - mean) / std::exp(log_std);
        lp += -0.5 * z * z - 0.5 * kLog2Pi - log_std;
        lp -= log_one_minus_tanh_sq(pre[i]);
    }
    return lp;
}

}  // namespace egrl::rl
