#include "egrl/rl/sac.hpp"

#include <json.hpp>

#include <sstream>

namespace egrl::rl {

using nlohmann::json;

namespace {

Matrix vstack(const Matrix& a, const Matrix& b) {
    Matrix m(a.rows() + b.rows(), a.cols());
    m.topRows(a.rows()) = a;
    m.bottomRows(b.rows()) = b;
    return m;
}

json mlp_to_json(const Mlp& net) {
    const Vector p = net.flatten();
    return json{{"in", net.shape().in},
                {"hidden", net.shape().hidden},
                {"out", net.shape().out},
                {"params", std::vector<double>(p.data(), p.data() + p.size())}};
}

void mlp_from_json(const json& j, Mlp& net) {
    Rng dummy(0);
    net = Mlp({j.at("in").get<int>(), j.at("hidden").get<int>(), j.at("out").get<int>()}, dummy);
    const auto p = j.at("params").get<std::vector<double>>();
    net.unflatten(Eigen::Map<const Vector>(p.data(), static_cast<Eigen::Index>(p.size())));
}

}  // namespace

SacAgent::SacAgent(int obs_dim, int act_dim, const SacHyper& hyper, std::uint64_t init_seed)
    : h_(hyper), obs_dim_(obs_dim), act_dim_(act_dim) {
    target_entropy_ = std::isnan(h_.target_entropy) ? -static_cast<double>(act_dim)
                                                    : h_.target_entropy;
    if (h_.critics < 2) throw std::invalid_argument("sac: ensemble needs N >= 2 critics");
    Rng rng(derive_seed(init_seed, "sac.init"));
    policy = SquashedGaussianPolicy(obs_dim, act_dim, h_.hidden, rng);
    const MlpShape critic_shape{obs_dim + act_dim, h_.hidden, 1};
    for (int k = 0; k < h_.critics; ++k) {
        critics.emplace_back(critic_shape, rng);
        targets.push_back(critics.back());  // targets start as copies
    }
    log_alpha_ = std::log(h_.alpha_init);
    actor_opt_ = Adam(policy.net.param_count(), h_.lr);
    for (int k = 0; k < h_.critics; ++k) critic_opt_.emplace_back(critics[0].param_count(), h_.lr);
    alpha_opt_ = Adam(1, h_.lr);
}

Vector SacAgent::sample_action(const Vector& obs_norm, Rng& rng) const {
    Matrix noise(act_dim_, 1);
    for (int i = 0; i < act_dim_; ++i) noise(i, 0) = rng.normal();
    Vector logp;
    SquashedGaussianPolicy::SampleCache cache;
    return policy.sample(obs_norm, noise, logp, cache).col(0);
}

Matrix SacAgent::ensemble_values(const std::vector<Mlp>& nets, const Matrix& obs,
                                 const Matrix& act) const {
    const Matrix input = vstack(obs, act);
    Matrix out(static_cast<Eigen::Index>(nets.size()), obs.cols());
    for (size_t k = 0; k < nets.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = nets[k].forward(input);
    return out;
}

Vector SacAgent::q_values(const Vector& obs_norm, const Vector& act) const {
    if (obs_norm.size() != obs_dim_ || act.size() != act_dim_)
        throw std::invalid_argument("sac: observation/action dimension mismatch");
    return ensemble_values(critics, obs_norm, act).col(0);
}

Vector SacAgent::target_q_values(const Vector& obs_norm, const Vector& act) const {
    return ensemble_values(targets, obs_norm, act).col(0);
}

Matrix SacAgent::composed_action(const Matrix& actor_act, const Matrix& expert_act,
                                 const UpdateOptions& opts) const {
    if (!opts.residual) return actor_act;
    if (expert_act.cols() != actor_act.cols())
        throw std::invalid_argument("sac: residual update needs expert actions in the batch");
    return (expert_act + opts.residual_bound * actor_act).cwiseMax(-1.0).cwiseMin(1.0);
}

Vector SacAgent::compute_targets(const Batch& batch, const UpdateNoise& noise,
                                 const UpdateOptions& opts) const {
    const Eigen::Index b = batch.size();
    Vector logp;
    SquashedGaussianPolicy::SampleCache cache;
    const Matrix a_next = policy.sample(batch.next_obs, noise.next_noise, logp, cache);
    const Matrix u_next = composed_action(a_next, batch.next_expert_act, opts);
    const Matrix q_next = ensemble_values(targets, batch.next_obs, u_next);
    const double a = alpha();

    Matrix q_exp;
    if (opts.bootstrap != BootstrapMode::standard) {
        if (batch.next_expert_act.cols() != b)
            throw std::invalid_argument("sac: bootstrap variant needs next expert actions");
        q_exp = ensemble_values(targets, batch.next_obs, batch.next_expert_act);
    }

    Vector y(b);
    for (Eigen::Index j = 0; j < b; ++j) {
        const double v_pol = q_next.col(j).minCoeff() - a * logp[j];
        double v = v_pol;
        if (opts.bootstrap == BootstrapMode::ibrl_max) {
            v = std::max(v_pol, q_exp.col(j).minCoeff());
        } else if (opts.bootstrap == BootstrapMode::lcb_gated) {
            const double se = gate::score(q_exp.col(j), opts.boot_scoring, opts.boot_gate.kappa);
            const double sp = gate::score(q_next.col(j), opts.boot_scoring, opts.boot_gate.kappa);
            const double p = gate::gate_probability(se - sp, opts.boot_gate.tau);
            v = p * q_exp.col(j).minCoeff() + (1.0 - p) * v_pol;
        }
        y[j] = batch.rew[j] + h_.gamma * (1.0 - batch.done[j]) * v;
    }
    return y;
}

SacAgent::CriticPass SacAgent::critic_pass(int k, const Batch& batch,
                                           const Vector& targets_y) const {
    const Eigen::Index b = batch.size();
    const Matrix input = vstack(batch.obs, batch.act);
    Mlp::Cache cache;
    const Matrix q = critics[static_cast<size_t>(k)].forward(input, cache);
    CriticPass out;
    const Vector err = q.row(0).transpose() - targets_y;
    out.loss = err.squaredNorm() / static_cast<double>(b);
    const Matrix dq = (2.0 / static_cast<double>(b)) * err.transpose();
    out.grads.resize(critics[static_cast<size_t>(k)].shape());
    critics[static_cast<size_t>(k)].backward(cache, dq, out.grads);
    return out;
}

double SacAgent::critic_loss(int k, const Batch& batch, const Vector& targets_y) const {
    const Matrix input = vstack(batch.obs, batch.act);
    const Matrix q = critics[static_cast<size_t>(k)].forward(input);
    return (q.row(0).transpose() - targets_y).squaredNorm() / static_cast<double>(batch.size());
}

Vector SacAgent::critic_grad(int k, const Batch& batch, const Vector& targets_y) const {
    return critic_pass(k, batch, targets_y).grads.flatten();
}

SacAgent::ActorGradResult SacAgent::actor_pass(const Batch& batch, const UpdateNoise& noise,
                                               const UpdateOptions& opts) const {
    const Eigen::Index b = batch.size();
    ActorGradResult res;
    SquashedGaussianPolicy::SampleCache cache;
    const Matrix a_new = policy.sample(batch.obs, noise.new_noise, res.logp, cache);
    const Matrix u_new = composed_action(a_new, batch.expert_act, opts);
    const double a = alpha();

    const Matrix input = vstack(batch.obs, u_new);
    std::vector<Mlp::Cache> caches(critics.size());
    Matrix qs(static_cast<Eigen::Index>(critics.size()), b);
    for (size_t k = 0; k < critics.size(); ++k)
        qs.row(static_cast<Eigen::Index>(k)) = critics[k].forward(input, caches[k]);

    double loss = 0.0;
    std::vector<Eigen::Index> argmin(static_cast<size_t>(b));
    for (Eigen::Index j = 0; j < b; ++j) {
        Eigen::Index m = 0;
        qs.col(j).minCoeff(&m);
        argmin[static_cast<size_t>(j)] = m;
        loss += a * res.logp[j] - qs(m, j);
    }
    res.loss = loss / static_cast<double>(b);

    // dQ/d(input) through the per-sample min critic; only the action rows
    // feed the actor.
    Matrix du = Matrix::Zero(act_dim_, b);
    MlpGrads scratch;
    for (size_t k = 0; k < critics.size(); ++k) {
        Matrix dy = Matrix::Zero(1, b);
        bool any = false;
        for (Eigen::Index j = 0; j < b; ++j) {
            if (argmin[static_cast<size_t>(j)] == static_cast<Eigen::Index>(k)) {
                dy(0, j) = -1.0 / static_cast<double>(b);
                any = true;
            }
        }
        if (!any) continue;
        scratch.resize(critics[k].shape());
        const Matrix dx = critics[k].backward(caches[k], dy, scratch);
        du += dx.bottomRows(act_dim_);
    }

    Matrix d_act;
    if (opts.residual) {
        const Matrix pre = batch.expert_act + opts.residual_bound * a_new;
        d_act = opts.residual_bound * du;
        for (Eigen::Index j = 0; j < b; ++j)
            for (int i = 0; i < act_dim_; ++i)
                if (std::abs(pre(i, j)) >= 1.0) d_act(i, j) = 0.0;  // clipped: no gradient
    } else {
        d_act = du;
    }
    const Vector d_logp = Vector::Constant(b, a / static_cast<double>(b));

    res.grads.resize(policy.net.shape());
    policy.backward(cache, d_act, d_logp, res.grads);
    return res;
}

double SacAgent::actor_loss(const Batch& batch, const UpdateNoise& noise,
                            const UpdateOptions& opts) const {
    return actor_pass(batch, noise, opts).loss;
}

Vector SacAgent::actor_grad(const Batch& batch, const UpdateNoise& noise,
                            const UpdateOptions& opts) const {
    return actor_pass(batch, noise, opts).grads.flatten();
}

double SacAgent::alpha_loss(const Batch& batch, const UpdateNoise& noise,
                            const UpdateOptions& opts) const {
    const ActorGradResult r = actor_pass(batch, noise, opts);
    return -log_alpha_ * (r.logp.array() + target_entropy_).mean();
}

double SacAgent::alpha_grad(const Batch& batch, const UpdateNoise& noise,
                            const UpdateOptions& opts) const {
    const ActorGradResult r = actor_pass(batch, noise, opts);
    return -(r.logp.array() + target_entropy_).mean();
}

SacLosses SacAgent::update(const Batch& batch, const UpdateNoise& noise,
                           const UpdateOptions& opts) {
    if (batch.obs.rows() != obs_dim_ || batch.next_obs.rows() != obs_dim_ ||
        batch.act.rows() != act_dim_)
        throw std::invalid_argument("sac: batch dimensions do not match the declared spec");
    SacLosses out;
    const Vector y = compute_targets(batch, noise, opts);

    for (int k = 0; k < num_critics(); ++k) {
        const CriticPass pass = critic_pass(k, batch, y);
        out.critic.push_back(pass.loss);
        Vector p = critics[static_cast<size_t>(k)].flatten();
        critic_opt_[static_cast<size_t>(k)].step(p, pass.grads.flatten());
        critics[static_cast<size_t>(k)].unflatten(p);
    }

    const ActorGradResult actor = actor_pass(batch, noise, opts);
    out.actor = actor.loss;
    {
        Vector p = policy.net.flatten();
        actor_opt_.step(p, actor.grads.flatten());
        policy.net.unflatten(p);
    }

    const double ag = -(actor.logp.array() + target_entropy_).mean();
    out.alpha_loss = -log_alpha_ * (actor.logp.array() + target_entropy_).mean();
    {
        Vector la(1);
        la[0] = log_alpha_;
        Vector g(1);
        g[0] = ag;
        alpha_opt_.step(la, g);
        log_alpha_ = la[0];
    }
    out.alpha = alpha();

    bool finite = std::isfinite(out.actor) && std::isfinite(out.alpha_loss);
    for (double c : out.critic) finite = finite && std::isfinite(c);
    if (!finite) {
        std::ostringstream msg;
        msg << "sac: non-finite loss (actor=" << out.actor << ", critics=";
        for (double c : out.critic) msg << c << " ";
        msg << ", |obs|max=" << batch.obs.cwiseAbs().maxCoeff()
            << ", |rew|max=" << batch.rew.cwiseAbs().maxCoeff() << ")";
        throw std::runtime_error(msg.str());
    }

    for (int k = 0; k < num_critics(); ++k)
        targets[static_cast<size_t>(k)].lerp_toward(critics[static_cast<size_t>(k)], h_.polyak);
    return out;
}

std::string SacAgent::checkpoint_json() const {
    json j;
    j["version"] = 1;
    j["policy"] = mlp_to_json(policy.net);
    json cs = json::array(), ts = json::array();
    for (const auto& c : critics) cs.push_back(mlp_to_json(c));
    for (const auto& t : targets) ts.push_back(mlp_to_json(t));
    j["critics"] = cs;
    j["targets"] = ts;
    j["log_alpha"] = log_alpha_;
    return j.dump();
}

void SacAgent::restore_checkpoint_json(const std::string& text) {
    const json j = json::parse(text);
    if (j.at("version").get<int>() != 1) throw std::runtime_error("bad checkpoint version");
    mlp_from_json(j.at("policy"), policy.net);
    const auto& cs = j.at("critics");
    const auto& ts = j.at("targets");
    if (cs.size() != critics.size() || ts.size() != targets.size())
        throw std::runtime_error("checkpoint ensemble size mismatch");
    for (size_t k = 0; k < critics.size(); ++k) mlp_from_json(cs[k], critics[k]);
    for (size_t k = 0; k < targets.size(); ++k) mlp_from_json(ts[k], targets[k]);
    log_alpha_ = j.at("log_alpha").get<double>();
}

}  // namespace egrl::rl
