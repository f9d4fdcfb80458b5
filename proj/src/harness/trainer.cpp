#include "egrl/harness/trainer.hpp"

#include "egrl/experts/expert.hpp"
#include "egrl/rl/replay_buffer.hpp"
#include "egrl/rl/running_norm.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <optional>

namespace egrl::harness {

namespace {

using envs::Env;
using experts::ExpertController;
using integrate::GateForm;
using integrate::Mechanism;
using integrate::MethodSpec;

struct SeedStreams {
    Rng action, gate, update, episode;
    explicit SeedStreams(std::uint64_t seed)
        : action(derive_seed(seed, "action")),
          gate(derive_seed(seed, "gate")),
          update(derive_seed(seed, "update")),
          episode(derive_seed(seed, "episode")) {}
};

// Everything one run needs, bundled so the behavior loop and the evaluator
// share it.
struct RunContext {
    const RunConfig& cfg;
    MethodSpec method;
    envs::EnvConstants constants;
    envs::EnvSpec spec;
    gate::GateConfig gcfg;
    gate::ScoringRule scoring;
    gate::ScoringRule ibrl_scoring;
    double dt = 0.0;
    int z_dim = 0;
    int s_dim = 0;
    Vector action_bias;  // zero unless the action_bias perturbation is active
    double obs_noise_sigma = 0.0;
    std::uint64_t seed = 0;
};

Vector make_s_tilde(const RunContext& ctx, const Vector& obs, const Vector& z) {
    if (ctx.z_dim == 0) return obs;
    return rl::augment(obs, z);
}

// Deterministic deployment action for the method under evaluation.
struct Evaluator {
    const RunContext& ctx;
    rl::SacAgent* agent;
    const rl::RunningNorm& norm;

    double episode_return(Env& env, const ExpertController* expert_proto,
                          std::uint64_t eval_seed) const {
        Vector obs = env.reset(eval_seed);
        std::unique_ptr<ExpertController> expert;
        if (expert_proto != nullptr) {
            expert = expert_proto->clone();
            expert->reset();
        }
        Rng noise_rng(derive_seed(eval_seed, "eval.obs_noise"));
        double total = 0.0;
        for (int t = 0; t < ctx.spec.horizon; ++t) {
            Vector obs_agent = obs;
            if (ctx.obs_noise_sigma > 0.0)
                obs_agent = envs::perturb_observation(obs, ctx.obs_noise_sigma, noise_rng);
            Vector z;
            Vector a_exp;
            if (expert) {
                z = expert->internal_state();
                a_exp = expert->act(obs_agent, ctx.dt);
                if (ctx.action_bias.size() > 0)
                    a_exp = experts::bias_action(a_exp, ctx.action_bias);
            }
            const Vector action = deployment_action(obs_agent, z, a_exp);
            const auto r = env.step(action);
            total += r.reward;
            obs = r.observation;
            if (r.done) break;
        }
        return total;
    }

    Vector deployment_action(const Vector& obs_agent, const Vector& z, const Vector& a_exp) const {
        if (ctx.method.mechanism == Mechanism::expert_only) return a_exp;
        const Vector s_tilde = make_s_tilde(ctx, obs_agent, z);
        const Vector s_norm = ctx.method.obs_norm ? norm.normalize(s_tilde) : s_tilde;
        const Vector a_pol = agent->mean_action(s_norm);
        switch (ctx.method.mechanism) {
            case Mechanism::sac:
            case Mechanism::jsrl_curriculum:
            case Mechanism::jsrl_tt:
                return a_pol;
            case Mechanism::residual:
                return gate::residual_select(a_exp, a_pol, ctx.cfg.residual_bound);
            case Mechanism::ibrl: {
                const Vector qe = agent->q_values(s_norm, a_exp);
                const Vector qp = agent->q_values(s_norm, a_pol);
                const bool pick = gate::ibrl_pick_expert(gate::score(qe, ctx.ibrl_scoring, 0.0),
                                                         gate::score(qp, ctx.ibrl_scoring, 0.0));
                return pick ? a_exp : a_pol;
            }
            case Mechanism::edge: {
                const Vector qe = agent->q_values(s_norm, a_exp);
                const Vector qp = agent->q_values(s_norm, a_pol);
                bool pick;
                if (ctx.method.literal_thompson) {
                    pick = qe.mean() > qp.mean();  // deterministic limit of the TS draw
                } else if (ctx.method.gate_form == GateForm::argmax) {
                    pick = gate::ibrl_pick_expert(gate::score(qe, ctx.scoring, ctx.gcfg.kappa),
                                                  gate::score(qp, ctx.scoring, ctx.gcfg.kappa));
                } else {
                    const double delta = gate::score(qe, ctx.scoring, ctx.gcfg.kappa) -
                                         gate::score(qp, ctx.scoring, ctx.gcfg.kappa);
                    pick = gate::gate_probability(delta, ctx.gcfg.tau) >= 0.5;
                }
                return pick ? a_exp : a_pol;
            }
            case Mechanism::expert_only: break;
        }
        throw std::logic_error("unreachable deployment mechanism");
    }
};

// Splits a raw augmented observation back into (obs, z) and queries the
// expert there; used by the residual composer and bootstrap variants.
class ExpertBatchQuery {
public:
    ExpertBatchQuery(const ExpertController& proto, int obs_dim, int z_dim, double dt)
        : scratch_(proto.clone()), obs_dim_(obs_dim), z_dim_(z_dim), dt_(dt) {}

    Matrix actions(const std::vector<const rl::Transition*>& batch, bool next_state) const {
        const Eigen::Index b = static_cast<Eigen::Index>(batch.size());
        Matrix out(scratch_->action_dim(), b);
        for (Eigen::Index j = 0; j < b; ++j) {
            const Vector& s = next_state ? batch[static_cast<size_t>(j)]->s2
                                         : batch[static_cast<size_t>(j)]->s;
            scratch_->set_internal_state(s.tail(z_dim_));
            out.col(j) = scratch_->act(s.head(obs_dim_), dt_);
        }
        return out;
    }

private:
    std::unique_ptr<ExpertController> scratch_;
    int obs_dim_;
    int z_dim_;
    double dt_;
};

}  // namespace

RunRecord train_run(const RunConfig& cfg_in, std::uint64_t seed) {
    const auto t_start = std::chrono::steady_clock::now();

    RunConfig cfg = cfg_in;
    cfg.resolve_defaults();

    RunContext ctx{cfg, MethodSpec::from_id(cfg.method),
                   cfg.constants_path.empty() ? envs::default_constants()
                                              : envs::load_constants(cfg.constants_path),
                   {}, {}, gate::ScoringRule::lcb_range, gate::ScoringRule::mean_q,
                   0.0, 0, 0, Vector(), 0.0, seed};
    if (!cfg.scoring.empty()) ctx.method.scoring = scoring_rule_from_string(cfg.scoring);
    if (!cfg.ibrl_scoring.empty()) ctx.method.ibrl_scoring = scoring_rule_from_string(cfg.ibrl_scoring);
    ctx.scoring = ctx.method.scoring;
    ctx.ibrl_scoring = ctx.method.ibrl_scoring;

    auto env = envs::make_env(cfg.env, ctx.constants);
    ctx.spec = env->spec();
    ctx.dt = ctx.spec.control_dt;
    ctx.gcfg = cfg.gate;
    if (ctx.method.force_zero_kappa) ctx.gcfg.kappa = 0.0;
    ctx.gcfg.validate();

    // Expert setup. The undertuning perturbation applies to the training-time
    // expert; action bias and observation noise apply at deployment
    // evaluation only.
    std::unique_ptr<ExpertController> expert;
    double j_exp = std::numeric_limits<double>::quiet_NaN();
    if (ctx.method.uses_expert) {
        if (ctx.method.random_expert) {
            expert = experts::make_random_expert(ctx.spec.action_dim,
                                                 derive_seed(seed, "random_expert"));
        } else {
            if (cfg.gains_path.empty())
                throw std::runtime_error("method '" + cfg.method + "' needs a gains file");
            const experts::GainFile gains = experts::GainFile::load(cfg.gains_path);
            expert = experts::make_expert(cfg.env, gains, ctx.constants);
            j_exp = gains.expert_return.mean;
            ctx.spec.j_exp = j_exp;
        }
        if (cfg.perturbation.type == "undertune" && cfg.perturbation.sigma > 0.0) {
            Rng r(derive_seed(seed, "undertune"));
            expert = experts::undertune(*expert, cfg.perturbation.sigma, r);
        }
    }
    if (cfg.perturbation.type == "action_bias" && ctx.method.uses_expert) {
        Rng r(derive_seed(seed, "action_bias"));
        ctx.action_bias = cfg.perturbation.sigma * r.normal_vector(ctx.spec.action_dim);
    }
    if (cfg.perturbation.type == "obs_noise") ctx.obs_noise_sigma = cfg.perturbation.sigma;

    ctx.z_dim = (expert && ctx.method.augment_state) ? expert->state_dim() : 0;
    ctx.s_dim = ctx.spec.obs_dim + ctx.z_dim;

    rl::SacHyper hyper = cfg.sac;
    if (ctx.method.ensemble_n > 0) hyper.critics = ctx.method.ensemble_n;
    std::optional<rl::SacAgent> agent;
    if (ctx.method.mechanism != Mechanism::expert_only)
        agent.emplace(ctx.s_dim, ctx.spec.action_dim, hyper, derive_seed(seed, "init"));

    rl::RunningNorm norm(ctx.s_dim);
    rl::ReplayBuffer buffer(static_cast<size_t>(cfg.buffer_capacity), derive_seed(seed, "replay"));
    SeedStreams streams(seed);

    std::optional<ExpertBatchQuery> expert_query;
    const bool needs_expert_batch =
        expert && (ctx.method.mechanism == Mechanism::residual ||
                   ctx.method.bootstrap != rl::BootstrapMode::standard);
    if (needs_expert_batch)
        expert_query.emplace(*expert, ctx.spec.obs_dim, ctx.z_dim, ctx.dt);

    RunRecord rec;
    rec.config_hash = cfg.cell_hash();
    rec.config_json = cfg.to_json_string();
    rec.env = cfg.env;
    rec.method = cfg.method;
    rec.seed = seed;
    rec.gate.decimation = cfg.gate_log_decimation;
    rec.perturbation = cfg.perturbation;
    rec.expert_return_unperturbed = j_exp;
    rec.rng_provenance = "master=" + std::to_string(seed) +
                         "; streams=fnv1a(action,gate,update,episode,init,replay,eval,"
                         "undertune,action_bias,random_expert)";

    Evaluator evaluator{ctx, agent ? &*agent : nullptr, norm};
    auto eval_env = envs::make_env(cfg.env, ctx.constants);
    auto run_eval = [&](long long at_step) {
        std::vector<double> rets;
        for (int e = 0; e < cfg.eval_episodes; ++e) {
            const std::uint64_t eval_seed = derive_seed(seed, "eval." + std::to_string(e));
            rets.push_back(evaluator.episode_return(*eval_env, expert.get(), eval_seed));
        }
        double mean = 0.0;
        for (double r : rets) mean += r;
        mean /= static_cast<double>(rets.size());
        rec.eval_steps.push_back(at_step);
        rec.eval_returns.push_back(mean);
        rec.eval_episode_returns.push_back(rets);
    };

    run_eval(0);  // initial evaluation

    const long long prefill_steps =
        static_cast<long long>(ctx.method.prefill_fraction * static_cast<double>(cfg.total_steps));

    long long gstep = 0;
    long long episode = 0;
    rl::UpdateOptions update_opts;
    update_opts.bootstrap = ctx.method.bootstrap;
    update_opts.boot_gate = ctx.gcfg;
    update_opts.boot_scoring = ctx.scoring;
    update_opts.residual = ctx.method.mechanism == Mechanism::residual;
    update_opts.residual_bound = cfg.residual_bound;

    while (gstep < cfg.total_steps) {
        Vector obs = env->reset(derive_seed(seed, "episode." + std::to_string(episode)));
        if (expert) expert->reset();
        const double progress =
            static_cast<double>(gstep) / static_cast<double>(std::max<long long>(cfg.total_steps, 1));
        const double h_t = gate::jsrl_curriculum_horizon(progress, ctx.spec.horizon);

        for (int t_ep = 0; t_ep < ctx.spec.horizon && gstep < cfg.total_steps; ++t_ep) {
            if (gstep > 0 && gstep % cfg.eval_interval == 0) run_eval(gstep);

            Vector z, a_exp;
            if (expert) {
                z = expert->internal_state();
                a_exp = expert->act(obs, ctx.dt);
            }
            const Vector s_raw = make_s_tilde(ctx, obs, z);
            if (ctx.method.obs_norm) norm.update(s_raw);
            const Vector s_norm = ctx.method.obs_norm ? norm.normalize(s_raw) : s_raw;

            Vector a_pol;
            if (agent) a_pol = agent->sample_action(s_norm, streams.action);

            // Exactly one selection mechanism runs per step.
            Vector executed;
            bool expert_arm = false;
            auto& n = rec.counters;
            if (ctx.method.mechanism == Mechanism::expert_only) {
                executed = a_exp;
                expert_arm = true;
                ++n.expert_only_steps;
            } else if (gstep < prefill_steps) {
                executed = a_exp;
                expert_arm = true;
                ++n.prefill_steps;
            } else {
                switch (ctx.method.mechanism) {
                    case Mechanism::sac:
                        executed = a_pol;
                        ++n.plain_policy_steps;
                        break;
                    case Mechanism::jsrl_curriculum:
                        expert_arm = gate::jsrl_curriculum_pick_expert(t_ep, h_t);
                        executed = expert_arm ? a_exp : a_pol;
                        ++n.handoff_tests;
                        break;
                    case Mechanism::jsrl_tt:
                        expert_arm = gate::jsrl_tt_pick_expert(gstep, cfg.rho_warm, cfg.total_steps);
                        executed = expert_arm ? a_exp : a_pol;
                        ++n.warmstart_tests;
                        break;
                    case Mechanism::residual:
                        executed = gate::residual_select(a_exp, a_pol, cfg.residual_bound);
                        ++n.residual_steps;
                        break;
                    case Mechanism::ibrl: {
                        const Vector qe = agent->q_values(s_norm, a_exp);
                        const Vector qp = agent->q_values(s_norm, a_pol);
                        expert_arm =
                            gate::ibrl_pick_expert(gate::score(qe, ctx.ibrl_scoring, 0.0),
                                                   gate::score(qp, ctx.ibrl_scoring, 0.0));
                        executed = expert_arm ? a_exp : a_pol;
                        ++n.argmax_picks;
                        break;
                    }
                    case Mechanism::edge: {
                        auto query = [&](const Vector& s, const Vector& a) {
                            return agent->q_values(s, a);
                        };
                        if (ctx.method.literal_thompson) {
                            expert_arm = gate::literal_thompson_pick_expert(s_norm, a_pol, a_exp,
                                                                            query, streams.gate);
                            executed = expert_arm ? a_exp : a_pol;
                            ++n.thompson_draws;
                        } else if (ctx.method.gate_form == GateForm::argmax) {
                            const Vector qe = agent->q_values(s_norm, a_exp);
                            const Vector qp = agent->q_values(s_norm, a_pol);
                            expert_arm = gate::ibrl_pick_expert(
                                gate::score(qe, ctx.scoring, ctx.gcfg.kappa),
                                gate::score(qp, ctx.scoring, ctx.gcfg.kappa));
                            executed = expert_arm ? a_exp : a_pol;
                            ++n.argmax_picks;
                        } else {
                            const auto sel = gate::edge_select(s_norm, a_pol, a_exp, query,
                                                               ctx.gcfg, streams.gate, ctx.scoring);
                            expert_arm = sel.expert;
                            executed = sel.action;
                            rec.gate.log_draw(sel.p, sel.expert, sel.delta);
                            ++n.gate_draws;
                        }
                        break;
                    }
                    case Mechanism::expert_only: throw std::logic_error("unreachable");
                }
            }
            if (ctx.method.uses_expert) ++(expert_arm ? n.expert_arm : n.policy_arm);

            const auto step = env->step(executed);
            Vector z_next;
            if (expert) z_next = expert->internal_state();
            const Vector s2_raw = make_s_tilde(ctx, step.observation, z_next);

            if (agent) {
                buffer.add({s_raw, integrate::stored_action(ctx.method, executed, a_pol),
                            step.reward, s2_raw, step.terminal});

                if (gstep >= cfg.update_after &&
                    buffer.size() >= static_cast<size_t>(hyper.batch_size)) {
                    const auto idx = buffer.sample_indices(static_cast<size_t>(hyper.batch_size));
                    std::vector<const rl::Transition*> batch_ptrs;
                    batch_ptrs.reserve(idx.size());
                    for (size_t i : idx) batch_ptrs.push_back(&buffer[i]);

                    rl::Batch batch;
                    const Eigen::Index b = static_cast<Eigen::Index>(idx.size());
                    batch.obs.resize(ctx.s_dim, b);
                    batch.act.resize(ctx.spec.action_dim, b);
                    batch.next_obs.resize(ctx.s_dim, b);
                    batch.rew.resize(b);
                    batch.done.resize(b);
                    for (Eigen::Index jcol = 0; jcol < b; ++jcol) {
                        const auto& tr = *batch_ptrs[static_cast<size_t>(jcol)];
                        batch.obs.col(jcol) = tr.s;
                        batch.act.col(jcol) = tr.a;
                        batch.next_obs.col(jcol) = tr.s2;
                        batch.rew[jcol] = tr.r;
                        batch.done[jcol] = tr.done ? 1.0 : 0.0;
                    }
                    if (ctx.method.obs_norm) {
                        batch.obs = norm.normalize_columns(batch.obs);
                        batch.next_obs = norm.normalize_columns(batch.next_obs);
                    }
                    if (expert_query) {
                        batch.next_expert_act = expert_query->actions(batch_ptrs, true);
                        if (update_opts.residual)
                            batch.expert_act = expert_query->actions(batch_ptrs, false);
                    }
                    rl::UpdateNoise noise;
                    noise.next_noise.resize(ctx.spec.action_dim, b);
                    noise.new_noise.resize(ctx.spec.action_dim, b);
                    for (Eigen::Index jcol = 0; jcol < b; ++jcol)
                        for (int i = 0; i < ctx.spec.action_dim; ++i) {
                            noise.next_noise(i, jcol) = streams.update.normal();
                            noise.new_noise(i, jcol) = streams.update.normal();
                        }
                    agent->update(batch, noise, update_opts);
                }
            }

            obs = step.observation;
            ++gstep;
            if (step.done) break;
        }
        ++episode;
    }

    if (cfg.total_steps > 0) run_eval(cfg.total_steps);
    rec.gate.finish_window();

    if (!cfg.checkpoint_dir.empty() && agent) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.checkpoint_dir);
        nlohmann::json ck;
        ck["version"] = 1;
        ck["agent"] = nlohmann::json::parse(agent->checkpoint_json());
        ck["norm"] = nlohmann::json{
            {"count", norm.count()},
            {"mean", std::vector<double>(norm.mean().data(), norm.mean().data() + ctx.s_dim)},
            {"m2", std::vector<double>(norm.m2().data(), norm.m2().data() + ctx.s_dim)},
            {"epsilon", norm.epsilon()}};
        const fs::path p = fs::path(cfg.checkpoint_dir) /
                           (cfg.env + "__" + cfg.method + "__seed" + std::to_string(seed) +
                            ".ckpt.json");
        std::ofstream out(p);
        out << ck.dump() << "\n";
    }

    // Final-window scalar: mean eval return over the trailing window.
    const double window_start =
        static_cast<double>(cfg.total_steps) * (1.0 - cfg.final_window_fraction);
    double sum = 0.0;
    int count = 0;
    for (size_t i = 0; i < rec.eval_steps.size(); ++i) {
        if (static_cast<double>(rec.eval_steps[i]) >= window_start - 1e-9) {
            sum += rec.eval_returns[i];
            ++count;
        }
    }
    if (count > 0) rec.final_window_scalar = sum / count;
    rec.final_window_evals = count;

    rec.wallclock_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rec;
}

std::vector<RunRecord> train_all(const RunConfig& cfg) {
    std::vector<RunRecord> out;
    for (const std::uint64_t s : cfg.seeds) out.push_back(train_run(cfg, s));
    return out;
}

}  // namespace egrl::harness
