#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "egrl/experts/tuning.hpp"
#include "egrl/harness/report.hpp"
#include "egrl/harness/sweep.hpp"
#include "egrl/harness/trainer.hpp"
#include "egrl/rl/running_norm.hpp"
#include "egrl/rl/sac.hpp"

#include <json.hpp>

#include <filesystem>

using namespace egrl;
using namespace egrl::harness;

namespace {

std::string tuned_gains_path() {
    static std::string path = [] {
        const auto p =
            (std::filesystem::temp_directory_path() / "egrl_hn_fourtank_gains.json").string();
        experts::PidTuneOptions opt;
        opt.return_seeds = 4;
        experts::tune_pid_expert("fourtank", envs::default_constants(), opt).save(p);
        return p;
    }();
    return path;
}

RunConfig base_config() {
    RunConfig cfg;
    cfg.env = "fourtank";
    cfg.method = "expert";
    cfg.seeds = {0, 1};
    cfg.total_steps = 1000;
    cfg.eval_interval = 500;
    cfg.eval_episodes = 2;
    cfg.gains_path = tuned_gains_path();
    cfg.update_after = 200;
    cfg.sac.batch_size = 32;
    cfg.sac.hidden = 32;
    return cfg;
}

std::string record_sans_wallclock(const RunRecord& r) {
    auto j = nlohmann::json::parse(r.to_json_string());
    j.erase("wallclock_s");
    return j.dump();
}

}  // namespace

TEST_CASE("run config round-trips losslessly and hashes by cell") {
    RunConfig cfg = base_config();
    cfg.resolve_defaults();
    const std::string once = cfg.to_json_string();
    const RunConfig back = RunConfig::from_json_string(once);
    CHECK(back.to_json_string() == once);

    RunConfig other = cfg;
    other.seeds = {5, 6, 7};
    CHECK(other.cell_hash() == cfg.cell_hash());  // seeds excluded from the cell identity

    RunConfig diff = cfg;
    diff.total_steps += 1;
    CHECK(diff.cell_hash() != cfg.cell_hash());

    // Task defaults fill the gate when the file leaves it unset.
    RunConfig fresh;
    fresh.env = "plane3dcircle";
    fresh.resolve_defaults();
    CHECK(fresh.gate.kappa == doctest::Approx(4.05));
    CHECK(fresh.gate.tau == doctest::Approx(8.51));
}

TEST_CASE("expert method: every eval return equals the deterministic expert return") {
    const auto rec = train_run(base_config(), 3);
    REQUIRE(rec.eval_steps.size() >= 3);
    for (size_t i = 1; i < rec.eval_returns.size(); ++i)
        CHECK(rec.eval_returns[i] == rec.eval_returns[0]);
    for (const auto& ep : rec.eval_episode_returns)
        CHECK(ep == rec.eval_episode_returns[0]);
    CHECK(rec.expert_return_unperturbed ==
          experts::GainFile::load(tuned_gains_path()).expert_return.mean);
}

TEST_CASE("steps = 0 leaves only the initial evaluation") {
    auto cfg = base_config();
    cfg.method = "sac";
    cfg.gains_path.clear();
    cfg.total_steps = 0;
    const auto rec = train_run(cfg, 0);
    CHECK(rec.eval_steps == std::vector<long long>{0});
    CHECK(rec.eval_returns.size() == 1);
    CHECK(std::isnan(rec.final_window_scalar) == false);
}

TEST_CASE("identical configs give identical records modulo wall-clock") {
    auto cfg = base_config();
    cfg.method = "edge";
    cfg.total_steps = 600;
    const auto a = train_run(cfg, 4);
    const auto b = train_run(cfg, 4);
    CHECK(record_sans_wallclock(a) == record_sans_wallclock(b));

    const auto c = train_run(cfg, 5);
    CHECK(record_sans_wallclock(a) != record_sans_wallclock(c));
}

TEST_CASE("missing gains file is a hard error for expert-using methods") {
    auto cfg = base_config();
    cfg.method = "edge";
    cfg.gains_path.clear();
    CHECK_THROWS_WITH_AS(train_run(cfg, 0), doctest::Contains("needs a gains file"),
                         std::runtime_error);
}

TEST_CASE("checkpoints round-trip the nets and normalizer exactly") {
    auto cfg = base_config();
    cfg.method = "edge";
    cfg.total_steps = 400;
    cfg.checkpoint_dir = (std::filesystem::temp_directory_path() / "egrl_ckpt").string();
    const auto rec = train_run(cfg, 11);
    (void)rec;
    const auto path = std::filesystem::path(cfg.checkpoint_dir) /
                      "fourtank__edge__seed11.ckpt.json";
    REQUIRE(std::filesystem::exists(path));
    std::ifstream in(path);
    nlohmann::json ck;
    in >> ck;
    CHECK(ck.at("version") == 1);
    // Round-trip exactness: re-serializing the parsed checkpoint is stable.
    const std::string once = ck.dump();
    CHECK(nlohmann::json::parse(once).dump() == once);
    // The normalizer state restores bit-exactly.
    const auto mean = ck.at("norm").at("mean").get<std::vector<double>>();
    const auto m2 = ck.at("norm").at("m2").get<std::vector<double>>();
    rl::RunningNorm norm(static_cast<Eigen::Index>(mean.size()),
                         ck.at("norm").at("epsilon").get<double>());
    norm.restore(ck.at("norm").at("count").get<long long>(),
                 Eigen::Map<const Vector>(mean.data(), static_cast<Eigen::Index>(mean.size())),
                 Eigen::Map<const Vector>(m2.data(), static_cast<Eigen::Index>(m2.size())));
    nlohmann::json again{{"count", norm.count()},
                         {"mean", std::vector<double>(norm.mean().data(),
                                                      norm.mean().data() + norm.mean().size())},
                         {"m2", std::vector<double>(norm.m2().data(),
                                                    norm.m2().data() + norm.m2().size())},
                         {"epsilon", norm.epsilon()}};
    CHECK(again.dump() == ck.at("norm").dump());
    // The agent nets restore bit-exactly through the same text.
    rl::SacHyper hyper = cfg.sac;
    rl::SacAgent restored(static_cast<int>(mean.size()), 2, hyper, 0);
    restored.restore_checkpoint_json(ck.at("agent").dump());
    CHECK(nlohmann::json::parse(restored.checkpoint_json()).dump() == ck.at("agent").dump());
}

TEST_CASE("record JSON round-trips") {
    auto cfg = base_config();
    cfg.method = "edge";
    cfg.total_steps = 400;
    const auto rec = train_run(cfg, 7);
    const auto back = RunRecord::from_json_string(rec.to_json_string());
    CHECK(back.to_json_string() == rec.to_json_string());
    CHECK(back.final_window_scalar == rec.final_window_scalar);
    CHECK(back.gate.windows.size() == rec.gate.windows.size());
}

TEST_CASE("sweep semantics") {
    SweepSpec spec;
    spec.base = base_config();
    spec.base.total_steps = 300;
    spec.base.eval_interval = 300;
    spec.base.seeds = {0, 1};
    spec.methods = {"expert", "edge"};
    spec.perturbation_type = "undertune";
    spec.sigmas = {0.0, 0.4};

    SUBCASE("cell count is the full cross product") {
        CHECK(spec.cell_count() == 8);
        const auto out = run_sweep(spec, 2);
        CHECK(out.errors.empty());
        CHECK(out.records.size() == 8);
    }

    SUBCASE("sigma 0 cells are identical to clean runs") {
        SweepSpec clean = spec;
        clean.sigmas = {0.0};
        clean.methods = {"expert"};
        const auto swept = run_sweep(clean, 1);
        RunConfig direct = clean.base;
        direct.method = "expert";
        direct.perturbation = {"none", 0.0};
        const auto ref = train_run(direct, 0);
        REQUIRE(swept.records.size() == 2);
        for (const auto& r : swept.records)
            if (r.seed == 0) CHECK(r.final_window_scalar == ref.final_window_scalar);
    }

    SUBCASE("per-cell errors are collected and the sweep continues") {
        SweepSpec broken = spec;
        broken.base.gains_path = "does/not/exist.json";
        broken.methods = {"edge", "sac"};
        broken.sigmas = {0.0};
        const auto out = run_sweep(broken, 1);
        CHECK(out.records.size() == 2);  // sac cells survive
        CHECK(out.errors.size() == 2);   // edge cells fail per seed
        for (const auto& e : out.errors) CHECK(e.method == "edge");
    }

    SUBCASE("undertuned records keep unperturbed expert-return provenance") {
        SweepSpec ut = spec;
        ut.methods = {"expert"};
        ut.sigmas = {0.5};
        const auto out = run_sweep(ut, 1);
        REQUIRE_FALSE(out.records.empty());
        const double j_exp = experts::GainFile::load(tuned_gains_path()).expert_return.mean;
        for (const auto& r : out.records) {
            CHECK(r.perturbation.type == "undertune");
            CHECK(r.expert_return_unperturbed == j_exp);
        }
    }

    SUBCASE("sweep spec round-trips") {
        const auto text = spec.to_json_string();
        const auto back = SweepSpec::from_json_string(text);
        CHECK(back.methods == spec.methods);
        CHECK(back.sigmas == spec.sigmas);
        CHECK(back.perturbation_type == spec.perturbation_type);
        CHECK(back.base.to_json_string() == spec.base.to_json_string());
    }
}

TEST_CASE("first permanent crossing") {
    SUBCASE("monotone curve crosses once and never un-crosses") {
        const std::vector<double> curve{0.1, 0.3, 0.6, 0.8, 0.9};
        const auto k = first_permanent_crossing(curve, 0.5);
        REQUIRE(k.has_value());
        CHECK(*k == 2);
    }
    SUBCASE("a dip after the first crossing pushes the permanent crossing later") {
        const std::vector<double> curve{0.1, 0.6, 0.2, 0.7, 0.9};
        const auto k = first_permanent_crossing(curve, 0.5);
        REQUIRE(k.has_value());
        CHECK(*k == 3);
    }
    SUBCASE("never crossing is censored") {
        CHECK_FALSE(first_permanent_crossing({0.1, 0.2}, 0.5).has_value());
    }
    SUBCASE("matches a brute-force scan oracle on random curves") {
        Rng rng(3);
        for (int rep = 0; rep < 200; ++rep) {
            std::vector<double> curve(12);
            for (auto& v : curve) v = rng.uniform();
            const double thr = rng.uniform();
            // Oracle: smallest k such that every later value clears thr.
            std::optional<size_t> oracle;
            for (size_t k = 0; k < curve.size() && !oracle; ++k) {
                bool all = true;
                for (size_t i = k; i < curve.size(); ++i) all = all && curve[i] >= thr;
                if (all) oracle = k;
            }
            CHECK(first_permanent_crossing(curve, thr) == oracle);
        }
    }
}

TEST_CASE("report tables") {
    auto cfg = base_config();
    cfg.total_steps = 400;
    cfg.eval_interval = 200;
    cfg.seeds = {0, 1, 2, 3};

    std::vector<RunRecord> records;
    for (auto s : cfg.seeds) records.push_back(train_run(cfg, s));
    auto sac_cfg = cfg;
    sac_cfg.method = "sac";
    sac_cfg.gains_path.clear();
    for (auto s : cfg.seeds) records.push_back(train_run(sac_cfg, s));

    SUBCASE("well-formed tables with ENA companion") {
        const auto tables = make_report(records);
        CHECK(tables.main_text.find("fourtank") != std::string::npos);
        CHECK(tables.main_csv.find("expert,") != std::string::npos);
        CHECK(tables.ena_csv.find("j_exp") != std::string::npos);
        CHECK(tables.crossings_csv.find("budget_censored") != std::string::npos);
    }

    SUBCASE("constant returns reproduce the constant with a degenerate CI") {
        std::vector<RunRecord> experts_only(records.begin(), records.begin() + 4);
        const auto tables = make_report(experts_only);
        // All four expert seeds are deterministic but differ per seed; the
        // degenerate case needs identical scalars, so synthesize that.
        auto clones = experts_only;
        for (auto& r : clones) r.final_window_scalar = 123.25;
        const auto t2 = make_report(clones);
        CHECK(t2.main_csv.find("123.25") != std::string::npos);
        const auto pos = t2.main_csv.find("123.25");
        const auto pos2 = t2.main_csv.find("123.25", pos + 1);
        CHECK(pos2 != std::string::npos);  // iqm and ci_lo both collapse to it
    }

    SUBCASE("mixed-config record sets are rejected") {
        auto other = records;
        auto rogue_cfg = cfg;
        rogue_cfg.total_steps = 600;
        other.push_back(train_run(rogue_cfg, 9));
        CHECK_THROWS_AS(make_report(other), std::invalid_argument);

        auto rogue_env = records;
        RunConfig toy;
        toy.env = "integrator1d";
        toy.method = "sac";
        toy.total_steps = 400;
        toy.eval_interval = 200;
        toy.eval_episodes = cfg.eval_episodes;
        toy.seeds = {0};
        rogue_env.push_back(train_run(toy, 0));
        CHECK_THROWS_AS(make_report(rogue_env), std::invalid_argument);
    }
}
