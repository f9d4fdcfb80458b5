#include "egrl/experts/oscillator.hpp"
#include "egrl/stats/stats.hpp"
#include "egrl/experts/tuning.hpp"
#include "egrl/harness/report.hpp"
#include "egrl/harness/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

namespace fs = std::filesystem;
using namespace egrl;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path().empty() ? "." : path.parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

std::string record_filename(const harness::RunRecord& r) {
    std::string pert;
    if (r.perturbation.type != "none" && r.perturbation.sigma != 0.0) {
        std::ostringstream s;
        s.precision(3);
        s << "__" << r.perturbation.type << "_" << r.perturbation.sigma;
        pert = s.str();
    }
    return r.env + "__" + r.method + pert + "__seed" + std::to_string(r.seed) + ".json";
}

int cmd_tune_expert(const std::string& env_id, const std::string& gains_dir,
                    const std::string& constants_path, int seeds, int ops) {
    fs::create_directories(gains_dir);
    const auto constants = constants_path.empty() ? envs::default_constants()
                                                  : envs::load_constants(constants_path);
    experts::GainFile gains;
    if (env_id == "oscillator") {
        experts::CpgTuneOptions opt;
        opt.return_seeds = seeds;
        Rng rng(42);
        gains = experts::de_tune_cpg(opt, rng);
    } else {
        experts::PidTuneOptions opt;
        opt.return_seeds = seeds;
        opt.n_operating_points = ops;
        gains = experts::tune_pid_expert(env_id, constants, opt);
    }
    const fs::path out = fs::path(gains_dir) / (env_id + ".json");
    gains.save(out.string());
    std::cout << "tuned " << env_id << ": J_exp=" << gains.expert_return.mean << " ("
              << gains.expert_return.seeds << " seeds) -> " << out.string() << "\n";
    return 0;
}

int cmd_train(const std::string& config_path, const std::string& out_dir, int jobs) {
    harness::RunConfig cfg = harness::RunConfig::load(config_path);
    cfg.resolve_defaults();
    fs::create_directories(out_dir);

    harness::SweepSpec spec;
    spec.base = cfg;
    spec.methods = {cfg.method};
    spec.perturbation_type = cfg.perturbation.type;
    spec.sigmas = {cfg.perturbation.sigma};
    const auto outcome = harness::run_sweep(spec, jobs);
    for (const auto& rec : outcome.records) {
        const fs::path p = fs::path(out_dir) / record_filename(rec);
        rec.save(p.string());
        std::cout << rec.method << " seed " << rec.seed
                  << ": final=" << rec.final_window_scalar << " -> " << p.string() << "\n";
    }
    for (const auto& e : outcome.errors)
        std::cerr << "FAILED " << e.method << " seed " << e.seed << ": " << e.message << "\n";
    return outcome.errors.empty() ? 0 : 1;
}

int cmd_sweep(const std::string& spec_path, const std::string& out_dir, int jobs) {
    const harness::SweepSpec spec = harness::SweepSpec::load(spec_path);
    fs::create_directories(out_dir);
    const auto outcome = harness::run_sweep(spec, jobs);
    for (const auto& rec : outcome.records)
        rec.save((fs::path(out_dir) / record_filename(rec)).string());
    std::cout << "sweep: " << outcome.records.size() << "/" << spec.cell_count()
              << " cells completed, " << outcome.errors.size() << " errors\n";
    for (const auto& e : outcome.errors)
        std::cerr << "FAILED " << e.method << " sigma " << e.sigma << " seed " << e.seed << ": "
                  << e.message << "\n";
    return outcome.errors.empty() ? 0 : 1;
}

int cmd_ablate(const std::string& env_id, const std::string& variant, const std::string& gains,
               long long steps, int n_seeds, const std::string& out_dir, int jobs) {
    harness::RunConfig cfg;
    cfg.env = env_id;
    cfg.method = variant;
    cfg.total_steps = steps;
    cfg.gains_path = gains;
    cfg.seeds.clear();
    for (int s = 0; s < n_seeds; ++s) cfg.seeds.push_back(static_cast<std::uint64_t>(s));
    cfg.resolve_defaults();

    harness::SweepSpec spec;
    spec.base = cfg;
    spec.methods = {variant};
    const auto outcome = harness::run_sweep(spec, jobs);
    if (!outcome.errors.empty()) {
        for (const auto& e : outcome.errors) std::cerr << "FAILED: " << e.message << "\n";
        return 1;
    }

    nlohmann::json j;
    j["env"] = env_id;
    j["variant"] = variant;
    j["config"] = nlohmann::json::parse(cfg.to_json_string());
    std::vector<double> finals;
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : outcome.records) {
        finals.push_back(r.final_window_scalar);
        recs.push_back(nlohmann::json::parse(r.to_json_string()));
    }
    j["final_window_scalars"] = finals;
    if (finals.size() >= 4) {
        j["iqm"] = stats::iqm(finals);
        const auto ci = stats::bootstrap_ci_iqm(finals);
        j["ci"] = {ci.lo, ci.hi};
    }
    j["records"] = recs;
    fs::create_directories(out_dir);
    const fs::path out = fs::path(out_dir) / (env_id + "__" + variant + ".json");
    write_text(out, j.dump(2) + "\n");
    std::cout << "ablation " << variant << " on " << env_id << " -> " << out.string() << "\n";
    return 0;
}

int cmd_report(const std::vector<std::string>& record_paths, const std::string& out_dir) {
    std::vector<harness::RunRecord> records;
    for (const auto& p : record_paths) records.push_back(harness::RunRecord::load(p));
    const auto tables = harness::make_report(records);
    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "main_perenv.txt", tables.main_text);
    write_text(fs::path(out_dir) / "main_perenv.csv", tables.main_csv);
    write_text(fs::path(out_dir) / "ena_perenv.csv", tables.ena_csv);
    write_text(fs::path(out_dir) / "sample_efficiency.csv", tables.crossings_csv);
    std::cout << tables.main_text;
    std::cout << "tables written to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Expert-guided RL benchmark engine"};
    app.require_subcommand(1);

    std::string env_id, config_path, out_dir, gains_path, constants_path, variant;
    std::vector<std::string> record_paths;
    int jobs = 1, seeds = 16, ops = 8, n_seeds = 1;
    long long steps = 20000;

    auto* tune = app.add_subcommand("tune-expert", "Relay/DE tune a task expert and write gains");
    tune->add_option("env", env_id,
                     "Task: fourtank | plane3dcircle | glassfurnace | oscillator")->required();
    tune->add_option("--gains-dir", out_dir, "Output directory")->default_val("gains");
    tune->add_option("--constants", constants_path, "Env constants JSON");
    tune->add_option("--seeds", seeds, "Seeds for the expert-return measurement")->default_val(16);
    tune->add_option("--operating-points", ops, "Relay sweep operating points")->default_val(8);

    auto* train = app.add_subcommand("train", "Run training per seed from a config");
    train->add_option("config", config_path, "Run config JSON")->required();
    train->add_option("--out", out_dir, "Record output directory")->default_val("runs");
    train->add_option("--jobs", jobs, "Parallel seed workers")->default_val(1);

    auto* sweep = app.add_subcommand("sweep", "Methods x sigmas x seeds degradation sweep");
    sweep->add_option("config", config_path, "Sweep spec JSON")->required();
    sweep->add_option("--out", out_dir, "Record output directory")->default_val("runs");
    sweep->add_option("--jobs", jobs, "Parallel cell workers")->default_val(1);

    auto* ablate = app.add_subcommand("ablate", "Run one ablation variant end to end");
    ablate->add_option("env", env_id, "Task id")->required();
    ablate->add_option("variant", variant, "Variant id (edge, gating_argmax, ...)")->required();
    ablate->add_option("--gains", gains_path, "Gain file")->default_val("");
    ablate->add_option("--steps", steps, "Training steps")->default_val(20000);
    ablate->add_option("--seeds", n_seeds, "Seed count")->default_val(1);
    ablate->add_option("--out", out_dir, "Output directory")->default_val("ablation_results");
    ablate->add_option("--jobs", jobs, "Parallel workers")->default_val(1);

    auto* report = app.add_subcommand("report", "Aggregate records into result tables");
    report->add_option("records", record_paths, "Record JSON files")->required()->expected(-1);
    report->add_option("--out", out_dir, "Table output directory")->default_val("tables");

    CLI11_PARSE(app, argc, argv);

    try {
        if (tune->parsed()) return cmd_tune_expert(env_id, out_dir, constants_path, seeds, ops);
        if (train->parsed()) return cmd_train(config_path, out_dir, jobs);
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir, jobs);
        if (ablate->parsed()) {
            if (gains_path.empty() && variant != "sac" && variant != "random_expert")
                gains_path = "gains/" + env_id + ".json";
            return cmd_ablate(env_id, variant, gains_path, steps, n_seeds, out_dir, jobs);
        }
        if (report->parsed()) return cmd_report(record_paths, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
