#include "egrl/harness/sweep.hpp"

#include <json.hpp>

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>

namespace egrl::harness {

using nlohmann::json;

std::string SweepSpec::to_json_string() const {
    json j = json::parse(base.to_json_string());
    j["sweep"] = json{{"methods", methods},
                      {"perturbation_type", perturbation_type},
                      {"sigmas", sigmas}};
    return j.dump(2);
}

SweepSpec SweepSpec::from_json_string(const std::string& text) {
    const json j = json::parse(text);
    SweepSpec s;
    s.base = RunConfig::from_json_string(text);
    if (j.contains("sweep")) {
        const auto& sw = j.at("sweep");
        s.methods = sw.value("methods", std::vector<std::string>{s.base.method});
        s.perturbation_type = sw.value("perturbation_type", std::string("none"));
        s.sigmas = sw.value("sigmas", std::vector<double>{0.0});
    } else {
        s.methods = {s.base.method};
        s.perturbation_type = s.base.perturbation.type;
        s.sigmas = {s.base.perturbation.sigma};
    }
    return s;
}

SweepSpec SweepSpec::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open sweep spec: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json_string(text);
}

SweepOutcome run_sweep(const SweepSpec& spec, int jobs) {
    struct Cell {
        std::string method;
        double sigma;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const auto& m : spec.methods)
        for (double sg : spec.sigmas)
            for (std::uint64_t sd : spec.base.seeds) cells.push_back({m, sg, sd});

    SweepOutcome out;
    std::mutex mu;
    std::atomic<size_t> next{0};

    auto worker = [&] {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& cell = cells[i];
            RunConfig cfg = spec.base;
            cfg.method = cell.method;
            cfg.seeds = {cell.seed};
            cfg.perturbation.type = cell.sigma == 0.0 ? "none" : spec.perturbation_type;
            cfg.perturbation.sigma = cell.sigma;
            try {
                RunRecord rec = train_run(cfg, cell.seed);
                std::lock_guard<std::mutex> lock(mu);
                out.records.push_back(std::move(rec));
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(mu);
                out.errors.push_back({cell.method, cell.sigma, cell.seed, e.what()});
            }
        }
    };

    jobs = std::max(1, jobs);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return out;
}

}  // namespace egrl::harness
