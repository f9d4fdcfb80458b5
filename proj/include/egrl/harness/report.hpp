#pragma once

#include "egrl/harness/record.hpp"

#include <optional>

namespace egrl::harness {

struct ReportOptions {
    // Sample-efficiency thresholds as fractions of the task ceiling j_ref.
    std::vector<double> threshold_fractions = {0.25, 0.5, 0.75};
    int bootstrap_resamples = 5000;
    std::uint64_t bootstrap_seed = 42;
};

struct ReportTables {
    std::string main_text;     // per-env IQM/CI/p/marker table
    std::string main_csv;
    std::string ena_csv;       // ENA companion
    std::string crossings_csv; // first-permanent-crossing per threshold
};

/// First eval index from which the curve stays at or above the threshold;
/// nullopt when the run never permanently crosses (budget-censored).
std::optional<size_t> first_permanent_crossing(const std::vector<double>& eval_returns,
                                               double threshold);

/// Builds the result tables from per-seed records. All records must share one
/// env and one evaluation protocol; mixed sets are rejected. Rows group by
/// (method, perturbation); Mann-Whitney U against the sac rows is
/// Holm-corrected within the expert-using family.
ReportTables make_report(const std::vector<RunRecord>& records, const ReportOptions& opt = {});

}  // namespace egrl::harness
