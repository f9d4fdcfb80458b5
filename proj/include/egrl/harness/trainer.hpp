#pragma once

#include "egrl/envs/env.hpp"
#include "egrl/experts/gain_file.hpp"
#include "egrl/harness/record.hpp"

namespace egrl::harness {

/// Executes one training run for one seed: the selected mechanism's behavior
/// policy collects transitions, the shared SAC backbone learns from them, and
/// deterministic evaluations land in the record every eval_interval steps
/// (plus one before training and one at the end).
RunRecord train_run(const RunConfig& cfg, std::uint64_t seed);

/// Sequentially runs every seed in the config.
std::vector<RunRecord> train_all(const RunConfig& cfg);

}  // namespace egrl::harness
