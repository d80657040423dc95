// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flatnoise/config.hpp"
#include "flatnoise/evalharness.hpp"
#include "flatnoise/optim.hpp"

namespace flatnoise {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitUsage = 2,
  kExitNumeric = 3,
};

/// Output layout of one training run:
///
///   <dir>/config.resolved.json    resolved config and its hash
///   <dir>/data_manifest.json      split sizes and label histograms
///   <dir>/seed_<s>/metrics.jsonl  one record per epoch
///   <dir>/seed_<s>/run.json       config hash, best epoch
///   <dir>/seed_<s>/best.ckpt      plus .json sidecar
///   <dir>/seed_<s>/final.ckpt     plus .json sidecar
struct SeedRun {
  std::uint64_t seed = 0;
  std::filesystem::path dir;
  TrainResult result;
};

/// Trains every seed of `cfg` into `dir` and writes the layout above.
std::vector<SeedRun> run_training(const ExperimentConfig& cfg, const std::filesystem::path& dir);

struct EvalRequest {
  /// Checkpoint files, or run directories whose seed_*/best.ckpt are used.
  std::vector<std::filesystem::path> checkpoints;
  /// Defaults to the checkpoint config's eval.sigma_test.
  std::optional<std::vector<double>> sigma_test;
  std::size_t draws = 10;
  /// Defaults to the checkpoint config's eval.seed.
  std::optional<std::uint64_t> seed;
  /// train, val or test.
  std::string split = "test";
};

struct EvalOutcome {
  std::string config_hash;
  std::vector<std::filesystem::path> checkpoints;
  /// One report per sigma_test over all checkpoints.
  std::vector<EvalReport> reports;
};

EvalOutcome run_eval(const EvalRequest& request);

/// Seed checkpoints (seed_*/best.ckpt) under a run directory, in seed order.
std::vector<std::filesystem::path> find_checkpoints(const std::filesystem::path& run_dir);

int cmd_train(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);
/// Prints the table, and the JSON report unless `output` is given, in which
/// case the JSON goes there.
int cmd_eval(const EvalRequest& request, const std::optional<std::filesystem::path>& output, std::ostream& out,
             std::ostream& err);
int cmd_sweep(const std::filesystem::path& config_path, bool resume, std::ostream& out, std::ostream& err);
int cmd_report(const std::filesystem::path& run_dir, std::ostream& out, std::ostream& err);

/// Markdown table with one row per cell and one column per sigma_test; the
/// best cell in each column is bold.
std::string sweep_table(const std::vector<std::string>& cell_names, const std::vector<double>& sigma_test,
                        const std::vector<std::vector<std::optional<EvalReport>>>& reports);

/// Entry point of the flatnoise tool.
int run_cli(int argc, char** argv);

}  // namespace flatnoise
