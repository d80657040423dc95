// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "flatnoise/data.hpp"
#include "flatnoise/network.hpp"
#include "flatnoise/optim.hpp"

namespace flatnoise {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DataKind { Spirals, Blobs, Idx };

/// Dataset selector plus generator arguments. Generated data is drawn from
/// `seed` and split with the same seed, independent of the training seeds.
struct DataConfig {
  DataKind kind = DataKind::Spirals;
  std::size_t classes = 3;
  std::size_t per_class = 300;
  double noise_std = 0.05;
  std::size_t dim = 4;
  double separation = 10.0;
  std::string images;
  std::string labels;
  std::array<double, 3> fractions = {0.6, 0.2, 0.2};
  std::uint64_t seed = 1234;
};

struct EvalConfig {
  std::vector<double> sigma_test = {0.1};
  std::size_t draws = 10;
  std::size_t monitor_draws = 2;
  /// Test-noise family. For device noise each sigma_test value multiplies
  /// the table std.
  NoiseFamily family = NoiseFamily::Gaussian;
  std::string device_table;
  std::uint64_t seed = 7;
};

/// Training options as written in the config; resolved into TrainConfig per
/// seed once the iteration count is known.
struct TrainSection {
  OptimizerKind optimizer = OptimizerKind::Sgd;
  std::size_t epochs = 60;
  std::size_t batch_size = 64;
  double lr = 0.05;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  double label_smoothing = 0.1;
  NoiseFamily noise_family = NoiseFamily::Gaussian;
  /// Two-column CSV; required when noise_family is device.
  std::string device_table;
  double strength = 0.0;
  ScheduleKind schedule = ScheduleKind::Constant;
  std::optional<std::uint64_t> warmup_iters;
  std::optional<double> warmup_fraction;
};

struct ExperimentConfig {
  std::vector<std::size_t> hidden = {64, 64};
  Activation activation = Activation::Relu;
  DataConfig data;
  TrainSection train;
  std::vector<std::uint64_t> seeds = {0, 1, 2};
  EvalConfig eval;
  std::string output_dir = "runs/default";

  /// Canonical JSON of every field (defaults filled in).
  nlohmann::ordered_json to_json() const;
  /// 16 hex chars: FNV-1a 64 of the canonical JSON with output_dir removed.
  std::string hash() const;
};

/// Axes of a sweep; an empty axis keeps the base config's value. Each cell
/// is trained with every seed and evaluated at every eval.sigma_test.
struct SweepGrid {
  std::vector<OptimizerKind> optimizer;
  std::vector<double> strength;
  std::vector<ScheduleKind> schedule;
  std::vector<double> warmup_fraction;

  nlohmann::ordered_json to_json() const;
};

struct SweepConfig {
  ExperimentConfig base;
  SweepGrid grid;
};

/// Strict parse: unknown keys, wrong types and out-of-range values throw
/// ConfigError naming the offending key path.
ExperimentConfig parse_experiment(const nlohmann::json& j);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// An experiment config with an additional top-level "sweep" object.
SweepConfig parse_sweep(const nlohmann::json& j);
SweepConfig load_sweep(const std::filesystem::path& path);

/// The splits an experiment trains and evaluates on.
SplitResult build_datasets(const DataConfig& data);

ModelSpec model_for(const ExperimentConfig& cfg, const Dataset& train_set);

/// TrainConfig for one seed; warmup_fraction is converted to iterations of
/// a run with `train_size` samples. A ramped schedule with neither warmup
/// option warms up over the first half of training.
TrainConfig resolve_train(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t train_size);

/// `output_dir`, resolved under $FLATNOISE_OUTPUT_ROOT when that is set and
/// the path is relative.
std::filesystem::path resolve_output_dir(const std::string& output_dir);

std::string fnv1a_hex(const std::string& text);

}  // namespace flatnoise
