// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flatnoise/data.hpp"
#include "flatnoise/network.hpp"
#include "flatnoise/perturb.hpp"

namespace flatnoise {

/// Accuracy of `params` under `draws` independent whole-model noise
/// realizations. Draw k uses RngStream(seed, NoiseEval, first_replicate + k),
/// so any subset of draws can be computed independently and still agree
/// with the serial result. `params` is never modified.
std::vector<double> noisy_accuracy(const ModelSpec& model, const ParamSet& params, const Dataset& dataset,
                                   const NoiseSpec& spec, std::size_t draws, std::uint64_t seed,
                                   std::uint64_t first_replicate = 0);

/// Summary of an S x K grid (S trained weight sets, K noise draws each).
///
/// noise_std is the mean over seeds of the per-seed sample std across the K
/// draws; weight_std is the sample std across seeds of the per-seed means.
/// Both use the n - 1 divisor and are 0 when their axis has one entry.
struct EvalReport {
  double mean_acc = 0.0;
  double noise_std = 0.0;
  /// Absent when only one set of weights was evaluated.
  std::optional<double> weight_std;
  std::vector<std::vector<double>> per_cell;
  double sigma_test = 0.0;
  std::optional<double> rmse;
};

EvalReport aggregate(const std::vector<std::vector<double>>& per_cell);

/// Sample standard deviation (n - 1 divisor); 0 for fewer than two values.
double sample_std(std::span<const double> values);

/// Runs the S x K grid: weight set s, draw k uses noise-eval replicate
/// s * draws + k. With a single weight set weight_std is left absent. rmse
/// is the mean over cells of the RMSE between clean and perturbed weights.
EvalReport evaluate_grid(const ModelSpec& model, std::span<const ParamSet> weights, const Dataset& dataset,
                         const NoiseSpec& spec, std::size_t draws, std::uint64_t seed);

/// "mean ± noise ± weight" with accuracies in percent, two decimals.
/// The weight term is omitted when absent.
std::string format_report(const EvalReport& report);

/// Root mean squared coordinate difference between two parameter sets.
double weight_rmse(const ParamSet& clean, const ParamSet& perturbed);
double weight_rmse(std::span<const double> clean, std::span<const double> perturbed);

}  // namespace flatnoise
