// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/evalharness.hpp"

#include <cmath>
#include <cstdio>

namespace flatnoise {

std::vector<double> noisy_accuracy(const ModelSpec& model, const ParamSet& params, const Dataset& dataset,
                                   const NoiseSpec& spec, std::size_t draws, std::uint64_t seed,
                                   std::uint64_t first_replicate) {
  if (draws < 1) throw DomainError("noisy_accuracy: draws must be >= 1");
  if (dataset.empty()) throw DomainError("noisy_accuracy: empty dataset");
  const Batch all = dataset.as_batch();
  std::vector<double> out(draws);
  std::vector<double> perturbed(params.theta.size());
  for (std::size_t k = 0; k < draws; ++k) {
    RngStream rng(seed, StreamId::NoiseEval, first_replicate + k);
    const std::vector<double> eps = sample_noise(params, spec, rng);
    for (std::size_t i = 0; i < perturbed.size(); ++i) perturbed[i] = params.theta[i] + eps[i];
    out[k] = accuracy(model, perturbed, all);
  }
  return out;
}

EvalReport evaluate_grid(const ModelSpec& model, std::span<const ParamSet> weights, const Dataset& dataset,
                         const NoiseSpec& spec, std::size_t draws, std::uint64_t seed) {
  if (weights.empty()) throw DomainError("evaluate_grid: no weights");
  if (draws < 1) throw DomainError("evaluate_grid: draws must be >= 1");
  if (dataset.empty()) throw DomainError("evaluate_grid: empty dataset");
  const Batch all = dataset.as_batch();
  std::vector<std::vector<double>> cells(weights.size(), std::vector<double>(draws));
  double rmse = 0.0;
  for (std::size_t s = 0; s < weights.size(); ++s) {
    const ParamSet& params = weights[s];
    std::vector<double> perturbed(params.theta.size());
    for (std::size_t k = 0; k < draws; ++k) {
      RngStream rng(seed, StreamId::NoiseEval, s * draws + k);
      const std::vector<double> eps = sample_noise(params, spec, rng);
      for (std::size_t i = 0; i < perturbed.size(); ++i) perturbed[i] = params.theta[i] + eps[i];
      cells[s][k] = accuracy(model, perturbed, all);
      rmse += weight_rmse(params.theta, perturbed);
    }
  }
  EvalReport r = aggregate(cells);
  if (weights.size() == 1) r.weight_std.reset();
  r.sigma_test = spec.strength;
  r.rmse = rmse / static_cast<double>(weights.size() * draws);
  return r;
}

double sample_std(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  const double shift = values.front();
  double offset = 0.0;
  for (double v : values) offset += v - shift;
  offset /= static_cast<double>(n);
  double ss = 0.0;
  for (double v : values) {
    const double d = (v - shift) - offset;
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(n - 1));
}

EvalReport aggregate(const std::vector<std::vector<double>>& per_cell) {
  if (per_cell.empty() || per_cell.front().empty()) throw DomainError("aggregate: empty matrix");
  const std::size_t k = per_cell.front().size();
  EvalReport r;
  r.per_cell = per_cell;
  std::vector<double> seed_means;
  double total = 0.0;
  double noise = 0.0;
  for (const std::vector<double>& row : per_cell) {
    if (row.size() != k) throw DomainError("aggregate: ragged matrix");
    double m = 0.0;
    for (double v : row) m += v;
    total += m;
    seed_means.push_back(m / static_cast<double>(k));
    noise += sample_std(row);
  }
  r.mean_acc = total / static_cast<double>(k * per_cell.size());
  r.noise_std = noise / static_cast<double>(per_cell.size());
  r.weight_std = sample_std(seed_means);
  return r;
}

std::string format_report(const EvalReport& report) {
  char buf[96];
  if (report.weight_std) {
    std::snprintf(buf, sizeof buf, "%.2f ± %.2f ± %.2f", 100.0 * report.mean_acc,
                  100.0 * report.noise_std, 100.0 * *report.weight_std);
  } else {
    std::snprintf(buf, sizeof buf, "%.2f ± %.2f", 100.0 * report.mean_acc, 100.0 * report.noise_std);
  }
  return buf;
}

double weight_rmse(std::span<const double> clean, std::span<const double> perturbed) {
  if (clean.size() != perturbed.size()) throw DomainError("weight_rmse: shape mismatch");
  if (clean.empty()) throw DomainError("weight_rmse: empty parameter vectors");
  double ss = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) {
    const double d = clean[i] - perturbed[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(clean.size()));
}

double weight_rmse(const ParamSet& clean, const ParamSet& perturbed) {
  if (clean.partition != perturbed.partition) throw DomainError("weight_rmse: partitions differ");
  return weight_rmse(clean.theta, perturbed.theta);
}

}  // namespace flatnoise
