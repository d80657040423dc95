// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "flatnoise/data.hpp"
#include "flatnoise/network.hpp"
#include "flatnoise/objective.hpp"
#include "flatnoise/perturb.hpp"

namespace flatnoise {

enum class OptimizerKind { Sgd, Sam, Rwp };

std::string_view to_string(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view name);

struct TrainConfig {
  OptimizerKind optimizer = OptimizerKind::Sgd;
  std::size_t epochs = 60;
  std::size_t batch_size = 64;
  double lr0 = 0.05;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  double label_smoothing = 0.1;
  /// Noise family for RWP; its strength is replaced by the schedule value.
  NoiseSpec noise = NoiseSpec::gaussian(0.0);
  /// Drives sigma for RWP and rho for SAM; unused by SGD.
  Schedule schedule;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Per-epoch training diagnostics; per-step values are averaged over the
/// epoch's minibatches.
struct MetricsRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_acc_clean = 0.0;
  /// (sigma_test, mean accuracy over the monitoring draws)
  std::vector<std::pair<double, double>> val_acc_noisy;
  double grad_norm_mean = 0.0;
  double grad_sharpness_mean = 0.0;
  /// Absent when no step had two nonzero gradients.
  std::optional<double> cos_sim_mean;
  double perturbation_norm_mean = 0.0;
  /// Sum of ||w_{t+1} - w_t|| over the epoch's steps.
  double step_distance = 0.0;
  /// Learning rate and perturbation strength at the epoch's last step.
  double lr = 0.0;
  double strength_t = 0.0;

  bool operator==(const MetricsRecord&) const = default;
};

struct OptimState {
  ParamSet params;
  std::vector<double> velocity;
  /// Number of steps taken so far.
  std::uint64_t step_index = 0;
  std::vector<MetricsRecord> metrics_log;

  explicit OptimState(ParamSet p) : params(std::move(p)), velocity(params.theta.size(), 0.0) {}
};

/// What one step observed. `loss` is at w, `perturbed_loss` at the point the
/// update gradient was taken (equal to `loss` for SGD).
struct StepDiagnostics {
  double loss = 0.0;
  double perturbed_loss = 0.0;
  double update_grad_norm = 0.0;
  double perturbation_norm = 0.0;
  std::optional<double> cosine;
  double step_distance = 0.0;
  double strength = 0.0;
  double lr = 0.0;
};

/// lr0 * (1 + cos(pi * t / total)) / 2.
double cosine_lr(std::uint64_t t, std::uint64_t total, double lr0);

/// g = grad(w) + wd * w;  v <- momentum * v + g;  w <- w - lr * v.
StepDiagnostics sgd_step(OptimState& state, const Objective& loss, const TrainConfig& cfg, double lr);

/// Random weight perturbation step: the update gradient is taken at w + eps
/// with eps drawn from cfg.noise at the scheduled sigma for iteration
/// step_index + 1, then applied to the unperturbed w as in sgd_step.
StepDiagnostics rwp_step(OptimState& state, const Objective& loss, const TrainConfig& cfg, double lr,
                         RngStream& noise_rng);

/// rwp_step with a caller-supplied perturbation.
StepDiagnostics rwp_step_with_noise(OptimState& state, const Objective& loss, const TrainConfig& cfg,
                                    double lr, std::span<const double> eps, double strength = 0.0);

/// Sharpness-aware step: eps = rho_t * g1 / ||g1||, update gradient at
/// w + eps on the same objective, applied to the unperturbed w.
StepDiagnostics sam_step(OptimState& state, const Objective& loss, const TrainConfig& cfg, double lr);

/// Noisy validation monitoring used for early stopping.
struct MonitorSpec {
  std::vector<double> sigmas;
  std::size_t draws = 2;
  NoiseFamily family = NoiseFamily::Gaussian;
  std::shared_ptr<const DeviceErrorModel> device;
};

struct TrainResult {
  ParamSet best;
  ParamSet final_params;
  /// 1-based epoch of `best`; 0 when no epoch ran.
  std::size_t best_epoch = 0;
  std::vector<MetricsRecord> log;
};

/// Full training run. The best parameters maximize noisy validation
/// accuracy at monitor.sigmas[0] (clean accuracy when no sigma is given)
/// and are the final parameters when val_set is empty;
/// ties keep the earliest epoch.
TrainResult train(const ModelSpec& model, const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& cfg, const MonitorSpec& monitor);

/// Continue from explicit initial parameters.
TrainResult train_from(const ModelSpec& model, ParamSet initial, const Dataset& train_set,
                       const Dataset& val_set, const TrainConfig& cfg, const MonitorSpec& monitor);

}  // namespace flatnoise
