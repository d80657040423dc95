// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "flatnoise/evalharness.hpp"

namespace flatnoise {

std::string_view to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::Sgd: return "sgd";
    case OptimizerKind::Sam: return "sam";
    case OptimizerKind::Rwp: return "rwp";
  }
  return "unknown";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "sam") return OptimizerKind::Sam;
  if (name == "rwp") return OptimizerKind::Rwp;
  throw DomainError("unknown optimizer '" + std::string(name) + "'");
}

void TrainConfig::validate() const {
  if (!(lr0 > 0.0)) throw DomainError("lr0 must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw DomainError("momentum must lie in [0, 1)");
  if (batch_size < 1) throw DomainError("batch_size must be >= 1");
  if (!(weight_decay >= 0.0)) throw DomainError("weight_decay must be non-negative");
  if (!(label_smoothing >= 0.0 && label_smoothing < 1.0)) throw DomainError("label_smoothing must lie in [0, 1)");
  schedule.validate();
  noise.validate();
}

double cosine_lr(std::uint64_t t, std::uint64_t total, double lr0) {
  if (total == 0 || t > total) throw DomainError("cosine_lr: need 0 <= t <= total, total > 0");
  const double frac = static_cast<double>(t) / static_cast<double>(total);
  return lr0 * (1.0 + std::cos(std::numbers::pi * frac)) / 2.0;
}

namespace {

// Shared body of all three optimizers. `make_eps` maps the clean gradient to
// the perturbation at which the update gradient is evaluated; an all-zero
// eps reuses the clean gradient so the perturbed methods reduce to SGD bit
// for bit. w itself is never shifted, so nothing needs restoring.
template <typename MakeEps>
StepDiagnostics perturbed_update(OptimState& state, const Objective& loss, const TrainConfig& cfg,
                                 double lr, double strength, MakeEps&& make_eps) {
  std::vector<double>& w = state.params.theta;
  const std::size_t k = w.size();
  if (state.velocity.size() != k) throw DomainError("velocity length does not match parameters");

  StepDiagnostics d;
  d.lr = lr;
  d.strength = strength;

  std::vector<double> clean_grad(k);
  d.loss = loss.value_and_gradient(w, clean_grad);
  const std::vector<double> eps = make_eps(std::span<const double>(clean_grad));
  if (eps.size() != k) throw DomainError("perturbation length does not match parameters");

  const bool perturbed = std::any_of(eps.begin(), eps.end(), [](double e) { return e != 0.0; });
  std::vector<double> update_grad;
  if (perturbed) {
    std::vector<double> shifted(k);
    for (std::size_t i = 0; i < k; ++i) shifted[i] = w[i] + eps[i];
    update_grad.resize(k);
    d.perturbed_loss = loss.value_and_gradient(shifted, update_grad);
    d.perturbation_norm = l2_norm(eps);
  } else {
    update_grad = clean_grad;
    d.perturbed_loss = d.loss;
  }

  d.update_grad_norm = l2_norm(update_grad);
  const double clean_norm = l2_norm(clean_grad);
  if (clean_norm > 0.0 && d.update_grad_norm > 0.0) {
    d.cosine = dot(clean_grad, update_grad) / (clean_norm * d.update_grad_norm);
  }

  double moved = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    const double g = update_grad[i] + cfg.weight_decay * w[i];
    state.velocity[i] = cfg.momentum * state.velocity[i] + g;
    const double delta = lr * state.velocity[i];
    w[i] -= delta;
    moved += delta * delta;
  }
  d.step_distance = std::sqrt(moved);
  if (!all_finite(w)) {
    std::ostringstream msg;
    msg << "non-finite parameters after step " << state.step_index << " (lr=" << lr
        << ", update grad norm=" << d.update_grad_norm << ", loss=" << d.loss << ")";
    throw NumericError(msg.str());
  }
  ++state.step_index;
  return d;
}

}  // namespace

StepDiagnostics sgd_step(OptimState& state, const Objective& loss, const TrainConfig& cfg, double lr) {
  return perturbed_update(state, loss, cfg, lr, 0.0, [](std::span<const double> g) {
    return std::vector<double>(g.size(), 0.0);
  });
}

StepDiagnostics rwp_step_with_noise(OptimState& state, const Objective& loss, const TrainConfig& cfg,
                                    double lr, std::span<const double> eps, double strength) {
  return perturbed_update(state, loss, cfg, lr, strength, [eps](std::span<const double>) {
    return std::vector<double>(eps.begin(), eps.end());
  });
}

StepDiagnostics rwp_step(OptimState& state, const Objective& loss, const TrainConfig& cfg, double lr,
                         RngStream& noise_rng) {
  NoiseSpec spec = cfg.noise;
  spec.strength = cfg.schedule.strength_at(state.step_index + 1);
  // Noise scales come from the current weights, before this step's update.
  const std::vector<double> eps = sample_noise(state.params, spec, noise_rng);
  return rwp_step_with_noise(state, loss, cfg, lr, eps, spec.strength);
}

StepDiagnostics sam_step(OptimState& state, const Objective& loss, const TrainConfig& cfg, double lr) {
  const double rho = cfg.schedule.strength_at(state.step_index + 1);
  return perturbed_update(state, loss, cfg, lr, rho,
                          [rho](std::span<const double> g) { return sam_ascent(g, rho); });
}

namespace {

struct EpochAccumulator {
  double loss = 0.0;
  double grad_norm = 0.0;
  double sharpness = 0.0;
  double cosine = 0.0;
  std::size_t cosine_count = 0;
  double perturbation = 0.0;
  double distance = 0.0;
  std::size_t steps = 0;
  StepDiagnostics last;

  void add(const StepDiagnostics& d) {
    loss += d.loss;
    grad_norm += d.update_grad_norm;
    sharpness += d.perturbed_loss - d.loss;
    if (d.cosine) {
      cosine += *d.cosine;
      ++cosine_count;
    }
    perturbation += d.perturbation_norm;
    distance += d.step_distance;
    ++steps;
    last = d;
  }
};

}  // namespace

TrainResult train(const ModelSpec& model, const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& cfg, const MonitorSpec& monitor) {
  RngStream init_rng(cfg.seed, StreamId::Init);
  return train_from(model, init_params(model, init_rng), train_set, val_set, cfg, monitor);
}

TrainResult train_from(const ModelSpec& model, ParamSet initial, const Dataset& train_set,
                       const Dataset& val_set, const TrainConfig& cfg, const MonitorSpec& monitor) {
  cfg.validate();
  model.validate();
  initial.validate();
  if (train_set.empty()) throw DomainError("train: empty training set");
  if (train_set.dim() != model.input_dim) throw DomainError("train: data dimension does not match model");

  TrainResult result;
  result.best = initial;
  OptimState state(std::move(initial));

  RngStream shuffle_rng(cfg.seed, StreamId::DataShuffle);
  RngStream noise_rng(cfg.seed, StreamId::NoiseTrain);

  const std::size_t n = train_set.size();
  const std::size_t batches_per_epoch = (n + cfg.batch_size - 1) / cfg.batch_size;
  const std::uint64_t total_steps = static_cast<std::uint64_t>(cfg.epochs) * batches_per_epoch;

  double best_score = -1.0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const std::vector<std::size_t> order = permutation(shuffle_rng, n);
    EpochAccumulator acc;
    for (std::size_t start = 0; start < n; start += cfg.batch_size) {
      const std::size_t end = std::min(n, start + cfg.batch_size);
      const Batch batch = train_set.gather(std::span<const std::size_t>(order.data() + start, end - start));
      const ModelObjective objective(model, batch, cfg.label_smoothing);
      const double lr = cosine_lr(state.step_index, total_steps, cfg.lr0);
      switch (cfg.optimizer) {
        case OptimizerKind::Sgd: acc.add(sgd_step(state, objective, cfg, lr)); break;
        case OptimizerKind::Rwp: acc.add(rwp_step(state, objective, cfg, lr, noise_rng)); break;
        case OptimizerKind::Sam: acc.add(sam_step(state, objective, cfg, lr)); break;
      }
    }

    MetricsRecord rec;
    const double steps = static_cast<double>(acc.steps);
    rec.epoch = epoch;
    rec.train_loss = acc.loss / steps;
    rec.grad_norm_mean = acc.grad_norm / steps;
    rec.grad_sharpness_mean = acc.sharpness / steps;
    if (acc.cosine_count > 0) rec.cos_sim_mean = acc.cosine / static_cast<double>(acc.cosine_count);
    rec.perturbation_norm_mean = acc.perturbation / steps;
    rec.step_distance = acc.distance;
    rec.lr = acc.last.lr;
    rec.strength_t = acc.last.strength;

    double score = 0.0;
    if (!val_set.empty()) {
      rec.val_acc_clean = accuracy(model, state.params.theta, val_set.as_batch());
      score = rec.val_acc_clean;
      for (std::size_t si = 0; si < monitor.sigmas.size(); ++si) {
        NoiseSpec spec{monitor.family, monitor.sigmas[si], true, monitor.device};
        const std::uint64_t first = (epoch * monitor.sigmas.size() + si) * monitor.draws;
        const std::vector<double> accs =
            noisy_accuracy(model, state.params, val_set, spec, monitor.draws, cfg.seed, first);
        double mean = 0.0;
        for (double a : accs) mean += a;
        mean /= static_cast<double>(accs.size());
        rec.val_acc_noisy.emplace_back(monitor.sigmas[si], mean);
        if (si == 0) score = mean;
      }
    }
    if (!val_set.empty() && score > best_score) {
      best_score = score;
      result.best = state.params;
      result.best_epoch = epoch;
    }
    state.metrics_log.push_back(rec);
  }

  result.final_params = state.params;
  result.log = std::move(state.metrics_log);
  if (result.best_epoch == 0) {
    result.best = result.final_params;
    result.best_epoch = result.log.size();
  }
  return result;
}

}  // namespace flatnoise
