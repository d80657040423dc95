// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/bound.hpp"

#include <cmath>

#include "flatnoise/evalharness.hpp"
#include "flatnoise/sharpness.hpp"

namespace flatnoise {

void BoundInputs::validate() const {
  if (k < 1) throw DomainError("bound: k must be >= 1");
  if (n < 2) throw DomainError("bound: n must be >= 2");
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("bound: delta must lie in (0, 1)");
  if (!(w_norm_sq >= 0.0)) throw DomainError("bound: ||w||^2 must be non-negative");
  if (!(sigma > 0.0)) throw DomainError("bound: sigma must be positive");
}

double h_term(const BoundInputs& in) {
  in.validate();
  const double k = static_cast<double>(in.k);
  const double n = static_cast<double>(in.n);
  const double kl = 0.25 * k * std::log1p(in.w_norm_sq / (k * in.sigma * in.sigma));
  const double numerator = kl + 0.25 + std::log(n / in.delta) + 2.0 * std::log(6.0 * n + 3.0 * k);
  return std::sqrt(numerator / (n - 1.0));
}

namespace {

// One antithetic sample: mean of L(w + eps) and L(w - eps).
double antithetic_value(const Objective& loss, std::span<const double> theta, std::span<const double> eps,
                        std::vector<double>& scratch) {
  for (std::size_t i = 0; i < theta.size(); ++i) scratch[i] = theta[i] + eps[i];
  const double up = loss.value(scratch);
  for (std::size_t i = 0; i < theta.size(); ++i) scratch[i] = theta[i] - eps[i];
  const double down = loss.value(scratch);
  return 0.5 * (up + down);
}

McEstimate summarize(const std::vector<double>& samples) {
  McEstimate est;
  est.draws = samples.size();
  double sum = 0.0;
  for (double v : samples) sum += v;
  est.mean = sum / static_cast<double>(samples.size());
  est.std_error = sample_std(samples) / std::sqrt(static_cast<double>(samples.size()));
  return est;
}

}  // namespace

McEstimate expected_perturbed_loss(const Objective& loss, const ParamSet& params, const NoiseSpec& noise,
                                   std::size_t draws, RngStream& rng) {
  if (draws < 1) throw DomainError("expected_perturbed_loss: draws must be >= 1");
  std::vector<double> samples(draws);
  std::vector<double> scratch(params.theta.size());
  for (std::size_t s = 0; s < draws; ++s) {
    const std::vector<double> eps = sample_noise(params, noise, rng);
    samples[s] = antithetic_value(loss, params.theta, eps, scratch);
  }
  return summarize(samples);
}

BoundResult bound_rhs(const Objective& loss, const ParamSet& params, const BoundInputs& inputs,
                      std::size_t mc_samples, RngStream& rng, bool per_filter) {
  inputs.validate();
  if (mc_samples < 1) throw DomainError("bound_rhs: mc_samples must be >= 1");
  BoundResult r;
  r.inputs = inputs;
  r.expected_loss =
      expected_perturbed_loss(loss, params, NoiseSpec::gaussian(inputs.sigma, per_filter), mc_samples, rng);
  r.h = h_term(inputs);
  r.total = r.expected_loss.mean + r.h;
  return r;
}

TaylorCheck taylor_check(const Objective& loss, const ParamSet& params, double sigma, std::size_t mc_samples,
                         RngStream& rng, TraceMethod method, std::size_t hutchinson_probes) {
  if (!(sigma >= 0.0)) throw DomainError("taylor_check: sigma must be non-negative");
  TaylorCheck c;
  const double base = loss.value(params.theta);
  if (sigma == 0.0) {
    c.lhs = c.rhs = base;
    return c;
  }
  c.trace = method == TraceMethod::Dense ? hessian_trace_dense(loss, params.theta)
                                         : hessian_trace(loss, params.theta, hutchinson_probes, rng);
  const McEstimate lhs =
      expected_perturbed_loss(loss, params, NoiseSpec::gaussian(sigma, false), mc_samples, rng);
  c.lhs = lhs.mean;
  c.lhs_std_error = lhs.std_error;
  c.rhs = base + 0.5 * sigma * sigma * c.trace;
  c.gap = std::abs(c.lhs - c.rhs);
  return c;
}

std::vector<MonotoneEntry> monotone_sigma_check(const Objective& loss, const ParamSet& params,
                                                std::span<const double> sigmas, std::size_t mc_samples,
                                                RngStream& rng, const NoiseSpec& noise,
                                                double confidence_z) {
  if (sigmas.empty()) throw DomainError("monotone_sigma_check: need at least one sigma");
  if (mc_samples < 1) throw DomainError("monotone_sigma_check: mc_samples must be >= 1");
  for (std::size_t i = 1; i < sigmas.size(); ++i) {
    if (!(sigmas[i] > sigmas[i - 1])) throw DomainError("monotone_sigma_check: sigmas must be ascending");
  }

  // Every sigma replays the same stream, so sample s sees the same base
  // draw scaled by each sigma.
  const RngStream start = rng;
  std::vector<std::vector<double>> samples(sigmas.size(), std::vector<double>(mc_samples));
  std::vector<double> scratch(params.theta.size());
  for (std::size_t j = 0; j < sigmas.size(); ++j) {
    RngStream replay = start;
    NoiseSpec spec = noise;
    spec.strength = sigmas[j];
    for (std::size_t s = 0; s < mc_samples; ++s) {
      const std::vector<double> eps = sample_noise(params, spec, replay);
      samples[j][s] = antithetic_value(loss, params.theta, eps, scratch);
    }
    if (j + 1 == sigmas.size()) rng = replay;
  }

  std::vector<MonotoneEntry> out(sigmas.size());
  std::vector<double> diff(mc_samples);
  for (std::size_t j = 0; j < sigmas.size(); ++j) {
    out[j].sigma = sigmas[j];
    out[j].loss = summarize(samples[j]);
    if (j == 0) continue;
    for (std::size_t s = 0; s < mc_samples; ++s) diff[s] = samples[j][s] - samples[j - 1][s];
    const McEstimate d = summarize(diff);
    out[j].ordered = d.mean - confidence_z * d.std_error > 0.0;
  }
  return out;
}

}  // namespace flatnoise
