// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/sharpness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>

namespace flatnoise {

void SharpnessProbe::validate() const {
  if (!(magnitude >= 0.0)) throw DomainError("sharpness probe magnitude must be non-negative");
  if (m < 1) throw DomainError("sharpness probe m must be >= 1");
  if (kind == DirectionKind::Average && num_samples < 1) {
    throw DomainError("average-direction probe needs num_samples >= 1");
  }
}

namespace {

std::vector<double> probe_direction(const ParamSet& params, std::span<const double> clean_grad,
                                    const SharpnessProbe& probe, RngStream& rng) {
  if (probe.kind == DirectionKind::Ascent) return sam_ascent(clean_grad, probe.magnitude);
  NoiseSpec spec = probe.noise;
  spec.strength = probe.magnitude;
  return sample_noise(params, spec, rng);
}

}  // namespace

double sharpness_at(const Objective& loss, std::span<const double> theta, std::span<const double> eps) {
  const std::vector<double> shifted = add(theta, eps);
  return loss.value(shifted) - loss.value(theta);
}

double m_sharpness(std::span<const Objective* const> batches, const ParamSet& params,
                   const SharpnessProbe& probe, RngStream& rng) {
  probe.validate();
  if (batches.empty()) throw DomainError("m_sharpness: empty dataset");
  if (probe.magnitude == 0.0) return 0.0;
  double total = 0.0;
  for (const Objective* batch : batches) {
    std::vector<double> g(params.theta.size());
    const double base = batch->value_and_gradient(params.theta, g);
    if (probe.kind == DirectionKind::Ascent) {
      const std::vector<double> eps = sam_ascent(g, probe.magnitude);
      total += batch->value(add(params.theta, eps)) - base;
    } else {
      double sum = 0.0;
      for (std::size_t s = 0; s < probe.num_samples; ++s) {
        const std::vector<double> eps = probe_direction(params, g, probe, rng);
        sum += batch->value(add(params.theta, eps)) - base;
      }
      total += sum / static_cast<double>(probe.num_samples);
    }
  }
  return total / static_cast<double>(batches.size());
}

double m_sharpness(const ModelSpec& model, const ParamSet& params, const Dataset& dataset,
                   const SharpnessProbe& probe, double smoothing, RngStream& rng) {
  probe.validate();
  if (dataset.empty()) throw DomainError("m_sharpness: empty dataset");
  const std::vector<Batch> batches = dataset.batches(probe.m);
  std::vector<std::unique_ptr<ModelObjective>> owned;
  std::vector<const Objective*> views;
  for (const Batch& b : batches) {
    owned.push_back(std::make_unique<ModelObjective>(model, b, smoothing));
    views.push_back(owned.back().get());
  }
  return m_sharpness(views, params, probe, rng);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
  const double na = l2_norm(a);
  const double nb = l2_norm(b);
  if (na == 0.0 || nb == 0.0) throw DomainError("cosine_similarity: zero vector");
  return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

std::optional<double> grad_cosine(const Objective& loss, const ParamSet& params,
                                  const SharpnessProbe& probe, RngStream& rng) {
  probe.validate();
  const std::vector<double> g0 = loss.gradient(params.theta);
  const std::vector<double> eps = probe_direction(params, g0, probe, rng);
  const std::vector<double> g1 = loss.gradient(add(params.theta, eps));
  if (l2_norm(g0) == 0.0 || l2_norm(g1) == 0.0) return std::nullopt;
  return cosine_similarity(g0, g1);
}

double path_distance(std::span<const ParamSet> checkpoints) {
  if (checkpoints.size() < 2) throw DomainError("path_distance: need at least two checkpoints");
  double total = 0.0;
  for (std::size_t i = 1; i < checkpoints.size(); ++i) {
    if (checkpoints[i].theta.size() != checkpoints[0].theta.size()) {
      throw DomainError("path_distance: checkpoint length mismatch");
    }
    total += l2_norm(subtract(checkpoints[i].theta, checkpoints[i - 1].theta));
  }
  return total;
}

namespace {

double fd_step(std::span<const double> theta) {
  double ss = 0.0;
  for (double x : theta) ss += x * x;
  const double rms = theta.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(theta.size()));
  return 1e-4 * std::max(1.0, rms);
}

}  // namespace

double hessian_trace(const Objective& loss, std::span<const double> theta, std::size_t probes,
                     RngStream& rng) {
  if (probes < 1) throw DomainError("hessian_trace: probes must be >= 1");
  const std::size_t k = theta.size();
  const double h = fd_step(theta);
  std::vector<double> z(k);
  std::vector<double> plus(k);
  std::vector<double> minus(k);
  std::vector<double> g_plus(k);
  std::vector<double> g_minus(k);
  double total = 0.0;
  for (std::size_t p = 0; p < probes; ++p) {
    for (std::size_t i = 0; i < k; ++i) {
      z[i] = (rng.next_u64() >> 63) != 0 ? 1.0 : -1.0;
      plus[i] = theta[i] + h * z[i];
      minus[i] = theta[i] - h * z[i];
    }
    loss.value_and_gradient(plus, g_plus);
    loss.value_and_gradient(minus, g_minus);
    double quad = 0.0;
    for (std::size_t i = 0; i < k; ++i) quad += z[i] * (g_plus[i] - g_minus[i]);
    total += quad / (2.0 * h);
  }
  const double estimate = total / static_cast<double>(probes);
  if (!std::isfinite(estimate)) throw NumericError("hessian_trace: non-finite estimate");
  return estimate;
}

double hessian_trace_dense(const Objective& loss, std::span<const double> theta) {
  const std::size_t k = theta.size();
  const double h = fd_step(theta);
  std::vector<double> point(theta.begin(), theta.end());
  std::vector<double> g_plus(k);
  std::vector<double> g_minus(k);
  double trace = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    point[i] = theta[i] + h;
    loss.value_and_gradient(point, g_plus);
    point[i] = theta[i] - h;
    loss.value_and_gradient(point, g_minus);
    point[i] = theta[i];
    trace += (g_plus[i] - g_minus[i]) / (2.0 * h);
  }
  if (!std::isfinite(trace)) throw NumericError("hessian_trace_dense: non-finite trace");
  return trace;
}

std::vector<double> filter_normalized_direction(const ParamSet& params, RngStream& rng) {
  params.validate();
  std::vector<double> d(params.theta.size());
  for (double& x : d) x = rng.standard_normal();
  for (const FilterSlice& f : params.partition) {
    const auto ws = std::span<const double>(params.theta).subspan(f.offset, f.length);
    const auto ds = std::span<double>(d).subspan(f.offset, f.length);
    const double dn = l2_norm(ds);
    const double wn = l2_norm(ws);
    const double scale = dn > 0.0 ? wn / dn : 0.0;
    for (double& x : ds) x *= scale;
  }
  return d;
}

void LossSliceSpec::validate() const {
  if (direction_count != 1 && direction_count != 2) throw DomainError("loss slice needs 1 or 2 directions");
  if (grid < 3 || grid % 2 == 0) throw DomainError("loss slice grid must be odd and >= 3");
  if (!(extent > 0.0)) throw DomainError("loss slice extent must be positive");
}

LossSlice loss_slice(const Objective& loss, const ParamSet& params, const LossSliceSpec& spec,
                     RngStream& rng) {
  spec.validate();
  LossSlice out;
  for (std::size_t d = 0; d < spec.direction_count; ++d) {
    if (spec.filter_normalized) {
      out.directions.push_back(filter_normalized_direction(params, rng));
    } else {
      std::vector<double> dir(params.theta.size());
      for (double& x : dir) x = rng.standard_normal();
      out.directions.push_back(std::move(dir));
    }
  }
  // Exact center and exact symmetry: alpha_i = extent * (2i - (g-1)) / (g-1).
  const auto half = static_cast<std::ptrdiff_t>(spec.grid - 1);
  for (std::size_t i = 0; i < spec.grid; ++i) {
    const auto num = static_cast<double>(2 * static_cast<std::ptrdiff_t>(i) - half);
    out.alphas.push_back(spec.extent * num / static_cast<double>(half));
  }
  out.betas = spec.direction_count == 2 ? out.alphas : std::vector<double>{0.0};

  std::vector<double> point(params.theta.size());
  for (double a : out.alphas) {
    for (double b : out.betas) {
      for (std::size_t j = 0; j < point.size(); ++j) {
        double v = params.theta[j] + a * out.directions[0][j];
        if (spec.direction_count == 2) v += b * out.directions[1][j];
        point[j] = v;
      }
      out.values.push_back(loss.value(point));
    }
  }
  return out;
}

void write_slice_csv(const std::filesystem::path& path, const LossSlice& slice,
                     const std::string& config_hash) {
  std::ofstream out(path);
  if (!out) throw DomainError("cannot write '" + path.string() + "'");
  if (!config_hash.empty()) out << "# config_hash=" << config_hash << '\n';
  out << "alpha,beta,loss\n";
  char buf[128];
  for (std::size_t i = 0; i < slice.alphas.size(); ++i) {
    for (std::size_t j = 0; j < slice.betas.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", slice.alphas[i], slice.betas[j], slice.at(i, j));
      out << buf;
    }
  }
}

}  // namespace flatnoise
