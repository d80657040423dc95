// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "flatnoise/data.hpp"
#include "flatnoise/objective.hpp"
#include "flatnoise/perturb.hpp"

namespace flatnoise {

enum class DirectionKind { Ascent, Average };

/// How to perturb when measuring sharpness.
///
/// Ascent moves a distance `magnitude` along the normalized batch gradient.
/// Average draws `num_samples` noise vectors from `noise` with strength
/// `magnitude`; by default that is the per-filter scaled gaussian used in
/// training, while noise.per_filter_scaling = false gives plain isotropic
/// noise.
struct SharpnessProbe {
  DirectionKind kind = DirectionKind::Ascent;
  double magnitude = 0.0;
  std::size_t m = 64;
  std::size_t num_samples = 1;
  NoiseSpec noise = NoiseSpec::gaussian(0.0);

  void validate() const;
};

/// Mean over batches of L_b(w + eps) - L_b(w).
double m_sharpness(std::span<const Objective* const> batches, const ParamSet& params,
                   const SharpnessProbe& probe, RngStream& rng);

/// Splits `dataset` in order into batches of probe.m and measures
/// m-sharpness of the smoothed CE loss.
double m_sharpness(const ModelSpec& model, const ParamSet& params, const Dataset& dataset,
                   const SharpnessProbe& probe, double smoothing, RngStream& rng);

/// Sharpness at w + eps for one perturbation; the quantity the optimizer
/// sees (ascent for SAM, average for RWP).
double sharpness_at(const Objective& loss, std::span<const double> theta, std::span<const double> eps);

/// cos angle(grad L(w), grad L(w + eps)) with eps from the probe's
/// mechanism (num_samples ignored). Empty when either gradient is zero.
std::optional<double> grad_cosine(const Objective& loss, const ParamSet& params,
                                  const SharpnessProbe& probe, RngStream& rng);

double cosine_similarity(std::span<const double> a, std::span<const double> b);

/// Sum of consecutive L2 distances between checkpoints.
double path_distance(std::span<const ParamSet> checkpoints);

/// Hutchinson estimate of tr(H): mean over Rademacher probes z of
/// z^T H z, with Hz from central differences of the gradient at step
/// h = 1e-4 * max(1, rms(theta)).
double hessian_trace(const Objective& loss, std::span<const double> theta, std::size_t probes,
                     RngStream& rng);

/// Deterministic trace from the central-difference Hessian diagonal,
/// sum_i (g_i(w + h e_i) - g_i(w - h e_i)) / 2h. Costs 2k gradients.
double hessian_trace_dense(const Objective& loss, std::span<const double> theta);

/// Random direction with each partition slice rescaled to the L2 norm of
/// the matching slice of `params`.
std::vector<double> filter_normalized_direction(const ParamSet& params, RngStream& rng);

struct LossSliceSpec {
  std::size_t direction_count = 1;
  std::size_t grid = 21;
  double extent = 1.0;
  bool filter_normalized = true;

  void validate() const;
};

/// Loss on the grid alpha x beta (beta = {0} for one direction);
/// values are row-major [alpha][beta].
struct LossSlice {
  std::vector<double> alphas;
  std::vector<double> betas;
  std::vector<double> values;
  std::vector<std::vector<double>> directions;

  double at(std::size_t ia, std::size_t ib) const { return values[ia * betas.size() + ib]; }
};

LossSlice loss_slice(const Objective& loss, const ParamSet& params, const LossSliceSpec& spec,
                     RngStream& rng);

/// CSV with header `alpha,beta,loss`, preceded by a `# config_hash=` line
/// when `config_hash` is non-empty.
void write_slice_csv(const std::filesystem::path& path, const LossSlice& slice,
                     const std::string& config_hash = {});

}  // namespace flatnoise
