// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "flatnoise/objective.hpp"
#include "flatnoise/perturb.hpp"

namespace flatnoise {

/// Quantities entering the perturbed PAC-Bayes complexity term.
struct BoundInputs {
  std::size_t k = 1;       // parameter count
  std::size_t n = 2;       // training-set size
  double delta = 0.05;     // confidence, bound holds w.p. 1 - delta
  double w_norm_sq = 0.0;  // ||w||^2
  double sigma = 0.1;      // isotropic training noise std

  void validate() const;
};

/// sqrt(((k/4) ln(1 + ||w||^2 / (k sigma^2)) + 1/4 + ln(n/delta) + 2 ln(6n + 3k)) / (n - 1)).
/// Natural logarithms throughout.
double h_term(const BoundInputs& in);

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t draws = 0;
};

/// Monte-Carlo estimate of E_eps[L(w + eps)] with antithetic pairs: each of
/// the `draws` noise vectors is evaluated at +eps and -eps and the pair
/// average is one sample. Odd-order Taylor terms cancel exactly within a
/// pair, which removes the dominant gradient-driven variance.
McEstimate expected_perturbed_loss(const Objective& loss, const ParamSet& params, const NoiseSpec& noise,
                                   std::size_t draws, RngStream& rng);

struct BoundResult {
  BoundInputs inputs;
  McEstimate expected_loss;
  double h = 0.0;
  double total = 0.0;
};

/// E_{eps ~ N(0, sigma^2 I)}[L_S(w + eps)] + h_term. Plain isotropic noise by
/// default; per_filter = true swaps in the training noise model.
BoundResult bound_rhs(const Objective& loss, const ParamSet& params, const BoundInputs& inputs,
                      std::size_t mc_samples, RngStream& rng, bool per_filter = false);

enum class TraceMethod { Hutchinson, Dense };

struct TaylorCheck {
  double lhs = 0.0;           // MC E[L(w + eps)]
  double lhs_std_error = 0.0;
  double rhs = 0.0;           // L(w) + sigma^2 / 2 * tr(H)
  double trace = 0.0;
  double gap = 0.0;           // |lhs - rhs|
};

/// Second-order check E[L(w + eps)] ~= L(w) + sigma^2/2 tr(H) under plain
/// isotropic noise of std sigma.
TaylorCheck taylor_check(const Objective& loss, const ParamSet& params, double sigma, std::size_t mc_samples,
                         RngStream& rng, TraceMethod method = TraceMethod::Dense,
                         std::size_t hutchinson_probes = 200);

struct MonotoneEntry {
  double sigma = 0.0;
  McEstimate loss;
  /// For entries after the first: the paired difference to the previous
  /// sigma is positive outside the confidence interval. True for the first.
  bool ordered = true;
};

/// Expected perturbed loss at each sigma (ascending, >= 1 entry) using common
/// random numbers across sigmas, so adjacent differences are estimated from
/// paired samples. `noise` supplies family and scaling; its strength is
/// ignored.
std::vector<MonotoneEntry> monotone_sigma_check(const Objective& loss, const ParamSet& params,
                                                std::span<const double> sigmas, std::size_t mc_samples,
                                                RngStream& rng,
                                                const NoiseSpec& noise = NoiseSpec::gaussian(0.0, false),
                                                double confidence_z = 1.96);

}  // namespace flatnoise
