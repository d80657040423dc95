// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/rng.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace flatnoise {

std::string_view to_string(StreamId id) {
  switch (id) {
    case StreamId::DataShuffle: return "data-shuffle";
    case StreamId::NoiseTrain: return "noise-train";
    case StreamId::NoiseEval: return "noise-eval";
    case StreamId::Init: return "init";
  }
  return "unknown";
}

namespace {

std::mt19937_64 make_engine(std::uint64_t seed, StreamId id, std::uint64_t replicate) {
  std::seed_seq seq{
      static_cast<std::uint32_t>(seed & 0xffffffffu),
      static_cast<std::uint32_t>(seed >> 32),
      static_cast<std::uint32_t>(id),
      static_cast<std::uint32_t>(replicate & 0xffffffffu),
      static_cast<std::uint32_t>(replicate >> 32),
      0x9e3779b9u,
  };
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, StreamId id, std::uint64_t replicate)
    : seed_(seed), id_(id), replicate_(replicate), engine_(make_engine(seed, id, replicate)) {}

double RngStream::uniform_open() {
  // (k + 0.5) / 2^53 for k in [0, 2^53): never 0 or 1.
  const std::uint64_t k = engine_() >> 11;
  return (static_cast<double>(k) + 0.5) * 0x1.0p-53;
}

double RngStream::standard_normal() { return normal_quantile(uniform_open()); }

std::uint64_t RngStream::below(std::uint64_t bound) {
  if (bound == 0) throw DomainError("RngStream::below: bound must be positive");
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t x = engine_();
    if (x < limit) return x % bound;
  }
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw DomainError("normal_quantile: p must lie in (0, 1)");

  static constexpr std::array<double, 6> a = {-3.969683028665376e+01, 2.209460984245205e+02,
                                              -2.759285104469687e+02, 1.383577518672690e+02,
                                              -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr std::array<double, 5> b = {-5.447609879822406e+01, 1.615858368580409e+02,
                                              -1.556989798598866e+02, 6.680131188771972e+01,
                                              -1.328068155692980e+01};
  static constexpr std::array<double, 6> c = {-7.784894002430293e-03, -3.223964580411365e-01,
                                              -2.400758277161838e+00, -2.549732539343734e+00,
                                              4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr std::array<double, 4> d = {7.784695709041462e-03, 3.224671290700398e-01,
                                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double p_low = 0.02425;

  double x;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - p_low) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }

  // Halley step on Phi(x) - p.
  const double e = 0.5 * std::erfc(-x / std::numbers::sqrt2) - p;
  const double u = e * std::sqrt(2.0 * std::numbers::pi) * std::exp(x * x / 2.0);
  x = x - u / (1.0 + x * u / 2.0);
  return x;
}

double laplace_quantile(double u, double scale) {
  if (!(u > 0.0 && u < 1.0)) throw DomainError("laplace_quantile: u must lie in (0, 1)");
  const double centered = u - 0.5;
  if (centered == 0.0) return 0.0;
  const double magnitude = -scale * std::log1p(-2.0 * std::abs(centered));
  return centered < 0.0 ? -magnitude : magnitude;
}

DenseTensor normal_sample(RngStream& rng, std::size_t n, double mean, double std) {
  if (!(std >= 0.0)) throw DomainError("normal_sample: std must be non-negative");
  DenseTensor out({n}, mean);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = rng.standard_normal();
    if (std > 0.0) out[i] = mean + std * z;
  }
  return out;
}

DenseTensor laplace_sample(RngStream& rng, std::size_t n, double scale) {
  if (!(scale >= 0.0)) throw DomainError("laplace_sample: scale must be non-negative");
  DenseTensor out({n}, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform_open();
    if (scale > 0.0) out[i] = laplace_quantile(u, scale);
  }
  return out;
}

std::vector<std::size_t> permutation(RngStream& rng, std::size_t n) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace flatnoise
