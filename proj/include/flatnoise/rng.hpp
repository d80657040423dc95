// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "flatnoise/tensor.hpp"

namespace flatnoise {

/// Labels for independent random streams derived from one experiment seed.
enum class StreamId : std::uint32_t {
  DataShuffle = 1,
  NoiseTrain = 2,
  NoiseEval = 3,
  Init = 4,
};

std::string_view to_string(StreamId id);

/// Deterministic random stream keyed by (seed, stream id, replicate).
///
/// The engine is std::mt19937_64 seeded through std::seed_seq, both of which
/// are fully specified by the standard, so sequences agree across platforms.
/// Distribution transforms are implemented here rather than via <random>
/// distributions, whose algorithms are implementation-defined.
///
/// Every draw consumes exactly one 64-bit engine output, so the number of
/// engine steps per call is a function of the call's arguments only.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamId id, std::uint64_t replicate = 0);

  std::uint64_t seed() const noexcept { return seed_; }
  StreamId id() const noexcept { return id_; }
  std::uint64_t replicate() const noexcept { return replicate_; }

  /// Independent substream with the same (seed, id) and a new replicate index.
  RngStream substream(std::uint64_t replicate) const {
    return RngStream(seed_, id_, replicate);
  }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform draw on the open interval (0, 1) with 53-bit resolution.
  double uniform_open();
  /// Standard normal via inverse-CDF of uniform_open().
  double standard_normal();
  /// Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t seed_;
  StreamId id_;
  std::uint64_t replicate_;
  std::mt19937_64 engine_;
};

/// Inverse of the standard normal CDF for p in (0, 1).
///
/// Acklam's rational approximation followed by one Halley refinement step
/// against std::erfc, giving close to full double precision.
double normal_quantile(double p);

/// Inverse CDF of Laplace(0, scale) at u in (0, 1).
double laplace_quantile(double u, double scale);

/// n i.i.d. draws from N(mean, std^2). Always consumes n engine outputs;
/// std == 0 returns exactly `mean` in every slot.
DenseTensor normal_sample(RngStream& rng, std::size_t n, double mean, double std);

/// n i.i.d. draws from Laplace(0, scale). Always consumes n engine outputs;
/// scale == 0 returns exact zeros.
DenseTensor laplace_sample(RngStream& rng, std::size_t n, double scale);

/// Fisher-Yates permutation of [0, n) driven by `rng`.
std::vector<std::size_t> permutation(RngStream& rng, std::size_t n);

}  // namespace flatnoise
