// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "flatnoise/network.hpp"
#include "flatnoise/rng.hpp"

namespace flatnoise {

/// Weight-value dependent programming error of an analog device, as a
/// piecewise-linear table of (weight, std) knots clamped at both ends.
class DeviceErrorModel {
 public:
  DeviceErrorModel() = default;
  /// Knots must be non-empty, strictly increasing in weight, with std >= 0.
  explicit DeviceErrorModel(std::vector<std::pair<double, double>> knots);

  /// Two-column CSV (weight,std); a non-numeric first line is a header.
  static DeviceErrorModel from_csv(const std::filesystem::path& path);

  double std_at(double weight) const;
  const std::vector<std::pair<double, double>>& knots() const noexcept { return knots_; }

 private:
  std::vector<std::pair<double, double>> knots_;
};

enum class NoiseFamily { Gaussian, Laplace, Device };

std::string_view to_string(NoiseFamily f);
NoiseFamily parse_noise_family(std::string_view name);

/// Perturbation distribution Q.
///
/// For the gaussian family a filter f with largest magnitude M_f receives
/// i.i.d. N(0, (strength * M_f)^2) noise: the standard deviation, not the
/// variance, scales with M_f, so the noise stays a fixed fraction of the
/// weight magnitude under any rescaling of the filter. Laplace uses scale
/// strength * M_f. With per_filter_scaling off the noise is plain isotropic
/// (std = strength), which is the form the PAC-Bayes bound is stated for.
/// The device family draws N(0, (strength * table_std(w_j))^2) per weight.
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::Gaussian;
  double strength = 0.0;
  bool per_filter_scaling = true;
  std::shared_ptr<const DeviceErrorModel> device;

  void validate() const;

  static NoiseSpec gaussian(double sigma, bool per_filter = true) {
    return {NoiseFamily::Gaussian, sigma, per_filter, nullptr};
  }
  static NoiseSpec laplace(double b, bool per_filter = true) {
    return {NoiseFamily::Laplace, b, per_filter, nullptr};
  }
};

/// Draws one perturbation over all of `theta`. Consumes exactly
/// theta.size() engine outputs regardless of strength; strength 0 yields
/// exact zeros.
std::vector<double> sample_noise(std::span<const double> theta, std::span<const FilterSlice> partition,
                                 const NoiseSpec& spec, RngStream& rng);
inline std::vector<double> sample_noise(const ParamSet& params, const NoiseSpec& spec, RngStream& rng) {
  return sample_noise(params.theta, params.partition, spec, rng);
}

/// Elementwise device noise at unit scale.
std::vector<double> device_noise(std::span<const double> theta, const DeviceErrorModel& model,
                                 RngStream& rng);

/// Scale factor s such that device noise at strength s has expected
/// whole-network RMSE equal to `target_rmse` for weights `theta`.
double calibrate_device_scale(std::span<const double> theta, const DeviceErrorModel& model,
                              double target_rmse);

/// One normalized gradient-ascent step of length rho: rho * g / ||g||.
/// Zero when rho == 0 or g == 0.
std::vector<double> sam_ascent(std::span<const double> gradient, double rho);

enum class ScheduleKind { Constant, Linear, Quadratic };

std::string_view to_string(ScheduleKind k);
ScheduleKind parse_schedule_kind(std::string_view name);

/// Warm-up of a perturbation strength (sigma for RWP, rho for SAM).
///
/// Schedules are defined on the squared strength:
///   quadratic: s_t^2 = s_max^2 * (min(t, T*) / T*)^2
///   linear:    s_t^2 = s_max^2 * (min(t, T*) / T*)
/// and strength_at returns the square root.
struct Schedule {
  ScheduleKind kind = ScheduleKind::Constant;
  double max_strength = 0.0;
  std::uint64_t warmup_iters = 1;

  void validate() const;
  double variance_at(std::uint64_t t) const;
  double strength_at(std::uint64_t t) const;

  static Schedule constant(double s) { return {ScheduleKind::Constant, s, 1}; }
};

inline double strength_at(const Schedule& schedule, std::uint64_t t) { return schedule.strength_at(t); }

}  // namespace flatnoise
