// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace flatnoise {

DeviceErrorModel::DeviceErrorModel(std::vector<std::pair<double, double>> knots)
    : knots_(std::move(knots)) {
  if (knots_.empty()) throw DomainError("device error table is empty");
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!(knots_[i].second >= 0.0)) throw DomainError("device error table has negative std");
    if (i > 0 && !(knots_[i].first > knots_[i - 1].first)) {
      throw DomainError("device error table weights must be strictly increasing");
    }
  }
}

DeviceErrorModel DeviceErrorModel::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open device table '" + path.string() + "'");
  std::vector<std::pair<double, double>> knots;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double w = 0.0;
    double s = 0.0;
    if (!(fields >> w >> s)) {
      if (first) {
        first = false;
        continue;
      }
      throw DomainError("malformed device table row: '" + line + "'");
    }
    first = false;
    knots.emplace_back(w, s);
  }
  return DeviceErrorModel(std::move(knots));
}

double DeviceErrorModel::std_at(double weight) const {
  if (knots_.empty()) throw DomainError("device error table is empty");
  if (weight <= knots_.front().first) return knots_.front().second;
  if (weight >= knots_.back().first) return knots_.back().second;
  const auto upper = std::upper_bound(knots_.begin(), knots_.end(), weight,
                                      [](double w, const auto& k) { return w < k.first; });
  const auto lower = upper - 1;
  const double frac = (weight - lower->first) / (upper->first - lower->first);
  return lower->second + frac * (upper->second - lower->second);
}

std::string_view to_string(NoiseFamily f) {
  switch (f) {
    case NoiseFamily::Gaussian: return "gaussian";
    case NoiseFamily::Laplace: return "laplace";
    case NoiseFamily::Device: return "device";
  }
  return "unknown";
}

NoiseFamily parse_noise_family(std::string_view name) {
  if (name == "gaussian") return NoiseFamily::Gaussian;
  if (name == "laplace") return NoiseFamily::Laplace;
  if (name == "device") return NoiseFamily::Device;
  throw DomainError("unknown noise family '" + std::string(name) + "'");
}

void NoiseSpec::validate() const {
  if (!(strength >= 0.0)) throw DomainError("noise strength must be non-negative");
  if (family == NoiseFamily::Device && !device) throw DomainError("device noise requires a table");
}

std::vector<double> sample_noise(std::span<const double> theta, std::span<const FilterSlice> partition,
                                 const NoiseSpec& spec, RngStream& rng) {
  spec.validate();
  std::vector<double> eps(theta.size(), 0.0);
  const bool zero = spec.strength == 0.0;

  if (spec.family == NoiseFamily::Device) {
    for (std::size_t j = 0; j < theta.size(); ++j) {
      const double z = rng.standard_normal();
      const double s = spec.strength * spec.device->std_at(theta[j]);
      if (s > 0.0) eps[j] = s * z;
    }
    return eps;
  }

  auto draw = [&](std::size_t begin, std::size_t end, double scale) {
    for (std::size_t j = begin; j < end; ++j) {
      if (spec.family == NoiseFamily::Gaussian) {
        const double z = rng.standard_normal();
        if (scale > 0.0) eps[j] = z * scale;
      } else {
        const double u = rng.uniform_open();
        if (scale > 0.0) eps[j] = laplace_quantile(u, scale);
      }
    }
  };

  if (!spec.per_filter_scaling) {
    draw(0, theta.size(), zero ? 0.0 : spec.strength);
    return eps;
  }
  std::size_t covered = 0;
  for (const FilterSlice& f : partition) {
    const double scale = zero ? 0.0 : spec.strength * filter_max_abs(theta, f);
    draw(f.offset, f.offset + f.length, scale);
    covered += f.length;
  }
  if (covered != theta.size()) throw DomainError("sample_noise: partition does not cover theta");
  return eps;
}

std::vector<double> device_noise(std::span<const double> theta, const DeviceErrorModel& model,
                                 RngStream& rng) {
  NoiseSpec spec{NoiseFamily::Device, 1.0, false,
                 std::make_shared<const DeviceErrorModel>(model)};
  return sample_noise(theta, {}, spec, rng);
}

double calibrate_device_scale(std::span<const double> theta, const DeviceErrorModel& model,
                              double target_rmse) {
  if (!(target_rmse >= 0.0)) throw DomainError("target RMSE must be non-negative");
  if (theta.empty()) throw DomainError("calibrate_device_scale: empty parameter vector");
  double mean_var = 0.0;
  for (double w : theta) {
    const double s = model.std_at(w);
    mean_var += s * s;
  }
  mean_var /= static_cast<double>(theta.size());
  if (mean_var == 0.0) throw DomainError("device table yields zero noise for these weights");
  return target_rmse / std::sqrt(mean_var);
}

std::vector<double> sam_ascent(std::span<const double> gradient, double rho) {
  if (!(rho >= 0.0)) throw DomainError("sam_ascent: rho must be non-negative");
  std::vector<double> eps(gradient.size(), 0.0);
  const double norm = l2_norm(gradient);
  if (rho == 0.0 || norm == 0.0) return eps;
  const double scale = rho / norm;
  for (std::size_t i = 0; i < gradient.size(); ++i) eps[i] = scale * gradient[i];
  return eps;
}

std::string_view to_string(ScheduleKind k) {
  switch (k) {
    case ScheduleKind::Constant: return "constant";
    case ScheduleKind::Linear: return "linear";
    case ScheduleKind::Quadratic: return "quadratic";
  }
  return "unknown";
}

ScheduleKind parse_schedule_kind(std::string_view name) {
  if (name == "constant") return ScheduleKind::Constant;
  if (name == "linear") return ScheduleKind::Linear;
  if (name == "quadratic") return ScheduleKind::Quadratic;
  throw DomainError("unknown schedule kind '" + std::string(name) + "'");
}

void Schedule::validate() const {
  if (!(max_strength >= 0.0)) throw DomainError("schedule max_strength must be non-negative");
  if (kind != ScheduleKind::Constant && warmup_iters < 1) {
    throw DomainError("schedule warmup_iters must be >= 1");
  }
}

double Schedule::variance_at(std::uint64_t t) const {
  validate();
  const double peak = max_strength * max_strength;
  if (kind == ScheduleKind::Constant) return peak;
  const double frac =
      static_cast<double>(std::min(t, warmup_iters)) / static_cast<double>(warmup_iters);
  return kind == ScheduleKind::Quadratic ? peak * (frac * frac) : peak * frac;
}

double Schedule::strength_at(std::uint64_t t) const {
  if (kind == ScheduleKind::Constant) return max_strength;
  if (t >= warmup_iters) return max_strength;
  return std::sqrt(variance_at(t));
}

}  // namespace flatnoise
