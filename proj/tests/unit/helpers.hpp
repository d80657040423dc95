// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "flatnoise/data.hpp"
#include "flatnoise/network.hpp"
#include "flatnoise/objective.hpp"
#include "flatnoise/rng.hpp"

namespace flatnoise::testing {

inline Batch random_batch(std::size_t m, std::size_t dim, std::size_t classes, RngStream& rng) {
  Batch b;
  b.inputs = DenseTensor({m, dim});
  for (double& v : b.inputs.values()) v = rng.standard_normal();
  for (std::size_t i = 0; i < m; ++i) b.labels.push_back(static_cast<std::int32_t>(rng.below(classes)));
  return b;
}

inline std::vector<double> random_vector(std::size_t n, RngStream& rng, double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * rng.standard_normal();
  return v;
}

/// Central-difference gradient of `f` at `x` with step h.
template <typename F>
std::vector<double> fd_gradient(F&& f, std::vector<double> x, double h) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + h;
    const double up = f(x);
    x[i] = x0 - h;
    const double down = f(x);
    x[i] = x0;
    g[i] = (up - down) / (2.0 * h);
  }
  return g;
}

/// a . w + b
class LinearObjective final : public Objective {
 public:
  LinearObjective(std::vector<double> a, double b) : a_(std::move(a)), b_(b) {}
  std::size_t dimension() const override { return a_.size(); }
  double value(std::span<const double> theta) const override {
    double s = b_;
    for (std::size_t i = 0; i < a_.size(); ++i) s += a_[i] * theta[i];
    return s;
  }
  double value_and_gradient(std::span<const double> theta, std::span<double> g) const override {
    for (std::size_t i = 0; i < a_.size(); ++i) g[i] = a_[i];
    return value(theta);
  }

 private:
  std::vector<double> a_;
  double b_;
};

/// Sum of two objectives.
class SumObjective final : public Objective {
 public:
  SumObjective(const Objective& a, const Objective& b) : a_(a), b_(b) {}
  std::size_t dimension() const override { return a_.dimension(); }
  double value(std::span<const double> theta) const override { return a_.value(theta) + b_.value(theta); }
  double value_and_gradient(std::span<const double> theta, std::span<double> g) const override {
    std::vector<double> tmp(g.size());
    const double v = a_.value_and_gradient(theta, g) + b_.value_and_gradient(theta, tmp);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += tmp[i];
    return v;
  }

 private:
  const Objective& a_;
  const Objective& b_;
};

inline void put_be32(std::ofstream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

/// Writes an IDX image file [n x rows x cols] and a label file.
inline void write_idx(const std::filesystem::path& images, const std::filesystem::path& labels, std::size_t rows,
                      std::size_t cols, const std::vector<unsigned char>& pixels,
                      const std::vector<unsigned char>& label_bytes, std::uint32_t image_magic = 0x00000803,
                      std::uint32_t label_magic = 0x00000801) {
  const std::size_t n = label_bytes.size();
  {
    std::ofstream out(images, std::ios::binary);
    put_be32(out, image_magic);
    put_be32(out, static_cast<std::uint32_t>(n));
    put_be32(out, static_cast<std::uint32_t>(rows));
    put_be32(out, static_cast<std::uint32_t>(cols));
    out.write(reinterpret_cast<const char*>(pixels.data()), static_cast<std::streamsize>(pixels.size()));
  }
  std::ofstream out(labels, std::ios::binary);
  put_be32(out, label_magic);
  put_be32(out, static_cast<std::uint32_t>(n));
  out.write(reinterpret_cast<const char*>(label_bytes.data()), static_cast<std::streamsize>(n));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("flatnoise_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline double max_rel_error(std::span<const double> a, std::span<const double> b, double floor = 1e-8) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom = std::max({std::abs(a[i]), std::abs(b[i]), floor});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

}  // namespace flatnoise::testing
