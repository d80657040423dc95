// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace flatnoise {

/// Argument outside the documented domain of an operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A NaN or Inf surfaced during computation.
class NumericError : public std::runtime_error {
 public:
  NumericError(const std::string& what, int layer = -1)
      : std::runtime_error(what), layer_(layer) {}
  /// Index of the offending layer, or -1 when not tied to a layer.
  int layer() const noexcept { return layer_; }

 private:
  int layer_;
};

/// Row-major dense array of 64-bit floats.
class DenseTensor {
 public:
  DenseTensor() = default;
  explicit DenseTensor(std::vector<std::size_t> shape, double fill = 0.0);
  DenseTensor(std::vector<std::size_t> shape, std::vector<double> data);

  const std::vector<std::size_t>& shape() const noexcept { return shape_; }
  std::size_t size() const noexcept { return data_.size(); }
  std::size_t rank() const noexcept { return shape_.size(); }
  std::size_t rows() const;
  std::size_t cols() const;

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& at(std::size_t r, std::size_t c) { return data_[r * cols() + c]; }
  double at(std::size_t r, std::size_t c) const { return data_[r * cols() + c]; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  std::span<const double> row(std::size_t r) const;
  std::span<double> row(std::size_t r);

  const std::vector<double>& data() const noexcept { return data_; }
  std::vector<double>& data() noexcept { return data_; }

  bool all_finite() const noexcept;
  /// Throws NumericError naming `context` if any element is NaN/Inf.
  void require_finite(const std::string& context) const;

  bool operator==(const DenseTensor&) const = default;

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

double l2_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);
bool all_finite(std::span<const double> v) noexcept;

/// out = a + b, elementwise.
std::vector<double> add(std::span<const double> a, std::span<const double> b);
/// out = a - b, elementwise.
std::vector<double> subtract(std::span<const double> a, std::span<const double> b);

}  // namespace flatnoise
