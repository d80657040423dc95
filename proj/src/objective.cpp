// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/objective.hpp"

namespace flatnoise {

QuadraticObjective::QuadraticObjective(std::vector<double> hessian, std::vector<double> center,
                                       double offset)
    : hessian_(std::move(hessian)), center_(std::move(center)), offset_(offset) {
  if (hessian_.size() != center_.size() * center_.size()) {
    throw DomainError("quadratic objective: hessian must be k x k");
  }
}

QuadraticObjective QuadraticObjective::diagonal(std::span<const double> diag,
                                                std::vector<double> center, double offset) {
  const std::size_t k = diag.size();
  std::vector<double> h(k * k, 0.0);
  for (std::size_t i = 0; i < k; ++i) h[i * k + i] = diag[i];
  return QuadraticObjective(std::move(h), std::move(center), offset);
}

double QuadraticObjective::value(std::span<const double> theta) const {
  std::vector<double> g(theta.size());
  return value_and_gradient(theta, g);
}

double QuadraticObjective::value_and_gradient(std::span<const double> theta,
                                              std::span<double> gradient) const {
  const std::size_t k = center_.size();
  if (theta.size() != k || gradient.size() != k) throw DomainError("quadratic objective: size mismatch");
  std::vector<double> d(k);
  for (std::size_t i = 0; i < k; ++i) d[i] = theta[i] - center_[i];
  double quad = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < k; ++j) row += hessian_[i * k + j] * d[j];
    gradient[i] = row;
    quad += d[i] * row;
  }
  return 0.5 * quad + offset_;
}

double QuadraticObjective::trace() const {
  const std::size_t k = center_.size();
  double t = 0.0;
  for (std::size_t i = 0; i < k; ++i) t += hessian_[i * k + i];
  return t;
}

}  // namespace flatnoise
