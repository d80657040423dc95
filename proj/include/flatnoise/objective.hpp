// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "flatnoise/network.hpp"

namespace flatnoise {

/// Differentiable scalar loss over a flat parameter vector.
///
/// Optimizer steps and landscape probes are written against this interface
/// so that they run unchanged on network minibatches and on closed-form test
/// functions.
class Objective {
 public:
  virtual ~Objective() = default;

  virtual std::size_t dimension() const = 0;
  virtual double value(std::span<const double> theta) const = 0;
  /// Returns the value and writes the gradient into `gradient`.
  virtual double value_and_gradient(std::span<const double> theta,
                                    std::span<double> gradient) const = 0;

  std::vector<double> gradient(std::span<const double> theta) const {
    std::vector<double> g(theta.size());
    value_and_gradient(theta, g);
    return g;
  }
};

/// Network loss on one fixed batch. Holds references; the model and batch
/// must outlive it.
class ModelObjective final : public Objective {
 public:
  ModelObjective(const ModelSpec& model, const Batch& batch, double smoothing)
      : model_(model), batch_(batch), smoothing_(smoothing) {}

  std::size_t dimension() const override { return model_.param_count(); }
  double value(std::span<const double> theta) const override {
    return forward_loss(model_, theta, batch_, smoothing_);
  }
  double value_and_gradient(std::span<const double> theta,
                            std::span<double> gradient) const override {
    return loss_and_grad(model_, theta, batch_, smoothing_, gradient);
  }

 private:
  const ModelSpec& model_;
  const Batch& batch_;
  double smoothing_;
};

/// 0.5 (w - c)^T A (w - c) + offset with dense symmetric A (row-major).
class QuadraticObjective final : public Objective {
 public:
  QuadraticObjective(std::vector<double> hessian, std::vector<double> center, double offset = 0.0);
  static QuadraticObjective diagonal(std::span<const double> diag, std::vector<double> center,
                                     double offset = 0.0);

  std::size_t dimension() const override { return center_.size(); }
  double value(std::span<const double> theta) const override;
  double value_and_gradient(std::span<const double> theta,
                            std::span<double> gradient) const override;
  double trace() const;

 private:
  std::vector<double> hessian_;
  std::vector<double> center_;
  double offset_;
};

}  // namespace flatnoise
