// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "flatnoise/rng.hpp"
#include "flatnoise/tensor.hpp"

namespace flatnoise {

enum class Activation { Relu, Tanh };

std::string_view to_string(Activation a);
Activation parse_activation(std::string_view name);

/// Fully connected classifier: input -> hidden... -> num_classes logits.
/// An empty `hidden` list is a linear (multinomial logistic) model.
struct ModelSpec {
  std::size_t input_dim = 2;
  std::vector<std::size_t> hidden;
  Activation activation = Activation::Relu;
  std::size_t num_classes = 2;

  /// Throws DomainError when a width is zero or fewer than 2 classes.
  void validate() const;
  std::size_t layer_count() const { return hidden.size() + 1; }
  std::size_t fan_in(std::size_t layer) const;
  std::size_t fan_out(std::size_t layer) const;
  std::size_t param_count() const;

  bool operator==(const ModelSpec&) const = default;
};

enum class SliceKind { WeightFilter, Bias };

std::string_view to_string(SliceKind k);

/// Contiguous run of parameters treated as one unit by the noise model.
struct FilterSlice {
  std::size_t offset = 0;
  std::size_t length = 0;
  SliceKind kind = SliceKind::WeightFilter;

  bool operator==(const FilterSlice&) const = default;
};

/// Flat parameter vector with its filter partition.
///
/// Layout per layer: the [out x in] weight matrix row-major, then the bias.
/// Each weight row is one WeightFilter slice and each bias vector one Bias
/// slice; slices are ordered, disjoint and cover theta exactly.
struct ParamSet {
  std::vector<double> theta;
  std::vector<FilterSlice> partition;

  std::size_t size() const noexcept { return theta.size(); }
  /// Throws DomainError if the partition does not tile theta.
  void validate() const;

  /// Single weight-filter slice covering the whole vector.
  static ParamSet single_filter(std::vector<double> theta);
};

/// Partition for `model` as described on ParamSet.
std::vector<FilterSlice> model_partition(const ModelSpec& model);

/// He-uniform weights from the init stream, zero biases.
ParamSet init_params(const ModelSpec& model, RngStream& init_rng);

/// Minibatch of m samples with d features.
struct Batch {
  DenseTensor inputs;  // [m x d]
  std::vector<std::int32_t> labels;

  std::size_t size() const noexcept { return labels.size(); }
};

/// Mean label-smoothed cross-entropy; smoothing = 0 gives plain CE.
double forward_loss(const ModelSpec& model, std::span<const double> theta, const Batch& batch,
                    double smoothing);

/// Loss value and its exact reverse-mode gradient written into `gradient`.
double loss_and_grad(const ModelSpec& model, std::span<const double> theta, const Batch& batch,
                     double smoothing, std::span<double> gradient);

std::vector<double> grad(const ModelSpec& model, std::span<const double> theta, const Batch& batch,
                         double smoothing);

/// Logits [m x num_classes].
DenseTensor predict_logits(const ModelSpec& model, std::span<const double> theta,
                           const DenseTensor& inputs);

double filter_max_abs(std::span<const double> theta, const FilterSlice& slice);
inline double filter_max_abs(const ParamSet& params, const FilterSlice& slice) {
  return filter_max_abs(params.theta, slice);
}

/// Count of argmax-correct predictions; ties resolve to the lowest class.
std::size_t correct_count(const ModelSpec& model, std::span<const double> theta, const Batch& batch);

/// Fraction of argmax-correct predictions over all batches.
double accuracy(const ModelSpec& model, std::span<const double> theta, std::span<const Batch> batches);
double accuracy(const ModelSpec& model, std::span<const double> theta, const Batch& batch);

}  // namespace flatnoise
