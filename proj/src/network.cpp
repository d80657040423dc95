// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/network.hpp"

#include <algorithm>
#include <cmath>

namespace flatnoise {

std::string_view to_string(Activation a) {
  return a == Activation::Relu ? "relu" : "tanh";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  throw DomainError("unknown activation '" + std::string(name) + "'");
}

std::string_view to_string(SliceKind k) {
  return k == SliceKind::WeightFilter ? "weight-filter" : "bias";
}

void ModelSpec::validate() const {
  if (input_dim == 0) throw DomainError("model input_dim must be >= 1");
  if (num_classes < 2) throw DomainError("model num_classes must be >= 2");
  for (std::size_t w : hidden) {
    if (w == 0) throw DomainError("hidden layer widths must be >= 1");
  }
}

std::size_t ModelSpec::fan_in(std::size_t layer) const {
  return layer == 0 ? input_dim : hidden[layer - 1];
}

std::size_t ModelSpec::fan_out(std::size_t layer) const {
  return layer < hidden.size() ? hidden[layer] : num_classes;
}

std::size_t ModelSpec::param_count() const {
  std::size_t total = 0;
  for (std::size_t l = 0; l < layer_count(); ++l) total += (fan_in(l) + 1) * fan_out(l);
  return total;
}

void ParamSet::validate() const {
  std::size_t expected = 0;
  for (const FilterSlice& s : partition) {
    if (s.length == 0) throw DomainError("filter slice with zero length");
    if (s.offset != expected) throw DomainError("partition slices are not contiguous");
    expected += s.length;
  }
  if (expected != theta.size()) throw DomainError("partition does not cover theta");
}

ParamSet ParamSet::single_filter(std::vector<double> theta) {
  ParamSet p;
  p.partition = {FilterSlice{0, theta.size(), SliceKind::WeightFilter}};
  p.theta = std::move(theta);
  return p;
}

std::vector<FilterSlice> model_partition(const ModelSpec& model) {
  std::vector<FilterSlice> slices;
  std::size_t offset = 0;
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    const std::size_t in = model.fan_in(l);
    const std::size_t out = model.fan_out(l);
    for (std::size_t r = 0; r < out; ++r) {
      slices.push_back({offset, in, SliceKind::WeightFilter});
      offset += in;
    }
    slices.push_back({offset, out, SliceKind::Bias});
    offset += out;
  }
  return slices;
}

ParamSet init_params(const ModelSpec& model, RngStream& init_rng) {
  model.validate();
  ParamSet p;
  p.theta.assign(model.param_count(), 0.0);
  p.partition = model_partition(model);
  std::size_t offset = 0;
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    const std::size_t in = model.fan_in(l);
    const std::size_t out = model.fan_out(l);
    const double limit = std::sqrt(6.0 / static_cast<double>(in));
    for (std::size_t i = 0; i < in * out; ++i) {
      p.theta[offset + i] = limit * (2.0 * init_rng.uniform_open() - 1.0);
    }
    offset += in * out + out;
  }
  return p;
}

namespace {

// Layer-wise activations of one forward pass. pre[l] holds the affine output
// of layer l, post[l] its activation (post is unused for the final layer).
struct ForwardCache {
  std::vector<std::vector<double>> pre;
  std::vector<std::vector<double>> post;
};

void require_input_shape(const ModelSpec& model, std::span<const double> theta,
                         const DenseTensor& inputs) {
  if (theta.size() != model.param_count()) {
    throw DomainError("parameter vector has " + std::to_string(theta.size()) +
                      " entries, model expects " + std::to_string(model.param_count()));
  }
  if (inputs.size() > 0 && inputs.cols() != model.input_dim) {
    throw DomainError("batch feature dimension " + std::to_string(inputs.cols()) +
                      " does not match model input_dim " + std::to_string(model.input_dim));
  }
}

double activate(Activation a, double z) {
  return a == Activation::Relu ? (z > 0.0 ? z : 0.0) : std::tanh(z);
}

// Derivative in terms of pre-activation z and activation value y.
double activate_grad(Activation a, double z, double y) {
  return a == Activation::Relu ? (z > 0.0 ? 1.0 : 0.0) : 1.0 - y * y;
}

ForwardCache run_forward(const ModelSpec& model, std::span<const double> theta,
                         const DenseTensor& inputs) {
  require_input_shape(model, theta, inputs);
  const std::size_t m = inputs.rows();
  ForwardCache cache;
  cache.pre.resize(model.layer_count());
  cache.post.resize(model.layer_count());

  std::span<const double> prev = inputs.values();
  std::size_t offset = 0;
  for (std::size_t l = 0; l < model.layer_count(); ++l) {
    const std::size_t in = model.fan_in(l);
    const std::size_t out = model.fan_out(l);
    const double* w = theta.data() + offset;
    const double* bias = w + in * out;
    std::vector<double>& z = cache.pre[l];
    z.assign(m * out, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
      const double* x = prev.data() + i * in;
      for (std::size_t o = 0; o < out; ++o) {
        const double* wr = w + o * in;
        double acc = bias[o];
        for (std::size_t j = 0; j < in; ++j) acc += wr[j] * x[j];
        z[i * out + o] = acc;
      }
    }
    if (!all_finite(z)) {
      throw NumericError("non-finite activation in layer " + std::to_string(l), static_cast<int>(l));
    }
    const bool last = l + 1 == model.layer_count();
    if (!last) {
      std::vector<double>& y = cache.post[l];
      y.resize(z.size());
      for (std::size_t i = 0; i < z.size(); ++i) y[i] = activate(model.activation, z[i]);
      prev = y;
    }
    offset += in * out + out;
  }
  return cache;
}

void check_labels(const ModelSpec& model, const Batch& batch) {
  if (batch.inputs.rows() != batch.labels.size()) {
    throw DomainError("batch inputs and labels disagree in length");
  }
  for (std::int32_t y : batch.labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= model.num_classes) {
      throw DomainError("label " + std::to_string(y) + " outside [0, num_classes)");
    }
  }
}

// Mean smoothed CE over rows of `logits`; when `dlogits` is non-empty it
// receives d(loss)/d(logits).
double smoothed_cross_entropy(std::span<const double> logits, std::size_t classes,
                              std::span<const std::int32_t> labels, double smoothing,
                              std::span<double> dlogits) {
  const std::size_t m = labels.size();
  const double off = smoothing / static_cast<double>(classes);
  const double on = 1.0 - smoothing + off;
  const double inv_m = 1.0 / static_cast<double>(m);
  double total = 0.0;
  std::vector<double> logp(classes);
  for (std::size_t i = 0; i < m; ++i) {
    const double* row = logits.data() + i * classes;
    const std::size_t top = static_cast<std::size_t>(std::max_element(row, row + classes) - row);
    const double peak = row[top];
    double rest = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      if (c != top) rest += std::exp(row[c] - peak);
    }
    const double log_norm = std::log1p(rest);
    double sample = 0.0;
    for (std::size_t c = 0; c < classes; ++c) {
      logp[c] = (row[c] - peak) - log_norm;
      const double target = static_cast<std::size_t>(labels[i]) == c ? on : off;
      sample -= target * logp[c];
      if (!dlogits.empty()) dlogits[i * classes + c] = (std::exp(logp[c]) - target) * inv_m;
    }
    total += sample;
  }
  return total * inv_m;
}

}  // namespace

DenseTensor predict_logits(const ModelSpec& model, std::span<const double> theta,
                           const DenseTensor& inputs) {
  ForwardCache cache = run_forward(model, theta, inputs);
  return DenseTensor({inputs.rows(), model.num_classes}, std::move(cache.pre.back()));
}

double forward_loss(const ModelSpec& model, std::span<const double> theta, const Batch& batch,
                    double smoothing) {
  if (!(smoothing >= 0.0 && smoothing < 1.0)) throw DomainError("smoothing must lie in [0, 1)");
  if (batch.size() == 0) throw DomainError("empty batch");
  check_labels(model, batch);
  const ForwardCache cache = run_forward(model, theta, batch.inputs);
  return smoothed_cross_entropy(cache.pre.back(), model.num_classes, batch.labels, smoothing, {});
}

double loss_and_grad(const ModelSpec& model, std::span<const double> theta, const Batch& batch,
                     double smoothing, std::span<double> gradient) {
  if (!(smoothing >= 0.0 && smoothing < 1.0)) throw DomainError("smoothing must lie in [0, 1)");
  if (batch.size() == 0) throw DomainError("empty batch");
  if (gradient.size() != theta.size()) throw DomainError("gradient buffer has wrong length");
  check_labels(model, batch);
  const ForwardCache cache = run_forward(model, theta, batch.inputs);
  const std::size_t m = batch.size();

  std::vector<double> delta(m * model.num_classes);
  const double loss =
      smoothed_cross_entropy(cache.pre.back(), model.num_classes, batch.labels, smoothing, delta);

  std::fill(gradient.begin(), gradient.end(), 0.0);
  std::vector<std::size_t> offsets(model.layer_count());
  {
    std::size_t offset = 0;
    for (std::size_t l = 0; l < model.layer_count(); ++l) {
      offsets[l] = offset;
      offset += (model.fan_in(l) + 1) * model.fan_out(l);
    }
  }

  for (std::size_t l = model.layer_count(); l-- > 0;) {
    const std::size_t in = model.fan_in(l);
    const std::size_t out = model.fan_out(l);
    const double* w = theta.data() + offsets[l];
    double* gw = gradient.data() + offsets[l];
    double* gb = gw + in * out;
    const double* x = l == 0 ? batch.inputs.values().data() : cache.post[l - 1].data();

    for (std::size_t i = 0; i < m; ++i) {
      const double* xi = x + i * in;
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta[i * out + o];
        if (d == 0.0) continue;
        double* gr = gw + o * in;
        for (std::size_t j = 0; j < in; ++j) gr[j] += d * xi[j];
        gb[o] += d;
      }
    }
    if (l == 0) break;

    std::vector<double> prev_delta(m * in, 0.0);
    const std::vector<double>& z = cache.pre[l - 1];
    const std::vector<double>& y = cache.post[l - 1];
    for (std::size_t i = 0; i < m; ++i) {
      double* pd = prev_delta.data() + i * in;
      for (std::size_t o = 0; o < out; ++o) {
        const double d = delta[i * out + o];
        if (d == 0.0) continue;
        const double* wr = w + o * in;
        for (std::size_t j = 0; j < in; ++j) pd[j] += d * wr[j];
      }
      for (std::size_t j = 0; j < in; ++j) {
        pd[j] *= activate_grad(model.activation, z[i * in + j], y[i * in + j]);
      }
    }
    delta = std::move(prev_delta);
  }
  if (!all_finite(gradient)) throw NumericError("non-finite gradient");
  return loss;
}

std::vector<double> grad(const ModelSpec& model, std::span<const double> theta, const Batch& batch,
                         double smoothing) {
  std::vector<double> g(theta.size());
  loss_and_grad(model, theta, batch, smoothing, g);
  return g;
}

double filter_max_abs(std::span<const double> theta, const FilterSlice& slice) {
  if (slice.offset + slice.length > theta.size()) throw DomainError("filter slice out of range");
  double best = 0.0;
  for (std::size_t i = slice.offset; i < slice.offset + slice.length; ++i) {
    best = std::max(best, std::abs(theta[i]));
  }
  return best;
}

std::size_t correct_count(const ModelSpec& model, std::span<const double> theta, const Batch& batch) {
  check_labels(model, batch);
  if (batch.size() == 0) return 0;
  const DenseTensor logits = predict_logits(model, theta, batch.inputs);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const std::span<const double> row = logits.row(i);
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    if (best == static_cast<std::size_t>(batch.labels[i])) ++correct;
  }
  return correct;
}

double accuracy(const ModelSpec& model, std::span<const double> theta, std::span<const Batch> batches) {
  std::size_t total = 0;
  std::size_t correct = 0;
  for (const Batch& b : batches) {
    correct += correct_count(model, theta, b);
    total += b.size();
  }
  if (total == 0) throw DomainError("accuracy: empty dataset");
  return static_cast<double>(correct) / static_cast<double>(total);
}

double accuracy(const ModelSpec& model, std::span<const double> theta, const Batch& batch) {
  return accuracy(model, theta, std::span<const Batch>(&batch, 1));
}

}  // namespace flatnoise
