// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "flatnoise/network.hpp"
#include "flatnoise/rng.hpp"

namespace flatnoise {

enum class SplitTag { Train, Val, Test };

std::string_view to_string(SplitTag t);

/// Labelled samples. Generators and loaders always produce N >= 1; a split
/// with a zero fraction yields an empty Dataset.
struct Dataset {
  DenseTensor inputs;  // [N x d]
  std::vector<std::int32_t> labels;
  std::size_t num_classes = 0;
  SplitTag tag = SplitTag::Train;

  std::size_t size() const noexcept { return labels.size(); }
  std::size_t dim() const { return inputs.cols(); }
  bool empty() const noexcept { return labels.empty(); }

  /// Copy of the rows at `indices`, in that order.
  Batch gather(std::span<const std::size_t> indices) const;
  Batch as_batch() const;
  /// Consecutive batches of at most `batch_size` rows, in dataset order.
  std::vector<Batch> batches(std::size_t batch_size) const;
  std::vector<std::size_t> label_histogram() const;
};

/// Gaussian clusters (unit std) centred on the vertices of a regular simplex
/// with edge length `separation`; requires classes <= dim.
Dataset gen_blobs(std::size_t classes, std::size_t per_class, std::size_t dim, double separation,
                  RngStream& rng);

/// Interleaved 2-D spiral arms, one per class, radius in (0, 1].
Dataset gen_spirals(std::size_t classes, std::size_t per_class, double noise_std, RngStream& rng);

/// Error raised by the IDX reader; `code` distinguishes the failure modes.
class IdxError : public std::runtime_error {
 public:
  enum class Code { Io = 1, BadMagic = 2, Truncated = 3, CountMismatch = 4 };
  IdxError(Code code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

inline constexpr std::uint32_t kIdxImagesMagic = 0x00000803;
inline constexpr std::uint32_t kIdxLabelsMagic = 0x00000801;

/// Reads an IDX image/label pair (MNIST layout). Pixels are scaled by 1/255;
/// num_classes is max(label) + 1, and at least 2.
Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path);

struct SplitResult {
  Dataset train;
  Dataset val;
  Dataset test;
};

/// Shuffled disjoint partition. Fractions must be non-negative and sum to 1;
/// sizes are round(N * f) for train and val with test taking the remainder.
/// A positive fraction that rounds to zero items is an error.
SplitResult split(const Dataset& ds, std::array<double, 3> fractions, RngStream& rng);

}  // namespace flatnoise
