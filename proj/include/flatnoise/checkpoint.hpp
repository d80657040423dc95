// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>

#include "flatnoise/network.hpp"

namespace flatnoise {

/// Binary checkpoint layout, version 1, all integers little-endian:
///
///   offset  size  field
///   0       8     magic "FLNSCKPT"
///   8       4     u32 format version (1)
///   12      4     u32 input_dim
///   16      4     u32 num_classes
///   20      4     u32 activation (0 = relu, 1 = tanh)
///   24      4     u32 hidden layer count H
///   28      4H    u32 hidden widths
///   28+4H   8     u64 parameter count k
///   36+4H   16    config hash, 16 lowercase hex chars
///   52+4H   8k    f64 parameters, IEEE-754 little-endian
///
/// A JSON sidecar at `<path>.json` repeats the model spec, lists the filter
/// partition, and carries the resolved experiment config.
inline constexpr std::array<char, 8> kCheckpointMagic = {'F', 'L', 'N', 'S', 'C', 'K', 'P', 'T'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Checkpoint {
  ModelSpec model;
  ParamSet params;
  std::string config_hash;
};

/// Writes the binary file and its sidecar. `sidecar_extra` (a JSON object
/// serialized as text, may be empty) is stored under "config".
void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt,
                      const std::string& sidecar_extra = {});

Checkpoint read_checkpoint(const std::filesystem::path& path);

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint_path);

}  // namespace flatnoise
