// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include <json.hpp>

namespace flatnoise {

namespace {

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(U); ++i) out.push_back(static_cast<unsigned char>(bits >> (8 * i)));
}

template <typename T>
T get_le(const std::vector<unsigned char>& in, std::size_t& pos) {
  using U = std::conditional_t<sizeof(T) == 8, std::uint64_t, std::uint32_t>;
  if (pos + sizeof(U) > in.size()) throw CheckpointError("checkpoint truncated");
  U bits = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) bits |= static_cast<U>(in[pos + i]) << (8 * i);
  pos += sizeof(U);
  return std::bit_cast<T>(bits);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& checkpoint_path) {
  return std::filesystem::path(checkpoint_path.string() + ".json");
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt,
                      const std::string& sidecar_extra) {
  ckpt.model.validate();
  if (ckpt.params.theta.size() != ckpt.model.param_count()) {
    throw CheckpointError("checkpoint parameters do not match model");
  }
  std::string hash = ckpt.config_hash;
  hash.resize(16, '0');

  std::vector<unsigned char> buf(kCheckpointMagic.begin(), kCheckpointMagic.end());
  put_le(buf, kCheckpointVersion);
  put_le(buf, static_cast<std::uint32_t>(ckpt.model.input_dim));
  put_le(buf, static_cast<std::uint32_t>(ckpt.model.num_classes));
  put_le(buf, static_cast<std::uint32_t>(ckpt.model.activation == Activation::Relu ? 0 : 1));
  put_le(buf, static_cast<std::uint32_t>(ckpt.model.hidden.size()));
  for (std::size_t w : ckpt.model.hidden) put_le(buf, static_cast<std::uint32_t>(w));
  put_le(buf, static_cast<std::uint64_t>(ckpt.params.theta.size()));
  buf.insert(buf.end(), hash.begin(), hash.end());
  for (double v : ckpt.params.theta) put_le(buf, v);

  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw CheckpointError("cannot write checkpoint '" + path.string() + "'");
    out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  }

  nlohmann::ordered_json side;
  side["format"] = "flatnoise-checkpoint";
  side["version"] = kCheckpointVersion;
  side["config_hash"] = ckpt.config_hash;
  side["model"] = {{"input_dim", ckpt.model.input_dim},
                   {"hidden", ckpt.model.hidden},
                   {"activation", std::string(to_string(ckpt.model.activation))},
                   {"num_classes", ckpt.model.num_classes}};
  side["param_count"] = ckpt.params.theta.size();
  nlohmann::ordered_json parts = nlohmann::ordered_json::array();
  for (const FilterSlice& s : ckpt.params.partition) {
    parts.push_back({{"offset", s.offset}, {"length", s.length}, {"kind", std::string(to_string(s.kind))}});
  }
  side["partition"] = parts;
  if (!sidecar_extra.empty()) side["config"] = nlohmann::ordered_json::parse(sidecar_extra);
  std::ofstream out(sidecar_path(path));
  if (!out) throw CheckpointError("cannot write checkpoint sidecar for '" + path.string() + "'");
  out << side.dump(2) << '\n';
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot open checkpoint '" + path.string() + "'");
  const std::vector<unsigned char> buf(std::istreambuf_iterator<char>(in), {});
  if (buf.size() < kCheckpointMagic.size() ||
      !std::equal(kCheckpointMagic.begin(), kCheckpointMagic.end(), buf.begin())) {
    throw CheckpointError("'" + path.string() + "' is not a flatnoise checkpoint");
  }
  std::size_t pos = kCheckpointMagic.size();
  const auto version = get_le<std::uint32_t>(buf, pos);
  if (version != kCheckpointVersion) {
    throw CheckpointError("unsupported checkpoint version " + std::to_string(version));
  }
  Checkpoint ck;
  ck.model.input_dim = get_le<std::uint32_t>(buf, pos);
  ck.model.num_classes = get_le<std::uint32_t>(buf, pos);
  ck.model.activation = get_le<std::uint32_t>(buf, pos) == 0 ? Activation::Relu : Activation::Tanh;
  const auto hidden = get_le<std::uint32_t>(buf, pos);
  for (std::uint32_t i = 0; i < hidden; ++i) ck.model.hidden.push_back(get_le<std::uint32_t>(buf, pos));
  const auto k = get_le<std::uint64_t>(buf, pos);
  if (pos + 16 > buf.size()) throw CheckpointError("checkpoint truncated");
  ck.config_hash.assign(reinterpret_cast<const char*>(buf.data() + pos), 16);
  pos += 16;
  ck.model.validate();
  if (k != ck.model.param_count()) throw CheckpointError("checkpoint parameter count does not match model");
  if (pos + 8 * k != buf.size()) throw CheckpointError("checkpoint payload has wrong length");
  ck.params.theta.resize(k);
  for (std::uint64_t i = 0; i < k; ++i) ck.params.theta[i] = get_le<double>(buf, pos);
  ck.params.partition = model_partition(ck.model);
  return ck;
}

}  // namespace flatnoise
