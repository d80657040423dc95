// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numbers>

namespace flatnoise {

std::string_view to_string(SplitTag t) {
  switch (t) {
    case SplitTag::Train: return "train";
    case SplitTag::Val: return "val";
    case SplitTag::Test: return "test";
  }
  return "unknown";
}

Batch Dataset::gather(std::span<const std::size_t> indices) const {
  const std::size_t d = dim();
  Batch b;
  b.inputs = DenseTensor({indices.size(), d});
  b.labels.resize(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    const std::span<const double> src = inputs.row(indices[i]);
    std::copy(src.begin(), src.end(), b.inputs.row(i).begin());
    b.labels[i] = labels[indices[i]];
  }
  return b;
}

Batch Dataset::as_batch() const { return Batch{inputs, labels}; }

std::vector<Batch> Dataset::batches(std::size_t batch_size) const {
  if (batch_size == 0) throw DomainError("batch size must be >= 1");
  std::vector<Batch> out;
  std::vector<std::size_t> idx;
  for (std::size_t start = 0; start < size(); start += batch_size) {
    const std::size_t end = std::min(size(), start + batch_size);
    idx.clear();
    for (std::size_t i = start; i < end; ++i) idx.push_back(i);
    out.push_back(gather(idx));
  }
  return out;
}

std::vector<std::size_t> Dataset::label_histogram() const {
  std::vector<std::size_t> h(num_classes, 0);
  for (std::int32_t y : labels) ++h.at(static_cast<std::size_t>(y));
  return h;
}

Dataset gen_blobs(std::size_t classes, std::size_t per_class, std::size_t dim, double separation,
                  RngStream& rng) {
  if (classes < 2 || per_class < 1 || dim < 1) throw DomainError("gen_blobs: counts must be >= 1 (classes >= 2)");
  if (classes > dim) throw DomainError("gen_blobs: simplex needs dim >= classes");
  if (!(separation >= 0.0)) throw DomainError("gen_blobs: separation must be non-negative");
  // Scaled basis vectors e_c * s / sqrt(2) are pairwise `separation` apart.
  const double offset = separation / std::numbers::sqrt2;
  Dataset ds;
  ds.num_classes = classes;
  ds.inputs = DenseTensor({classes * per_class, dim});
  ds.labels.resize(classes * per_class);
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t i = 0; i < per_class; ++i) {
      const std::size_t r = c * per_class + i;
      std::span<double> row = ds.inputs.row(r);
      for (std::size_t j = 0; j < dim; ++j) row[j] = rng.standard_normal();
      row[c] += offset;
      ds.labels[r] = static_cast<std::int32_t>(c);
    }
  }
  return ds;
}

Dataset gen_spirals(std::size_t classes, std::size_t per_class, double noise_std, RngStream& rng) {
  if (classes < 2 || per_class < 1) throw DomainError("gen_spirals: counts must be >= 1 (classes >= 2)");
  if (!(noise_std >= 0.0)) throw DomainError("gen_spirals: noise_std must be non-negative");
  constexpr double kTurns = 1.0;
  Dataset ds;
  ds.num_classes = classes;
  ds.inputs = DenseTensor({classes * per_class, 2});
  ds.labels.resize(classes * per_class);
  for (std::size_t c = 0; c < classes; ++c) {
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(classes);
    for (std::size_t i = 0; i < per_class; ++i) {
      const std::size_t r = c * per_class + i;
      const double t = static_cast<double>(i + 1) / static_cast<double>(per_class);
      const double angle = phase + 2.0 * std::numbers::pi * kTurns * t;
      const double nx = rng.standard_normal();
      const double ny = rng.standard_normal();
      ds.inputs.at(r, 0) = t * std::cos(angle) + noise_std * nx;
      ds.inputs.at(r, 1) = t * std::sin(angle) + noise_std * ny;
      ds.labels[r] = static_cast<std::int32_t>(c);
    }
  }
  return ds;
}

namespace {

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IdxError(IdxError::Code::Io, "cannot open IDX file '" + path.string() + "'");
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(in), {});
}

std::uint32_t read_be32(const std::vector<unsigned char>& buf, std::size_t pos,
                        const std::filesystem::path& path) {
  if (pos + 4 > buf.size()) {
    throw IdxError(IdxError::Code::Truncated, "truncated IDX header in '" + path.string() + "'");
  }
  return (std::uint32_t{buf[pos]} << 24) | (std::uint32_t{buf[pos + 1]} << 16) |
         (std::uint32_t{buf[pos + 2]} << 8) | std::uint32_t{buf[pos + 3]};
}

struct IdxPayload {
  std::vector<std::uint32_t> dims;
  std::vector<unsigned char> bytes;
};

IdxPayload parse_idx(const std::filesystem::path& path, std::uint32_t expected_magic) {
  const std::vector<unsigned char> buf = read_file(path);
  const std::uint32_t magic = read_be32(buf, 0, path);
  if (magic != expected_magic) {
    char text[64];
    std::snprintf(text, sizeof text, "0x%08x (expected 0x%08x)", magic, expected_magic);
    throw IdxError(IdxError::Code::BadMagic, "bad IDX magic " + std::string(text) + " in '" +
                                                 path.string() + "'");
  }
  IdxPayload out;
  const std::size_t ndims = magic & 0xffu;
  std::size_t count = 1;
  for (std::size_t i = 0; i < ndims; ++i) {
    out.dims.push_back(read_be32(buf, 4 + 4 * i, path));
    count *= out.dims.back();
  }
  const std::size_t header = 4 + 4 * ndims;
  if (buf.size() < header + count) {
    throw IdxError(IdxError::Code::Truncated, "truncated IDX payload in '" + path.string() + "': expected " +
                                                  std::to_string(count) + " bytes, found " +
                                                  std::to_string(buf.size() - header));
  }
  out.bytes.assign(buf.begin() + static_cast<std::ptrdiff_t>(header),
                   buf.begin() + static_cast<std::ptrdiff_t>(header + count));
  return out;
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path, const std::filesystem::path& labels_path) {
  const IdxPayload images = parse_idx(images_path, kIdxImagesMagic);
  const IdxPayload labels = parse_idx(labels_path, kIdxLabelsMagic);
  const std::size_t n = images.dims[0];
  if (labels.dims[0] != n) {
    throw IdxError(IdxError::Code::CountMismatch,
                   "IDX count mismatch: " + std::to_string(n) + " images in '" + images_path.string() +
                       "' vs " + std::to_string(labels.dims[0]) + " labels in '" + labels_path.string() + "'");
  }
  if (n == 0) throw IdxError(IdxError::Code::CountMismatch, "IDX files contain no items");
  const std::size_t d = static_cast<std::size_t>(images.dims[1]) * images.dims[2];

  Dataset ds;
  ds.inputs = DenseTensor({n, d});
  for (std::size_t i = 0; i < n * d; ++i) ds.inputs[i] = static_cast<double>(images.bytes[i]) / 255.0;
  ds.labels.resize(n);
  std::int32_t top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ds.labels[i] = static_cast<std::int32_t>(labels.bytes[i]);
    top = std::max(top, ds.labels[i]);
  }
  ds.num_classes = std::max<std::size_t>(2, static_cast<std::size_t>(top) + 1);
  return ds;
}

SplitResult split(const Dataset& ds, std::array<double, 3> fractions, RngStream& rng) {
  double sum = 0.0;
  for (double f : fractions) {
    if (!(f >= 0.0)) throw DomainError("split fractions must be non-negative");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DomainError("split fractions must sum to 1");
  const std::size_t n = ds.size();
  auto portion = [n](double f) {
    return std::min(n, static_cast<std::size_t>(std::llround(static_cast<double>(n) * f)));
  };
  std::array<std::size_t, 3> sizes{};
  sizes[0] = portion(fractions[0]);
  sizes[1] = std::min(n - sizes[0], portion(fractions[1]));
  const std::size_t rest = n - sizes[0] - sizes[1];
  // Rounding leftovers go to test, or to train when test is not requested.
  if (fractions[2] > 0.0) {
    sizes[2] = rest;
  } else {
    sizes[0] += rest;
  }
  for (std::size_t k = 0; k < 3; ++k) {
    if (fractions[k] > 0.0 && sizes[k] == 0) {
      throw DomainError("split: " + std::string(to_string(static_cast<SplitTag>(k))) + " split is empty");
    }
  }

  const std::vector<std::size_t> order = permutation(rng, n);
  SplitResult out;
  Dataset* parts[3] = {&out.train, &out.val, &out.test};
  std::size_t start = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const std::span<const std::size_t> idx(order.data() + start, sizes[k]);
    Batch b = ds.gather(idx);
    parts[k]->inputs = std::move(b.inputs);
    parts[k]->labels = std::move(b.labels);
    parts[k]->num_classes = ds.num_classes;
    parts[k]->tag = static_cast<SplitTag>(k);
    start += sizes[k];
  }
  return out;
}

}  // namespace flatnoise
