// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <vector>

#include <json.hpp>

#include "flatnoise/bound.hpp"
#include "flatnoise/data.hpp"
#include "flatnoise/evalharness.hpp"
#include "flatnoise/optim.hpp"

namespace flatnoise {

/// metrics.jsonl schema, version 1: one object per epoch with keys
/// epoch, train_loss, val_acc_clean, val_acc_noisy ([{sigma, acc}]),
/// grad_norm_mean, grad_sharpness_mean, cos_sim_mean (null when absent),
/// perturbation_norm_mean, step_distance, lr, strength_t.
inline constexpr int kMetricsSchemaVersion = 1;

nlohmann::ordered_json to_json(const MetricsRecord& rec);
MetricsRecord metrics_from_json(const nlohmann::json& j);

void write_metrics_jsonl(const std::filesystem::path& path, const std::vector<MetricsRecord>& log);
/// Throws std::runtime_error when the file is missing or a line is malformed.
std::vector<MetricsRecord> read_metrics_jsonl(const std::filesystem::path& path);

nlohmann::ordered_json to_json(const EvalReport& report);
EvalReport eval_report_from_json(const nlohmann::json& j);

nlohmann::ordered_json to_json(const BoundResult& result);
nlohmann::ordered_json to_json(const TaylorCheck& check, double sigma);

/// Sizes, dimension, class count and label histogram of each split.
nlohmann::ordered_json dataset_manifest(const SplitResult& splits);

/// Writes `j` pretty-printed with a trailing newline.
void write_json(const std::filesystem::path& path, const nlohmann::ordered_json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace flatnoise
