// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/serialize.hpp"

#include <fstream>
#include <stdexcept>
#include <string>

namespace flatnoise {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json to_json(const MetricsRecord& rec) {
  ordered_json j;
  j["epoch"] = rec.epoch;
  j["train_loss"] = rec.train_loss;
  j["val_acc_clean"] = rec.val_acc_clean;
  ordered_json noisy = ordered_json::array();
  for (const auto& [sigma, acc] : rec.val_acc_noisy) noisy.push_back({{"sigma", sigma}, {"acc", acc}});
  j["val_acc_noisy"] = noisy;
  j["grad_norm_mean"] = rec.grad_norm_mean;
  j["grad_sharpness_mean"] = rec.grad_sharpness_mean;
  j["cos_sim_mean"] = rec.cos_sim_mean ? ordered_json(*rec.cos_sim_mean) : ordered_json(nullptr);
  j["perturbation_norm_mean"] = rec.perturbation_norm_mean;
  j["step_distance"] = rec.step_distance;
  j["lr"] = rec.lr;
  j["strength_t"] = rec.strength_t;
  return j;
}

MetricsRecord metrics_from_json(const json& j) {
  MetricsRecord rec;
  rec.epoch = j.at("epoch").get<std::size_t>();
  rec.train_loss = j.at("train_loss").get<double>();
  rec.val_acc_clean = j.at("val_acc_clean").get<double>();
  for (const json& e : j.at("val_acc_noisy")) {
    rec.val_acc_noisy.emplace_back(e.at("sigma").get<double>(), e.at("acc").get<double>());
  }
  rec.grad_norm_mean = j.at("grad_norm_mean").get<double>();
  rec.grad_sharpness_mean = j.at("grad_sharpness_mean").get<double>();
  if (!j.at("cos_sim_mean").is_null()) rec.cos_sim_mean = j.at("cos_sim_mean").get<double>();
  rec.perturbation_norm_mean = j.at("perturbation_norm_mean").get<double>();
  rec.step_distance = j.at("step_distance").get<double>();
  rec.lr = j.at("lr").get<double>();
  rec.strength_t = j.at("strength_t").get<double>();
  return rec;
}

void write_metrics_jsonl(const std::filesystem::path& path, const std::vector<MetricsRecord>& log) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  for (const MetricsRecord& rec : log) out << to_json(rec).dump() << '\n';
}

std::vector<MetricsRecord> read_metrics_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics '" + path.string() + "'");
  std::vector<MetricsRecord> log;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      log.push_back(metrics_from_json(json::parse(line)));
    } catch (const json::exception& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return log;
}

ordered_json to_json(const EvalReport& report) {
  ordered_json j;
  j["sigma_test"] = report.sigma_test;
  j["mean_acc"] = report.mean_acc;
  j["noise_std"] = report.noise_std;
  j["weight_std"] = report.weight_std ? ordered_json(*report.weight_std) : ordered_json(nullptr);
  j["seeds"] = report.per_cell.size();
  j["draws"] = report.per_cell.empty() ? 0 : report.per_cell.front().size();
  j["per_cell"] = report.per_cell;
  j["rmse"] = report.rmse ? ordered_json(*report.rmse) : ordered_json(nullptr);
  j["formatted"] = format_report(report);
  return j;
}

EvalReport eval_report_from_json(const json& j) {
  EvalReport r;
  r.sigma_test = j.at("sigma_test").get<double>();
  r.mean_acc = j.at("mean_acc").get<double>();
  r.noise_std = j.at("noise_std").get<double>();
  if (!j.at("weight_std").is_null()) r.weight_std = j.at("weight_std").get<double>();
  r.per_cell = j.at("per_cell").get<std::vector<std::vector<double>>>();
  if (j.contains("rmse") && !j.at("rmse").is_null()) r.rmse = j.at("rmse").get<double>();
  return r;
}

ordered_json to_json(const BoundResult& result) {
  ordered_json j;
  j["inputs"] = {{"k", result.inputs.k},
                 {"n", result.inputs.n},
                 {"delta", result.inputs.delta},
                 {"w_norm_sq", result.inputs.w_norm_sq},
                 {"sigma", result.inputs.sigma}};
  j["expected_loss"] = result.expected_loss.mean;
  j["expected_loss_std_error"] = result.expected_loss.std_error;
  j["mc_samples"] = result.expected_loss.draws;
  j["h_term"] = result.h;
  j["total"] = result.total;
  return j;
}

ordered_json to_json(const TaylorCheck& check, double sigma) {
  ordered_json j;
  j["sigma"] = sigma;
  j["lhs"] = check.lhs;
  j["lhs_std_error"] = check.lhs_std_error;
  j["rhs"] = check.rhs;
  j["trace"] = check.trace;
  j["gap"] = check.gap;
  return j;
}

ordered_json dataset_manifest(const SplitResult& splits) {
  ordered_json j;
  for (const Dataset* ds : {&splits.train, &splits.val, &splits.test}) {
    ordered_json e;
    e["size"] = ds->size();
    e["dim"] = ds->empty() ? 0 : ds->dim();
    e["num_classes"] = ds->num_classes;
    e["label_histogram"] = ds->label_histogram();
    j[std::string(to_string(ds->tag))] = e;
  }
  return j;
}

void write_json(const std::filesystem::path& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return json::parse(in);
}

}  // namespace flatnoise
