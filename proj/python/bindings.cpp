// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>

#include "flatnoise/bound.hpp"
#include "flatnoise/cli.hpp"
#include "flatnoise/config.hpp"
#include "flatnoise/data.hpp"
#include "flatnoise/evalharness.hpp"
#include "flatnoise/optim.hpp"
#include "flatnoise/perturb.hpp"
#include "flatnoise/serialize.hpp"

namespace py = pybind11;
namespace fs = std::filesystem;
using namespace flatnoise;

namespace {

py::tuple dataset_arrays(const Dataset& ds) {
  py::array_t<double> x({ds.size(), ds.dim()});
  std::memcpy(x.mutable_data(), ds.inputs.values().data(), sizeof(double) * ds.size() * ds.dim());
  py::array_t<std::int32_t> y(ds.size());
  std::memcpy(y.mutable_data(), ds.labels.data(), sizeof(std::int32_t) * ds.size());
  return py::make_tuple(x, y);
}

std::string train_json(const std::string& config_json, const fs::path& output_dir) {
  const ExperimentConfig cfg = parse_experiment(nlohmann::json::parse(config_json));
  const std::vector<SeedRun> runs = run_training(cfg, output_dir);
  nlohmann::ordered_json out = nlohmann::ordered_json::array();
  for (const SeedRun& r : runs) {
    nlohmann::ordered_json log = nlohmann::ordered_json::array();
    for (const MetricsRecord& rec : r.result.log) log.push_back(to_json(rec));
    out.push_back({{"seed", r.seed}, {"dir", r.dir.string()}, {"best_epoch", r.result.best_epoch}, {"log", log}});
  }
  return out.dump();
}

std::string eval_json(const std::vector<fs::path>& checkpoints, std::optional<std::vector<double>> sigma_test,
                      std::size_t draws, std::optional<std::uint64_t> seed, const std::string& split) {
  EvalRequest req;
  req.checkpoints = checkpoints;
  req.sigma_test = std::move(sigma_test);
  req.draws = draws;
  req.seed = seed;
  req.split = split;
  const EvalOutcome outcome = run_eval(req);
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  for (const EvalReport& r : outcome.reports) reports.push_back(to_json(r));
  return nlohmann::ordered_json{{"config_hash", outcome.config_hash}, {"reports", reports}}.dump();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "flatnoise native core";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<IdxError>(m, "IdxError", PyExc_IOError);

  m.def(
      "h_term",
      [](std::size_t k, std::size_t n, double delta, double w_norm_sq, double sigma) {
        return h_term(BoundInputs{k, n, delta, w_norm_sq, sigma});
      },
      py::arg("k"), py::arg("n"), py::arg("delta"), py::arg("w_norm_sq"), py::arg("sigma"));

  m.def(
      "strength_at",
      [](const std::string& kind, double max_strength, std::uint64_t warmup_iters, std::uint64_t t) {
        Schedule s{parse_schedule_kind(kind), max_strength, warmup_iters};
        s.validate();
        return s.strength_at(t);
      },
      py::arg("kind"), py::arg("max_strength"), py::arg("warmup_iters"), py::arg("t"));

  m.def("cosine_lr", &cosine_lr, py::arg("t"), py::arg("total"), py::arg("lr0"));

  m.def(
      "aggregate",
      [](const std::vector<std::vector<double>>& per_cell) {
        const EvalReport r = aggregate(per_cell);
        return py::make_tuple(r.mean_acc, r.noise_std, r.weight_std, format_report(r));
      },
      py::arg("per_cell"));

  m.def(
      "gen_spirals",
      [](std::size_t classes, std::size_t per_class, double noise_std, std::uint64_t seed) {
        RngStream rng(seed, StreamId::DataShuffle, 1);
        return dataset_arrays(gen_spirals(classes, per_class, noise_std, rng));
      },
      py::arg("classes"), py::arg("per_class"), py::arg("noise_std") = 0.05, py::arg("seed") = 1234);

  m.def(
      "gen_blobs",
      [](std::size_t classes, std::size_t per_class, std::size_t dim, double separation, std::uint64_t seed) {
        RngStream rng(seed, StreamId::DataShuffle, 1);
        return dataset_arrays(gen_blobs(classes, per_class, dim, separation, rng));
      },
      py::arg("classes"), py::arg("per_class"), py::arg("dim") = 4, py::arg("separation") = 10.0,
      py::arg("seed") = 1234);

  m.def(
      "load_idx", [](const fs::path& images, const fs::path& labels) { return dataset_arrays(load_idx(images, labels)); },
      py::arg("images"), py::arg("labels"));

  m.def(
      "config_hash",
      [](const std::string& config_json) { return parse_experiment(nlohmann::json::parse(config_json)).hash(); },
      py::arg("config_json"));

  m.def("train_json", &train_json, py::arg("config_json"), py::arg("output_dir"),
        py::call_guard<py::gil_scoped_release>());

  m.def("eval_json", &eval_json, py::arg("checkpoints"), py::arg("sigma_test") = py::none(),
        py::arg("draws") = 10, py::arg("seed") = py::none(), py::arg("split") = "test",
        py::call_guard<py::gil_scoped_release>());

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "flatnoise");
        std::vector<char*> argv;
        for (std::string& a : args) argv.push_back(a.data());
        return run_cli(static_cast<int>(argv.size()), argv.data());
      },
      py::arg("args"));
}
