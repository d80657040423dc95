// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "flatnoise/checkpoint.hpp"
#include "flatnoise/cli.hpp"
#include "flatnoise/config.hpp"
#include "flatnoise/serialize.hpp"
#include "helpers.hpp"

namespace flatnoise {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json tiny_config(const fs::path& out, std::size_t epochs = 2) {
  return json{{"model", {{"hidden", {8}}}},
              {"data", {{"classes", 2}, {"per_class", 40}}},
              {"train", {{"epochs", epochs}, {"batch_size", 16}}},
              {"seeds", {0}},
              {"eval", {{"sigma_test", {0.05}}, {"draws", 2}}},
              {"output_dir", out.string()}};
}

fs::path write_config(const fs::path& dir, const std::string& name, const json& j) {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int train_quietly(const fs::path& cfg) {
  std::ostringstream out;
  std::ostringstream err;
  return cmd_train(cfg, out, err);
}

TEST(Config, DefaultsParse) {
  const ExperimentConfig cfg = parse_experiment(json::object());
  EXPECT_EQ(cfg.hidden, (std::vector<std::size_t>{64, 64}));
  EXPECT_EQ(cfg.train.epochs, 60u);
  EXPECT_EQ(cfg.train.batch_size, 64u);
  EXPECT_EQ(cfg.train.lr, 0.05);
  EXPECT_EQ(cfg.train.label_smoothing, 0.1);
  EXPECT_EQ(cfg.seeds.size(), 3u);
  EXPECT_EQ(cfg.eval.draws, 10u);
}

TEST(Config, UnknownKeysAreRejectedWithPath) {
  try {
    parse_experiment(json{{"train", {{"epochz", 3}}}});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("train.epochz"), std::string::npos);
  }
  EXPECT_THROW(parse_experiment(json{{"modle", json::object()}}), ConfigError);
}

TEST(Config, RangeAndTypeValidation) {
  EXPECT_THROW(parse_experiment(json{{"train", {{"epochs", -1}}}}), ConfigError);
  EXPECT_THROW(parse_experiment(json{{"train", {{"lr", 0.0}}}}), ConfigError);
  EXPECT_THROW(parse_experiment(json{{"train", {{"momentum", 1.0}}}}), ConfigError);
  EXPECT_THROW(parse_experiment(json{{"train", {{"optimizer", "adam"}}}}), ConfigError);
  EXPECT_THROW(parse_experiment(json{{"data", {{"fractions", {0.5, 0.5, 0.5}}}}}), ConfigError);
  EXPECT_THROW(parse_experiment(json{{"eval", {{"draws", 0}}}}), ConfigError);
  EXPECT_THROW(parse_experiment(json{{"seeds", json::array()}}), ConfigError);
  EXPECT_THROW(parse_experiment(json{{"model", {{"hidden", "wide"}}}}), ConfigError);
  EXPECT_NO_THROW(parse_experiment(json{{"data", {{"fractions", {1.0, 0.0, 0.0}}}}}));
}

TEST(Config, HashIgnoresOutputDirOnly) {
  const ExperimentConfig a = parse_experiment(json{{"output_dir", "x"}});
  const ExperimentConfig b = parse_experiment(json{{"output_dir", "y"}});
  const ExperimentConfig c = parse_experiment(json{{"train", {{"lr", 0.1}}}});
  EXPECT_EQ(a.hash(), b.hash());
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16u);
  EXPECT_EQ(parse_experiment(a.to_json()).hash(), a.hash());
}

TEST(Config, Fnv1aKnownValues) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Config, ScheduleWarmupResolution) {
  ExperimentConfig cfg = parse_experiment(json{{"train", {{"optimizer", "sam"}, {"strength", 0.1}, {"schedule", "quadratic"}, {"epochs", 10}, {"batch_size", 10}}}});
  TrainConfig t = resolve_train(cfg, 0, 100);
  EXPECT_EQ(t.schedule.warmup_iters, 50u);
  EXPECT_EQ(t.schedule.max_strength, 0.1);
  cfg = parse_experiment(json{{"train", {{"schedule", "linear"}, {"warmup_iters", 7}}}});
  EXPECT_EQ(resolve_train(cfg, 0, 100).schedule.warmup_iters, 7u);
  EXPECT_THROW(parse_experiment(json{{"train", {{"warmup_iters", 7}, {"warmup_fraction", 0.3}}}}), ConfigError);
}

TEST(Config, OutputRootFromEnvironment) {
  const auto dir = testing::scratch_dir("env_root");
  ::setenv("FLATNOISE_OUTPUT_ROOT", dir.c_str(), 1);
  EXPECT_EQ(resolve_output_dir("runs/a"), dir / "runs/a");
  EXPECT_EQ(resolve_output_dir("/abs/path"), fs::path("/abs/path"));
  ::unsetenv("FLATNOISE_OUTPUT_ROOT");
  EXPECT_EQ(resolve_output_dir("runs/a"), fs::path("runs/a"));
}

TEST(Config, SweepAxesParse) {
  const SweepConfig sc = parse_sweep(json{{"sweep", {{"strength", {0.0, 0.1}}, {"optimizer", {"sgd", "rwp"}}}}});
  EXPECT_EQ(sc.grid.strength.size(), 2u);
  EXPECT_EQ(sc.grid.optimizer[1], OptimizerKind::Rwp);
  EXPECT_THROW(parse_sweep(json{{"sweep", {{"depth", {1}}}}}), ConfigError);
}

TEST(Train, OneEpochSmoke) {
  const auto dir = testing::scratch_dir("cli_smoke");
  const fs::path cfg = write_config(dir, "c.json", tiny_config(dir / "run", 1));
  ASSERT_EQ(train_quietly(cfg), kExitOk);
  const auto log = read_metrics_jsonl(dir / "run/seed_0/metrics.jsonl");
  ASSERT_EQ(log.size(), 1u);
  EXPECT_EQ(log[0].epoch, 1u);
  EXPECT_TRUE(fs::exists(dir / "run/seed_0/best.ckpt"));
  EXPECT_TRUE(fs::exists(dir / "run/seed_0/final.ckpt"));
  EXPECT_TRUE(fs::exists(dir / "run/data_manifest.json"));
  const json resolved = read_json(dir / "run/config.resolved.json");
  const std::string hash = resolved.at("config_hash");
  EXPECT_EQ(read_json(dir / "run/seed_0/run.json").at("config_hash"), hash);
  EXPECT_EQ(read_checkpoint(dir / "run/seed_0/best.ckpt").config_hash, hash);
}

TEST(Train, RerunIsIdentical) {
  const auto dir = testing::scratch_dir("cli_rerun");
  ASSERT_EQ(train_quietly(write_config(dir, "a.json", tiny_config(dir / "a"))), kExitOk);
  ASSERT_EQ(train_quietly(write_config(dir, "b.json", tiny_config(dir / "b"))), kExitOk);
  EXPECT_EQ(slurp(dir / "a/seed_0/metrics.jsonl"), slurp(dir / "b/seed_0/metrics.jsonl"));
}

TEST(Train, ZeroStrengthRwpMatchesSgd) {
  const auto dir = testing::scratch_dir("cli_reduce");
  json sgd = tiny_config(dir / "sgd", 3);
  json rwp = tiny_config(dir / "rwp", 3);
  rwp["train"]["optimizer"] = "rwp";
  rwp["train"]["strength"] = 0.0;
  ASSERT_EQ(train_quietly(write_config(dir, "s.json", sgd)), kExitOk);
  ASSERT_EQ(train_quietly(write_config(dir, "r.json", rwp)), kExitOk);
  EXPECT_EQ(slurp(dir / "sgd/seed_0/metrics.jsonl"), slurp(dir / "rwp/seed_0/metrics.jsonl"));
  EXPECT_NE(read_json(dir / "sgd/config.resolved.json").at("config_hash"),
            read_json(dir / "rwp/config.resolved.json").at("config_hash"));
}

TEST(Train, ExitCodes) {
  const auto dir = testing::scratch_dir("cli_codes");
  EXPECT_EQ(train_quietly(dir / "missing.json"), kExitUsage);
  json bad = tiny_config(dir / "bad");
  bad["train"]["bogus"] = 1;
  EXPECT_EQ(train_quietly(write_config(dir, "bad.json", bad)), kExitUsage);
  json boom = tiny_config(dir / "boom", 5);
  boom["train"]["lr"] = 1e100;
  EXPECT_EQ(train_quietly(write_config(dir, "boom.json", boom)), kExitNumeric);
}

class EvalFixture : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = testing::scratch_dir("cli_eval");
    json cfg = tiny_config(dir_ / "run");
    cfg["seeds"] = {0, 1, 2};
    ASSERT_EQ(train_quietly(write_config(dir_, "c.json", cfg)), kExitOk);
  }
  static fs::path dir_;
};
fs::path EvalFixture::dir_;

TEST_F(EvalFixture, ZeroSigmaHasNoNoiseSpread) {
  EvalRequest req;
  req.checkpoints = {dir_ / "run"};
  req.sigma_test = std::vector<double>{0.0};
  const EvalOutcome out = run_eval(req);
  ASSERT_EQ(out.checkpoints.size(), 3u);
  ASSERT_EQ(out.reports.size(), 1u);
  EXPECT_EQ(out.reports[0].noise_std, 0.0);
  EXPECT_EQ(out.reports[0].per_cell.size(), 3u);
  EXPECT_EQ(out.reports[0].per_cell[0].size(), 10u);
  EXPECT_TRUE(out.reports[0].weight_std.has_value());
}

TEST_F(EvalFixture, SingleCheckpointSingleDraw) {
  EvalRequest req;
  req.checkpoints = {dir_ / "run/seed_1/best.ckpt"};
  req.sigma_test = std::vector<double>{0.1};
  req.draws = 1;
  const EvalOutcome out = run_eval(req);
  EXPECT_EQ(out.reports[0].noise_std, 0.0);
  EXPECT_FALSE(out.reports[0].weight_std.has_value());
}

TEST_F(EvalFixture, FixedSeedRerunGivesIdenticalJson) {
  std::ostringstream a;
  std::ostringstream b;
  std::ostringstream err;
  EvalRequest req;
  req.checkpoints = {dir_ / "run"};
  req.sigma_test = std::vector<double>{0.05, 0.1};
  req.draws = 3;
  ASSERT_EQ(cmd_eval(req, std::nullopt, a, err), kExitOk);
  ASSERT_EQ(cmd_eval(req, std::nullopt, b, err), kExitOk);
  EXPECT_EQ(a.str(), b.str());
  ASSERT_EQ(cmd_eval(req, dir_ / "eval.json", a, err), kExitOk);
  const json j = read_json(dir_ / "eval.json");
  EXPECT_EQ(j.at("reports").size(), 2u);
  EXPECT_EQ(j.at("config_hash"), read_json(dir_ / "run/config.resolved.json").at("config_hash"));
}

TEST_F(EvalFixture, MissingCheckpointIsUsageError) {
  std::ostringstream out;
  std::ostringstream err;
  EvalRequest req;
  req.checkpoints = {dir_ / "nope.ckpt"};
  EXPECT_EQ(cmd_eval(req, std::nullopt, out, err), kExitUsage);
  EXPECT_FALSE(err.str().empty());
}

TEST_F(EvalFixture, CommandLineParsing) {
  const std::string ckpt = (dir_ / "run").string();
  const std::string out_path = (dir_ / "cli.json").string();
  std::vector<std::string> args{"flatnoise", "eval", "--checkpoint", ckpt, "--sigma-test", "0,0.1",
                                "--draws", "2", "--output", out_path};
  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  ::testing::internal::CaptureStdout();
  const int code = run_cli(static_cast<int>(argv.size()), argv.data());
  ::testing::internal::GetCapturedStdout();
  ASSERT_EQ(code, kExitOk);
  const json j = read_json(dir_ / "cli.json");
  ASSERT_EQ(j.at("reports").size(), 2u);
  EXPECT_EQ(j.at("reports")[0].at("sigma_test"), 0.0);
  EXPECT_EQ(j.at("reports")[1].at("draws"), 2);

  std::vector<std::string> bad{"flatnoise", "eval", "--draws", "2"};
  std::vector<char*> bad_argv;
  for (std::string& a : bad) bad_argv.push_back(a.data());
  ::testing::internal::CaptureStderr();
  EXPECT_EQ(run_cli(static_cast<int>(bad_argv.size()), bad_argv.data()), kExitUsage);
  ::testing::internal::GetCapturedStderr();
}

json sweep_config(const fs::path& out, std::vector<double> strengths) {
  json cfg = tiny_config(out);
  cfg["seeds"] = {0, 1};
  cfg["train"]["optimizer"] = "rwp";
  cfg["eval"]["sigma_test"] = {0.05, 0.2};
  cfg["sweep"] = {{"strength", strengths}, {"schedule", {"constant", "quadratic"}}};
  return cfg;
}

int sweep_quietly(const fs::path& cfg, bool resume) {
  std::ostringstream out;
  std::ostringstream err;
  return cmd_sweep(cfg, resume, out, err);
}

TEST(Sweep, TwoByTwoGridSummaryArgmax) {
  const auto dir = testing::scratch_dir("cli_sweep");
  ASSERT_EQ(sweep_quietly(write_config(dir, "s.json", sweep_config(dir / "sw", {0.0, 0.1})), false), kExitOk);
  const json summary = read_json(dir / "sw/summary.json");
  const json& cells = summary.at("cells");
  ASSERT_EQ(cells.size(), 4u);
  const std::string md = slurp(dir / "sw/summary.md");
  for (std::size_t c = 0; c < 2; ++c) {
    std::size_t best = 0;
    for (std::size_t r = 1; r < 4; ++r) {
      if (cells[r].at("reports")[c].at("mean_acc").get<double>() >
          cells[best].at("reports")[c].at("mean_acc").get<double>()) {
        best = r;
      }
    }
    std::istringstream lines(md);
    std::string line;
    while (std::getline(lines, line)) {
      if (line.rfind("| " + cells[best].at("name").get<std::string>() + " |", 0) != 0) continue;
      std::vector<std::string> cols;
      std::istringstream fields(line);
      std::string f;
      while (std::getline(fields, f, '|')) cols.push_back(f);
      EXPECT_NE(cols.at(2 + c).find("**"), std::string::npos) << line;
    }
    std::size_t bold = 0;
    for (std::size_t pos = md.find("**"); pos != std::string::npos; pos = md.find("**", pos + 2)) ++bold;
    EXPECT_EQ(bold, 4u);
  }
  for (const json& cell : cells) {
    EXPECT_EQ(cell.at("status"), "ok");
    EXPECT_TRUE(fs::exists(dir / "sw" / cell.at("name").get<std::string>() / "report.json"));
  }
}

TEST(Sweep, ResumeRerunsOnlyMissingCells) {
  const auto dir = testing::scratch_dir("cli_resume");
  const fs::path cfg = write_config(dir, "s.json", sweep_config(dir / "sw", {0.0, 0.1}));
  ASSERT_EQ(sweep_quietly(cfg, false), kExitOk);
  const json first = read_json(dir / "sw/summary.json");
  const std::string victim = first.at("cells")[2].at("name");
  fs::remove_all(dir / "sw" / victim);
  ASSERT_EQ(sweep_quietly(cfg, true), kExitOk);
  const json second = read_json(dir / "sw/summary.json");
  for (std::size_t i = 0; i < 4; ++i) {
    const json& cell = second.at("cells")[i];
    EXPECT_EQ(cell.at("status"), cell.at("name") == victim ? "ok" : "reused");
    EXPECT_EQ(cell.at("reports"), first.at("cells")[i].at("reports"));
  }
}

TEST(Sweep, ResumeIgnoresReportsFromOtherConfigs) {
  const auto dir = testing::scratch_dir("cli_resume_stale");
  json cfg = sweep_config(dir / "sw", {0.0});
  ASSERT_EQ(sweep_quietly(write_config(dir, "a.json", cfg), false), kExitOk);
  cfg["train"]["lr"] = 0.1;
  ASSERT_EQ(sweep_quietly(write_config(dir, "b.json", cfg), true), kExitOk);
  for (const json& cell : read_json(dir / "sw/summary.json").at("cells")) EXPECT_EQ(cell.at("status"), "ok");
}

TEST(Sweep, CellOrderDoesNotChangeResults) {
  const auto dir = testing::scratch_dir("cli_order");
  ASSERT_EQ(sweep_quietly(write_config(dir, "a.json", sweep_config(dir / "a", {0.0, 0.1})), false), kExitOk);
  ASSERT_EQ(sweep_quietly(write_config(dir, "b.json", sweep_config(dir / "b", {0.1, 0.0})), false), kExitOk);
  std::map<std::string, json> by_key;
  for (const json& cell : read_json(dir / "a/summary.json").at("cells")) {
    by_key[cell.at("schedule").get<std::string>() + std::to_string(cell.at("strength").get<double>())] =
        cell.at("reports");
  }
  for (const json& cell : read_json(dir / "b/summary.json").at("cells")) {
    EXPECT_EQ(cell.at("reports"),
              by_key.at(cell.at("schedule").get<std::string>() + std::to_string(cell.at("strength").get<double>())));
  }
}

TEST(Sweep, FailedCellIsRecordedAndSweepContinues) {
  const auto dir = testing::scratch_dir("cli_fail");
  json cfg = sweep_config(dir / "sw", {0.0});
  cfg["sweep"] = {{"strength", {0.0, 1e200}}};
  cfg["train"]["epochs"] = 3;
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(cmd_sweep(write_config(dir, "s.json", cfg), false, out, err), kExitFailure);
  const json cells = read_json(dir / "sw/summary.json").at("cells");
  ASSERT_EQ(cells.size(), 2u);
  EXPECT_EQ(cells[0].at("status"), "ok");
  EXPECT_EQ(cells[1].at("status"), "failed");
  EXPECT_TRUE(fs::exists(dir / "sw" / cells[1].at("name").get<std::string>() / "error.txt"));
  EXPECT_NE(slurp(dir / "sw/summary.md").find("failed"), std::string::npos);
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p, std::string* hash_line = nullptr) {
  std::ifstream in(p);
  std::string line;
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.rfind("#", 0) == 0) {
      if (hash_line) *hash_line = line;
      continue;
    }
    std::vector<std::string> cols;
    std::istringstream fields(line);
    std::string f;
    while (std::getline(fields, f, ',')) cols.push_back(f);
    rows.push_back(cols);
  }
  return rows;
}

TEST(Report, CsvSeriesRoundTrip) {
  const auto dir = testing::scratch_dir("cli_report");
  ASSERT_EQ(train_quietly(write_config(dir, "c.json", tiny_config(dir / "run", 3))), kExitOk);
  std::ostringstream out;
  std::ostringstream err;
  ASSERT_EQ(cmd_report(dir / "run", out, err), kExitOk) << err.str();
  const fs::path rep = dir / "run/seed_0/report";
  const auto log = read_metrics_jsonl(dir / "run/seed_0/metrics.jsonl");
  const std::string hash = read_json(dir / "run/config.resolved.json").at("config_hash");
  for (const char* name : {"accuracy_vs_epoch.csv", "grad_norm_vs_epoch.csv", "sharpness_vs_loss.csv",
                           "distance.csv", "schedule.csv", "loss_slice.csv", "bound.csv", "taylor.csv"}) {
    std::string hash_line;
    const auto rows = read_csv(rep / name, &hash_line);
    EXPECT_EQ(hash_line, "# config_hash=" + hash) << name;
    EXPECT_GE(rows.size(), 2u) << name;
  }
  const auto grad = read_csv(rep / "grad_norm_vs_epoch.csv");
  ASSERT_EQ(grad.size(), log.size() + 1);
  for (std::size_t i = 0; i < log.size(); ++i) {
    EXPECT_EQ(std::stoul(grad[i + 1][0]), log[i].epoch);
    EXPECT_EQ(std::stod(grad[i + 1][1]), log[i].grad_norm_mean);
  }
  const auto dist = read_csv(rep / "distance.csv");
  double cumulative = 0.0;
  for (std::size_t i = 0; i < log.size(); ++i) {
    cumulative += log[i].step_distance;
    EXPECT_NEAR(std::stod(dist[i + 1][2]), cumulative, 1e-12 * cumulative);
  }
  const auto acc = read_csv(rep / "accuracy_vs_epoch.csv");
  EXPECT_EQ(acc[0].size(), 3u);
  EXPECT_EQ(std::stod(acc[1][1]), log[0].val_acc_clean);
  EXPECT_EQ(read_csv(rep / "loss_slice.csv").size(), 1u + 21 * 21);
}

TEST(Report, OptionalSectionsOmittedWithoutCheckpoint) {
  const auto dir = testing::scratch_dir("cli_report_bare");
  ASSERT_EQ(train_quietly(write_config(dir, "c.json", tiny_config(dir / "run", 2))), kExitOk);
  fs::create_directories(dir / "bare");
  fs::copy_file(dir / "run/seed_0/metrics.jsonl", dir / "bare/metrics.jsonl");
  std::ostringstream out;
  std::ostringstream err;
  ASSERT_EQ(cmd_report(dir / "bare", out, err), kExitOk);
  EXPECT_TRUE(fs::exists(dir / "bare/report/accuracy_vs_epoch.csv"));
  EXPECT_FALSE(fs::exists(dir / "bare/report/loss_slice.csv"));
  EXPECT_FALSE(fs::exists(dir / "bare/report/bound.csv"));
}

TEST(Report, MissingMetricsIsUsageError) {
  const auto dir = testing::scratch_dir("cli_report_missing");
  std::ostringstream out;
  std::ostringstream err;
  EXPECT_EQ(cmd_report(dir, out, err), kExitUsage);
  EXPECT_EQ(cmd_report(dir / "absent", out, err), kExitUsage);
}

TEST(Serialize, MetricsRoundTrip) {
  MetricsRecord rec;
  rec.epoch = 4;
  rec.train_loss = 0.123456789012345678;
  rec.val_acc_clean = 0.75;
  rec.val_acc_noisy = {{0.05, 0.7}, {0.1, 0.6}};
  rec.grad_norm_mean = 1.0 / 3.0;
  rec.cos_sim_mean = 0.99;
  rec.step_distance = 2.5;
  rec.lr = 0.01;
  rec.strength_t = 0.2;
  EXPECT_EQ(metrics_from_json(json::parse(to_json(rec).dump())), rec);
  rec.cos_sim_mean.reset();
  EXPECT_EQ(metrics_from_json(json::parse(to_json(rec).dump())), rec);
}

TEST(Serialize, EvalReportRoundTrip) {
  EvalReport r = aggregate({{0.8, 0.7}, {0.6, 0.65}});
  r.sigma_test = 0.1;
  r.rmse = 0.02;
  const EvalReport back = eval_report_from_json(json::parse(to_json(r).dump()));
  EXPECT_EQ(back.per_cell, r.per_cell);
  EXPECT_EQ(back.mean_acc, r.mean_acc);
  EXPECT_EQ(back.weight_std, r.weight_std);
  EXPECT_EQ(back.rmse, r.rmse);
}

}  // namespace
}  // namespace flatnoise
