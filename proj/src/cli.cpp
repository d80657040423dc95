// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "flatnoise/bound.hpp"
#include "flatnoise/checkpoint.hpp"
#include "flatnoise/serialize.hpp"
#include "flatnoise/sharpness.hpp"

namespace flatnoise {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::shared_ptr<const DeviceErrorModel> load_table(const std::string& path) {
  if (path.empty()) return nullptr;
  return std::make_shared<const DeviceErrorModel>(DeviceErrorModel::from_csv(path));
}

NoiseSpec eval_noise(const EvalConfig& eval, double sigma) {
  NoiseSpec spec;
  spec.family = eval.family;
  spec.strength = sigma;
  spec.device = load_table(eval.device_table);
  return spec;
}

const Dataset& pick_split(const SplitResult& splits, const std::string& name) {
  if (name == "train") return splits.train;
  if (name == "val") return splits.val;
  if (name == "test") return splits.test;
  throw UsageError("unknown split '" + name + "' (expected train, val or test)");
}

std::vector<ParamSet> best_params(const std::vector<SeedRun>& runs) {
  std::vector<ParamSet> out;
  for (const SeedRun& r : runs) out.push_back(r.result.best);
  return out;
}

// Maps an exception from any command to its exit code and prints it.
int report_error(std::ostream& err, const std::string& context) {
  try {
    throw;
  } catch (const NumericError& e) {
    err << context << ": numeric error: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const ConfigError& e) {
    err << context << ": config error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UsageError& e) {
    err << context << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const CheckpointError& e) {
    err << context << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const IdxError& e) {
    err << context << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << context << ": " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << context << ": " << e.what() << '\n';
    return kExitFailure;
  }
}

std::string seed_dir_name(std::uint64_t seed) { return "seed_" + std::to_string(seed); }

}  // namespace

std::vector<SeedRun> run_training(const ExperimentConfig& cfg, const fs::path& dir) {
  const SplitResult splits = build_datasets(cfg.data);
  const ModelSpec model = model_for(cfg, splits.train);
  const std::string hash = cfg.hash();
  const std::string config_text = cfg.to_json().dump();

  fs::create_directories(dir);
  write_json(dir / "config.resolved.json", ordered_json{{"config_hash", hash}, {"config", cfg.to_json()}});
  write_json(dir / "data_manifest.json",
             ordered_json{{"config_hash", hash}, {"splits", dataset_manifest(splits)}});

  MonitorSpec monitor;
  monitor.sigmas = cfg.eval.sigma_test;
  monitor.draws = cfg.eval.monitor_draws;
  monitor.family = cfg.eval.family;
  monitor.device = load_table(cfg.eval.device_table);

  std::vector<SeedRun> runs;
  for (std::uint64_t seed : cfg.seeds) {
    SeedRun run;
    run.seed = seed;
    run.dir = dir / seed_dir_name(seed);
    fs::create_directories(run.dir);
    const TrainConfig tc = resolve_train(cfg, seed, splits.train.size());
    run.result = train(model, splits.train, splits.val, tc, monitor);
    write_metrics_jsonl(run.dir / "metrics.jsonl", run.result.log);
    write_checkpoint(run.dir / "best.ckpt", {model, run.result.best, hash}, config_text);
    write_checkpoint(run.dir / "final.ckpt", {model, run.result.final_params, hash}, config_text);
    write_json(run.dir / "run.json", ordered_json{{"config_hash", hash},
                                                  {"seed", seed},
                                                  {"metrics_schema", kMetricsSchemaVersion},
                                                  {"epochs", run.result.log.size()},
                                                  {"best_epoch", run.result.best_epoch}});
    runs.push_back(std::move(run));
  }
  return runs;
}

std::vector<fs::path> find_checkpoints(const fs::path& run_dir) {
  std::vector<std::pair<std::uint64_t, fs::path>> found;
  if (!fs::is_directory(run_dir)) return {};
  for (const fs::directory_entry& e : fs::directory_iterator(run_dir)) {
    const std::string name = e.path().filename().string();
    if (!e.is_directory() || name.rfind("seed_", 0) != 0) continue;
    const fs::path ckpt = e.path() / "best.ckpt";
    if (!fs::exists(ckpt)) continue;
    try {
      found.emplace_back(std::stoull(name.substr(5)), ckpt);
    } catch (const std::exception&) {
      continue;
    }
  }
  std::sort(found.begin(), found.end());
  std::vector<fs::path> out;
  for (auto& [seed, path] : found) out.push_back(std::move(path));
  return out;
}

EvalOutcome run_eval(const EvalRequest& request) {
  std::vector<fs::path> paths;
  for (const fs::path& p : request.checkpoints) {
    if (fs::is_directory(p)) {
      const std::vector<fs::path> found = find_checkpoints(p);
      if (found.empty()) throw UsageError("no seed_*/best.ckpt under '" + p.string() + "'");
      paths.insert(paths.end(), found.begin(), found.end());
    } else if (fs::exists(p)) {
      paths.push_back(p);
    } else {
      throw UsageError("checkpoint '" + p.string() + "' not found");
    }
  }
  if (paths.empty()) throw UsageError("no checkpoint given");
  if (request.draws < 1) throw UsageError("--draws must be >= 1");

  std::vector<Checkpoint> ckpts;
  for (const fs::path& p : paths) ckpts.push_back(read_checkpoint(p));
  for (const Checkpoint& c : ckpts) {
    if (c.config_hash != ckpts.front().config_hash || !(c.model == ckpts.front().model)) {
      throw UsageError("checkpoints come from different configs (" + ckpts.front().config_hash + " vs " +
                       c.config_hash + ")");
    }
  }

  const json side = read_json(sidecar_path(paths.front()));
  if (!side.contains("config")) throw UsageError("checkpoint sidecar carries no config; cannot rebuild data");
  const ExperimentConfig cfg = parse_experiment(side.at("config"));
  const SplitResult splits = build_datasets(cfg.data);
  const Dataset& data = pick_split(splits, request.split);
  if (data.empty()) throw UsageError("split '" + request.split + "' is empty");

  std::vector<ParamSet> weights;
  for (const Checkpoint& c : ckpts) weights.push_back(c.params);
  const std::vector<double> sigmas = request.sigma_test.value_or(cfg.eval.sigma_test);
  if (sigmas.empty()) throw UsageError("no sigma_test values");
  const std::uint64_t seed = request.seed.value_or(cfg.eval.seed);

  EvalOutcome outcome;
  outcome.config_hash = ckpts.front().config_hash;
  outcome.checkpoints = paths;
  for (double sigma : sigmas) {
    if (sigma < 0.0) throw UsageError("sigma_test values must be non-negative");
    outcome.reports.push_back(evaluate_grid(ckpts.front().model, weights, data, eval_noise(cfg.eval, sigma),
                                            request.draws, seed));
  }
  return outcome;
}

int cmd_train(const fs::path& config_path, std::ostream& out, std::ostream& err) {
  try {
    const ExperimentConfig cfg = load_experiment(config_path);
    const fs::path dir = resolve_output_dir(cfg.output_dir);
    const std::vector<SeedRun> runs = run_training(cfg, dir);
    out << "config " << cfg.hash() << " -> " << dir.string() << '\n';
    for (const SeedRun& r : runs) {
      const MetricsRecord* last = r.result.log.empty() ? nullptr : &r.result.log.back();
      out << "seed " << r.seed << ": " << r.result.log.size() << " epochs, best epoch " << r.result.best_epoch;
      if (last != nullptr) out << ", final val acc " << short_num(last->val_acc_clean);
      out << '\n';
    }
    return kExitOk;
  } catch (...) {
    return report_error(err, "train");
  }
}

int cmd_eval(const EvalRequest& request, const std::optional<fs::path>& output, std::ostream& out,
             std::ostream& err) {
  try {
    const EvalOutcome outcome = run_eval(request);
    ordered_json j;
    j["config_hash"] = outcome.config_hash;
    ordered_json paths = ordered_json::array();
    for (const fs::path& p : outcome.checkpoints) paths.push_back(p.string());
    j["checkpoints"] = paths;
    j["split"] = request.split;
    j["draws"] = request.draws;
    j["seeds"] = outcome.checkpoints.size();
    ordered_json arr = ordered_json::array();
    for (const EvalReport& r : outcome.reports) arr.push_back(to_json(r));
    j["reports"] = arr;
    if (output) {
      if (output->has_parent_path()) fs::create_directories(output->parent_path());
      write_json(*output, j);
    } else {
      out << j.dump(2) << '\n';
    }
    out << "sigma_test  accuracy (%)\n";
    for (const EvalReport& r : outcome.reports) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%-10s  ", short_num(r.sigma_test).c_str());
      out << buf << format_report(r) << '\n';
    }
    return kExitOk;
  } catch (...) {
    return report_error(err, "eval");
  }
}

std::string sweep_table(const std::vector<std::string>& cell_names, const std::vector<double>& sigma_test,
                        const std::vector<std::vector<std::optional<EvalReport>>>& reports) {
  std::vector<std::optional<std::size_t>> best(sigma_test.size());
  for (std::size_t c = 0; c < sigma_test.size(); ++c) {
    for (std::size_t r = 0; r < reports.size(); ++r) {
      if (!reports[r][c]) continue;
      if (!best[c] || reports[r][c]->mean_acc > reports[*best[c]][c]->mean_acc) best[c] = r;
    }
  }
  std::ostringstream md;
  md << "| cell |";
  for (double s : sigma_test) md << " sigma_test=" << short_num(s) << " |";
  md << "\n|---|";
  for (std::size_t c = 0; c < sigma_test.size(); ++c) md << "---|";
  md << '\n';
  for (std::size_t r = 0; r < reports.size(); ++r) {
    md << "| " << cell_names[r] << " |";
    for (std::size_t c = 0; c < sigma_test.size(); ++c) {
      if (!reports[r][c]) {
        md << " failed |";
      } else if (best[c] == r) {
        md << " **" << format_report(*reports[r][c]) << "** |";
      } else {
        md << " " << format_report(*reports[r][c]) << " |";
      }
    }
    md << '\n';
  }
  return md.str();
}

int cmd_sweep(const fs::path& config_path, bool resume, std::ostream& out, std::ostream& err) {
  SweepConfig sc;
  try {
    sc = load_sweep(config_path);
  } catch (...) {
    return report_error(err, "sweep");
  }
  const ExperimentConfig& base = sc.base;
  const fs::path dir = resolve_output_dir(base.output_dir);

  auto axis_or = []<typename T>(const std::vector<T>& axis, T fallback) {
    return axis.empty() ? std::vector<T>{fallback} : axis;
  };
  const auto optimizers = axis_or(sc.grid.optimizer, base.train.optimizer);
  const auto strengths = axis_or(sc.grid.strength, base.train.strength);
  const auto schedules = axis_or(sc.grid.schedule, base.train.schedule);
  std::vector<std::optional<double>> warmups;
  if (sc.grid.warmup_fraction.empty()) {
    warmups.push_back(base.train.warmup_fraction);
  } else {
    for (double w : sc.grid.warmup_fraction) warmups.emplace_back(w);
  }

  std::vector<std::string> names;
  std::vector<std::vector<std::optional<EvalReport>>> table;
  ordered_json cells = ordered_json::array();
  bool any_failed = false;
  std::size_t index = 0;
  try {
    fs::create_directories(dir);
  } catch (...) {
    return report_error(err, "sweep");
  }

  for (OptimizerKind opt : optimizers) {
    for (double strength : strengths) {
      for (ScheduleKind sched : schedules) {
        for (const std::optional<double>& warm : warmups) {
          ExperimentConfig cfg = base;
          cfg.train.optimizer = opt;
          cfg.train.strength = strength;
          cfg.train.schedule = sched;
          if (!sc.grid.warmup_fraction.empty()) {
            cfg.train.warmup_iters.reset();
            cfg.train.warmup_fraction = warm;
          }
          char prefix[16];
          std::snprintf(prefix, sizeof prefix, "c%03zu", index++);
          std::string name = std::string(prefix) + "_" + std::string(to_string(opt)) + "_s" + short_num(strength) +
                             "_" + std::string(to_string(sched));
          if (warm && !sc.grid.warmup_fraction.empty()) name += "_w" + short_num(*warm);
          const fs::path cell_dir = dir / name;
          cfg.output_dir = cell_dir.string();

          ordered_json cell;
          cell["name"] = name;
          cell["optimizer"] = std::string(to_string(opt));
          cell["strength"] = strength;
          cell["schedule"] = std::string(to_string(sched));
          cell["warmup_fraction"] = warm ? ordered_json(*warm) : ordered_json(nullptr);
          cell["config_hash"] = cfg.hash();

          std::vector<std::optional<EvalReport>> row(base.eval.sigma_test.size());
          const fs::path report_path = cell_dir / "report.json";
          try {
            json saved;
            if (resume && fs::exists(report_path)) saved = read_json(report_path);
            if (saved.is_object() && saved.value("config_hash", "") == cfg.hash()) {
              cell["status"] = "reused";
            } else {
              fs::remove(cell_dir / "error.txt");
              const std::vector<SeedRun> runs = run_training(cfg, cell_dir);
              const SplitResult splits = build_datasets(cfg.data);
              const std::vector<ParamSet> weights = best_params(runs);
              const ModelSpec model = model_for(cfg, splits.train);
              ordered_json reports = ordered_json::array();
              for (double sigma : cfg.eval.sigma_test) {
                reports.push_back(to_json(evaluate_grid(model, weights, splits.test, eval_noise(cfg.eval, sigma),
                                                        cfg.eval.draws, cfg.eval.seed)));
              }
              ordered_json rep{{"config_hash", cfg.hash()}, {"reports", reports}};
              write_json(report_path, rep);
              saved = json::parse(rep.dump());
              cell["status"] = "ok";
            }
            ordered_json cell_reports = ordered_json::array();
            for (std::size_t c = 0; c < row.size(); ++c) {
              row[c] = eval_report_from_json(saved.at("reports").at(c));
              cell_reports.push_back(to_json(*row[c]));
            }
            cell["reports"] = cell_reports;
          } catch (...) {
            std::ostringstream msg;
            report_error(msg, name);
            any_failed = true;
            cell["status"] = "failed";
            cell["error"] = msg.str();
            std::error_code ec;
            fs::create_directories(cell_dir, ec);
            std::ofstream(cell_dir / "error.txt") << msg.str();
            err << msg.str();
            std::fill(row.begin(), row.end(), std::nullopt);
          }
          out << name << ": " << cell["status"].get<std::string>() << '\n';
          names.push_back(name);
          table.push_back(std::move(row));
          cells.push_back(cell);
        }
      }
    }
  }

  const std::string md = sweep_table(names, base.eval.sigma_test, table);
  try {
    ordered_json summary;
    summary["base_config_hash"] = base.hash();
    summary["grid"] = sc.grid.to_json();
    summary["sigma_test"] = base.eval.sigma_test;
    summary["cells"] = cells;
    write_json(dir / "summary.json", summary);
    std::ofstream(dir / "summary.md") << "<!-- config_hash=" << base.hash() << " -->\n" << md;
  } catch (...) {
    return report_error(err, "sweep");
  }
  out << md;
  return any_failed ? kExitFailure : kExitOk;
}

namespace {

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::string& hash, const std::string& header) : out_(path) {
    if (!out_) throw std::runtime_error("cannot write '" + path.string() + "'");
    out_ << "# config_hash=" << hash << '\n' << header << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << '\n';
  }

 private:
  std::ofstream out_;
};

void report_metrics(const fs::path& out_dir, const std::string& hash, const std::vector<MetricsRecord>& log) {
  std::vector<double> sigmas;
  if (!log.empty()) {
    for (const auto& [sigma, acc] : log.front().val_acc_noisy) sigmas.push_back(sigma);
  }
  std::string header = "epoch,val_acc_clean";
  for (double s : sigmas) header += ",val_acc_sigma_" + short_num(s);
  CsvWriter acc(out_dir / "accuracy_vs_epoch.csv", hash, header);
  CsvWriter grad(out_dir / "grad_norm_vs_epoch.csv", hash, "epoch,grad_norm_mean,perturbation_norm_mean");
  CsvWriter sharp(out_dir / "sharpness_vs_loss.csv", hash, "epoch,train_loss,grad_sharpness_mean");
  CsvWriter dist(out_dir / "distance.csv", hash, "epoch,step_distance,cumulative_distance");
  CsvWriter sched(out_dir / "schedule.csv", hash, "epoch,lr,strength_t");
  double cumulative = 0.0;
  for (const MetricsRecord& r : log) {
    const std::string e = std::to_string(r.epoch);
    std::vector<std::string> a{e, num(r.val_acc_clean)};
    for (const auto& [sigma, v] : r.val_acc_noisy) a.push_back(num(v));
    acc.row(a);
    grad.row({e, num(r.grad_norm_mean), num(r.perturbation_norm_mean)});
    sharp.row({e, num(r.train_loss), num(r.grad_sharpness_mean)});
    cumulative += r.step_distance;
    dist.row({e, num(r.step_distance), num(cumulative)});
    sched.row({e, num(r.lr), num(r.strength_t)});
  }
  const bool any_cosine = std::any_of(log.begin(), log.end(), [](const MetricsRecord& r) { return r.cos_sim_mean; });
  if (any_cosine) {
    CsvWriter cos(out_dir / "cosine_vs_epoch.csv", hash, "epoch,cos_sim_mean");
    for (const MetricsRecord& r : log) cos.row({std::to_string(r.epoch), r.cos_sim_mean ? num(*r.cos_sim_mean) : ""});
  }
}

void report_checkpoint(const fs::path& out_dir, const fs::path& ckpt_path) {
  const Checkpoint ck = read_checkpoint(ckpt_path);
  const json side = read_json(sidecar_path(ckpt_path));
  if (!side.contains("config")) return;
  const ExperimentConfig cfg = parse_experiment(side.at("config"));
  const SplitResult splits = build_datasets(cfg.data);
  const Batch train_batch = splits.train.as_batch();
  const ModelObjective loss(ck.model, train_batch, cfg.train.label_smoothing);
  const std::string& hash = ck.config_hash;

  RngStream slice_rng(cfg.eval.seed, StreamId::NoiseEval, 1u << 20);
  LossSliceSpec spec;
  spec.direction_count = 2;
  write_slice_csv(out_dir / "loss_slice.csv", loss_slice(loss, ck.params, spec, slice_rng), hash);

  const double w_norm_sq = dot(ck.params.theta, ck.params.theta);
  CsvWriter bound(out_dir / "bound.csv", hash, "sigma,expected_loss,expected_loss_std_error,h_term,total");
  for (double sigma : {0.005, 0.01, 0.02, 0.05, 0.1}) {
    RngStream rng(cfg.eval.seed, StreamId::NoiseEval, (1u << 20) + 1);
    const BoundInputs in{ck.params.size(), splits.train.size(), 0.05, w_norm_sq, sigma};
    const BoundResult r = bound_rhs(loss, ck.params, in, 128, rng);
    bound.row({num(sigma), num(r.expected_loss.mean), num(r.expected_loss.std_error), num(r.h), num(r.total)});
  }

  CsvWriter taylor(out_dir / "taylor.csv", hash, "sigma,lhs,lhs_std_error,rhs,trace,gap");
  for (double sigma : {0.0025, 0.005, 0.01}) {
    RngStream rng(cfg.eval.seed, StreamId::NoiseEval, (1u << 20) + 2);
    const TaylorCheck t = taylor_check(loss, ck.params, sigma, 500, rng, TraceMethod::Hutchinson, 30);
    taylor.row({num(sigma), num(t.lhs), num(t.lhs_std_error), num(t.rhs), num(t.trace), num(t.gap)});
  }
}

std::string run_hash(const fs::path& dir) {
  for (const fs::path& p : {dir / "run.json", dir.parent_path() / "config.resolved.json"}) {
    if (!fs::exists(p)) continue;
    const json j = read_json(p);
    if (j.contains("config_hash")) return j.at("config_hash").get<std::string>();
  }
  return {};
}

}  // namespace

int cmd_report(const fs::path& run_dir, std::ostream& out, std::ostream& err) {
  try {
    std::vector<fs::path> dirs;
    if (fs::exists(run_dir / "metrics.jsonl")) {
      dirs.push_back(run_dir);
    } else if (fs::is_directory(run_dir)) {
      for (const fs::directory_entry& e : fs::directory_iterator(run_dir)) {
        if (e.is_directory() && fs::exists(e.path() / "metrics.jsonl")) dirs.push_back(e.path());
      }
      std::sort(dirs.begin(), dirs.end());
    }
    if (dirs.empty()) throw UsageError("no metrics.jsonl in '" + run_dir.string() + "'");

    for (const fs::path& d : dirs) {
      const std::vector<MetricsRecord> log = read_metrics_jsonl(d / "metrics.jsonl");
      const fs::path out_dir = d / "report";
      fs::create_directories(out_dir);
      report_metrics(out_dir, run_hash(d), log);
      if (fs::exists(d / "best.ckpt")) report_checkpoint(out_dir, d / "best.ckpt");
      out << d.string() << ": " << log.size() << " epochs -> " << out_dir.string() << '\n';
    }
    return kExitOk;
  } catch (...) {
    return report_error(err, "report");
  }
}

int run_cli(int argc, char** argv) {
  CLI::App app{"flatnoise: noise-robust training, evaluation and sharpness diagnostics"};
  app.require_subcommand(1);

  fs::path train_config;
  auto* train_cmd = app.add_subcommand("train", "Train every seed of an experiment config");
  train_cmd->add_option("--config", train_config, "Experiment config (JSON)")->required();

  EvalRequest req;
  std::vector<std::string> ckpts;
  std::vector<double> sigma_test;
  std::uint64_t eval_seed = 0;
  std::string eval_output;
  auto* eval_cmd = app.add_subcommand("eval", "Noisy-inference accuracy over seeds x noise draws");
  eval_cmd->add_option("--checkpoint", ckpts, "Checkpoint file or run directory (repeatable)")->required();
  auto* sigma_opt = eval_cmd->add_option("--sigma-test", sigma_test, "Comma-separated test noise strengths")
                        ->delimiter(',');
  eval_cmd->add_option("--draws", req.draws, "Noise draws per weight set")->capture_default_str();
  auto* seed_opt = eval_cmd->add_option("--seed", eval_seed, "Evaluation noise seed");
  eval_cmd->add_option("--split", req.split, "train, val or test")->capture_default_str();
  auto* output_opt = eval_cmd->add_option("--output", eval_output, "Write the JSON report here");

  fs::path sweep_config;
  bool resume = false;
  auto* sweep_cmd = app.add_subcommand("sweep", "Train and evaluate a grid of configs");
  sweep_cmd->add_option("--config", sweep_config, "Sweep config (JSON)")->required();
  sweep_cmd->add_flag("--resume", resume, "Skip cells that already have a report");

  fs::path run_dir;
  auto* report_cmd = app.add_subcommand("report", "Emit CSV series for a training run");
  report_cmd->add_option("--run", run_dir, "Run or seed directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*train_cmd) return cmd_train(train_config, std::cout, std::cerr);
  if (*eval_cmd) {
    for (const std::string& c : ckpts) req.checkpoints.emplace_back(c);
    if (*sigma_opt) req.sigma_test = sigma_test;
    if (*seed_opt) req.seed = eval_seed;
    std::optional<fs::path> output;
    if (*output_opt) output = eval_output;
    return cmd_eval(req, output, std::cout, std::cerr);
  }
  if (*sweep_cmd) return cmd_sweep(sweep_config, resume, std::cout, std::cerr);
  return cmd_report(run_dir, std::cout, std::cerr);
}

}  // namespace flatnoise
