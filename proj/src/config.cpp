// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include "flatnoise/config.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace flatnoise {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view data_kind_name(DataKind k) {
  switch (k) {
    case DataKind::Spirals: return "spirals";
    case DataKind::Blobs: return "blobs";
    case DataKind::Idx: return "idx";
  }
  return "unknown";
}

DataKind parse_data_kind(std::string_view name) {
  if (name == "spirals") return DataKind::Spirals;
  if (name == "blobs") return DataKind::Blobs;
  if (name == "idx") return DataKind::Idx;
  throw DomainError("unknown data kind '" + std::string(name) + "'");
}

// Reads keys from one JSON object and remembers which were consumed so that
// anything left over can be reported.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
  }

  bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }

  const json& raw(const std::string& key) { return j_.at(key); }

  std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(key_path(key) + ": expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) throw ConfigError(key_path(key) + ": must be finite");
  }

  template <typename U>
  void count(const std::string& key, U& out) {
    if (!has(key)) return;
    out = as_count<U>(j_.at(key), key_path(key));
  }

  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(key_path(key) + ": expected a string");
    out = v.get<std::string>();
  }

  template <typename E, typename Parse>
  void enumerated(const std::string& key, E& out, Parse parse) {
    std::string name;
    if (!has(key)) return;
    string(key, name);
    try {
      out = parse(name);
    } catch (const DomainError& e) {
      throw ConfigError(key_path(key) + ": " + e.what());
    }
  }

  void numbers(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(key_path(key) + ": expected a list of numbers");
    out.clear();
    for (const json& e : v) {
      if (!e.is_number()) throw ConfigError(key_path(key) + ": expected a list of numbers");
      out.push_back(e.get<double>());
    }
  }

  template <typename U>
  void counts(const std::string& key, std::vector<U>& out) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(key_path(key) + ": expected a list of integers");
    out.clear();
    for (const json& e : v) out.push_back(as_count<U>(e, key_path(key)));
  }

  template <typename E, typename Parse>
  void enumerations(const std::string& key, std::vector<E>& out, Parse parse) {
    if (!has(key)) return;
    const json& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(key_path(key) + ": expected a list of names");
    out.clear();
    for (const json& e : v) {
      if (!e.is_string()) throw ConfigError(key_path(key) + ": expected a list of names");
      try {
        out.push_back(parse(e.get<std::string>()));
      } catch (const DomainError& err) {
        throw ConfigError(key_path(key) + ": " + err.what());
      }
    }
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.contains(item.key())) throw ConfigError("unknown key '" + key_path(item.key()) + "'");
    }
  }

 private:
  template <typename U>
  static U as_count(const json& v, const std::string& path) {
    if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<std::int64_t>() < 0)) {
      throw ConfigError(path + ": expected a non-negative integer");
    }
    return static_cast<U>(v.get<std::uint64_t>());
  }

  std::string where() const { return path_.empty() ? "config" : path_; }

  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

void check(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

ExperimentConfig parse_body(Section& root) {
  ExperimentConfig cfg;

  if (root.has("model")) {
    Section s(root.raw("model"), "model");
    s.counts("hidden", cfg.hidden);
    s.enumerated("activation", cfg.activation, parse_activation);
    s.finish();
    for (std::size_t w : cfg.hidden) check(w >= 1, "model.hidden: widths must be >= 1");
  }

  if (root.has("data")) {
    Section s(root.raw("data"), "data");
    DataConfig& d = cfg.data;
    s.enumerated("kind", d.kind, parse_data_kind);
    s.count("classes", d.classes);
    s.count("per_class", d.per_class);
    s.number("noise_std", d.noise_std);
    s.count("dim", d.dim);
    s.number("separation", d.separation);
    s.string("images", d.images);
    s.string("labels", d.labels);
    if (s.has("fractions")) {
      std::vector<double> f;
      s.numbers("fractions", f);
      check(f.size() == 3, "data.fractions: expected [train, val, test]");
      d.fractions = {f[0], f[1], f[2]};
    }
    s.count("seed", d.seed);
    s.finish();
    check(d.classes >= 2, "data.classes: must be >= 2");
    check(d.per_class >= 1, "data.per_class: must be >= 1");
    check(d.noise_std >= 0.0, "data.noise_std: must be non-negative");
    check(d.separation >= 0.0, "data.separation: must be non-negative");
    if (d.kind == DataKind::Blobs) check(d.classes <= d.dim, "data.dim: blobs need dim >= classes");
    if (d.kind == DataKind::Idx) check(!d.images.empty() && !d.labels.empty(), "data: idx needs images and labels");
    double total = 0.0;
    for (double f : d.fractions) {
      check(f >= 0.0, "data.fractions: must be non-negative");
      total += f;
    }
    check(std::abs(total - 1.0) < 1e-9, "data.fractions: must sum to 1");
    check(d.fractions[0] > 0.0, "data.fractions: train fraction must be positive");
  }

  if (root.has("train")) {
    Section s(root.raw("train"), "train");
    TrainSection& t = cfg.train;
    s.enumerated("optimizer", t.optimizer, parse_optimizer);
    s.count("epochs", t.epochs);
    s.count("batch_size", t.batch_size);
    s.number("lr", t.lr);
    s.number("momentum", t.momentum);
    s.number("weight_decay", t.weight_decay);
    s.number("label_smoothing", t.label_smoothing);
    s.enumerated("noise_family", t.noise_family, parse_noise_family);
    s.string("device_table", t.device_table);
    s.number("strength", t.strength);
    s.enumerated("schedule", t.schedule, parse_schedule_kind);
    if (s.has("warmup_iters")) {
      std::uint64_t iters = 0;
      s.count("warmup_iters", iters);
      t.warmup_iters = iters;
    }
    if (s.has("warmup_fraction")) {
      double f = 0.0;
      s.number("warmup_fraction", f);
      t.warmup_fraction = f;
    }
    s.finish();
    check(t.batch_size >= 1, "train.batch_size: must be >= 1");
    check(t.lr > 0.0, "train.lr: must be positive");
    check(t.momentum >= 0.0 && t.momentum < 1.0, "train.momentum: must lie in [0, 1)");
    check(t.weight_decay >= 0.0, "train.weight_decay: must be non-negative");
    check(t.label_smoothing >= 0.0 && t.label_smoothing < 1.0, "train.label_smoothing: must lie in [0, 1)");
    check(t.strength >= 0.0, "train.strength: must be non-negative");
    check(!(t.warmup_iters && t.warmup_fraction), "train: give warmup_iters or warmup_fraction, not both");
    if (t.warmup_iters) check(*t.warmup_iters >= 1, "train.warmup_iters: must be >= 1");
    if (t.warmup_fraction) {
      check(*t.warmup_fraction > 0.0 && *t.warmup_fraction <= 1.0, "train.warmup_fraction: must lie in (0, 1]");
    }
    if (t.noise_family == NoiseFamily::Device) check(!t.device_table.empty(), "train.device_table: required for device noise");
  }

  if (root.has("seeds")) {
    root.counts("seeds", cfg.seeds);
    check(!cfg.seeds.empty(), "seeds: need at least one seed");
  }

  if (root.has("eval")) {
    Section s(root.raw("eval"), "eval");
    EvalConfig& e = cfg.eval;
    s.numbers("sigma_test", e.sigma_test);
    s.count("draws", e.draws);
    s.count("monitor_draws", e.monitor_draws);
    s.enumerated("family", e.family, parse_noise_family);
    s.string("device_table", e.device_table);
    s.count("seed", e.seed);
    s.finish();
    for (double v : e.sigma_test) check(v >= 0.0, "eval.sigma_test: values must be non-negative");
    check(e.draws >= 1, "eval.draws: must be >= 1");
    check(e.monitor_draws >= 1, "eval.monitor_draws: must be >= 1");
    if (e.family == NoiseFamily::Device) check(!e.device_table.empty(), "eval.device_table: required for device noise");
  }

  root.string("output_dir", cfg.output_dir);
  check(!cfg.output_dir.empty(), "output_dir: must not be empty");
  return cfg;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

}  // namespace

ordered_json ExperimentConfig::to_json() const {
  ordered_json j;
  j["model"] = {{"hidden", hidden}, {"activation", std::string(flatnoise::to_string(activation))}};
  ordered_json d;
  d["kind"] = std::string(data_kind_name(data.kind));
  d["classes"] = data.classes;
  d["per_class"] = data.per_class;
  d["noise_std"] = data.noise_std;
  d["dim"] = data.dim;
  d["separation"] = data.separation;
  d["images"] = data.images;
  d["labels"] = data.labels;
  d["fractions"] = data.fractions;
  d["seed"] = data.seed;
  j["data"] = d;
  ordered_json t;
  t["optimizer"] = std::string(flatnoise::to_string(train.optimizer));
  t["epochs"] = train.epochs;
  t["batch_size"] = train.batch_size;
  t["lr"] = train.lr;
  t["momentum"] = train.momentum;
  t["weight_decay"] = train.weight_decay;
  t["label_smoothing"] = train.label_smoothing;
  t["noise_family"] = std::string(flatnoise::to_string(train.noise_family));
  t["device_table"] = train.device_table;
  t["strength"] = train.strength;
  t["schedule"] = std::string(flatnoise::to_string(train.schedule));
  if (train.warmup_iters) t["warmup_iters"] = *train.warmup_iters;
  if (train.warmup_fraction) t["warmup_fraction"] = *train.warmup_fraction;
  j["train"] = t;
  j["seeds"] = seeds;
  ordered_json e;
  e["sigma_test"] = eval.sigma_test;
  e["draws"] = eval.draws;
  e["monitor_draws"] = eval.monitor_draws;
  e["family"] = std::string(flatnoise::to_string(eval.family));
  e["device_table"] = eval.device_table;
  e["seed"] = eval.seed;
  j["eval"] = e;
  j["output_dir"] = output_dir;
  return j;
}

std::string ExperimentConfig::hash() const {
  ordered_json j = to_json();
  j.erase("output_dir");
  return fnv1a_hex(j.dump());
}

ordered_json SweepGrid::to_json() const {
  ordered_json j;
  ordered_json opt = ordered_json::array();
  for (OptimizerKind k : optimizer) opt.push_back(std::string(flatnoise::to_string(k)));
  ordered_json sch = ordered_json::array();
  for (ScheduleKind k : schedule) sch.push_back(std::string(flatnoise::to_string(k)));
  j["optimizer"] = opt;
  j["strength"] = strength;
  j["schedule"] = sch;
  j["warmup_fraction"] = warmup_fraction;
  return j;
}

ExperimentConfig parse_experiment(const json& j) {
  Section root(j, "");
  ExperimentConfig cfg = parse_body(root);
  root.finish();
  return cfg;
}

ExperimentConfig load_experiment(const std::filesystem::path& path) {
  return parse_experiment(read_json_file(path));
}

SweepConfig parse_sweep(const json& j) {
  Section root(j, "");
  SweepConfig sc;
  sc.base = parse_body(root);
  check(root.has("sweep"), "sweep: missing grid section");
  Section s(root.raw("sweep"), "sweep");
  s.enumerations("optimizer", sc.grid.optimizer, parse_optimizer);
  s.numbers("strength", sc.grid.strength);
  s.enumerations("schedule", sc.grid.schedule, parse_schedule_kind);
  s.numbers("warmup_fraction", sc.grid.warmup_fraction);
  s.finish();
  root.finish();
  for (double v : sc.grid.strength) check(v >= 0.0, "sweep.strength: values must be non-negative");
  for (double v : sc.grid.warmup_fraction) check(v > 0.0 && v <= 1.0, "sweep.warmup_fraction: values must lie in (0, 1]");
  return sc;
}

SweepConfig load_sweep(const std::filesystem::path& path) { return parse_sweep(read_json_file(path)); }

SplitResult build_datasets(const DataConfig& data) {
  Dataset all;
  RngStream gen_rng(data.seed, StreamId::DataShuffle, 1);
  switch (data.kind) {
    case DataKind::Spirals: all = gen_spirals(data.classes, data.per_class, data.noise_std, gen_rng); break;
    case DataKind::Blobs: all = gen_blobs(data.classes, data.per_class, data.dim, data.separation, gen_rng); break;
    case DataKind::Idx: all = load_idx(data.images, data.labels); break;
  }
  RngStream split_rng(data.seed, StreamId::DataShuffle, 2);
  return split(all, data.fractions, split_rng);
}

ModelSpec model_for(const ExperimentConfig& cfg, const Dataset& train_set) {
  ModelSpec m;
  m.input_dim = train_set.dim();
  m.hidden = cfg.hidden;
  m.activation = cfg.activation;
  m.num_classes = train_set.num_classes;
  return m;
}

TrainConfig resolve_train(const ExperimentConfig& cfg, std::uint64_t seed, std::size_t train_size) {
  const TrainSection& t = cfg.train;
  TrainConfig tc;
  tc.optimizer = t.optimizer;
  tc.epochs = t.epochs;
  tc.batch_size = t.batch_size;
  tc.lr0 = t.lr;
  tc.momentum = t.momentum;
  tc.weight_decay = t.weight_decay;
  tc.label_smoothing = t.label_smoothing;
  tc.noise.family = t.noise_family;
  if (t.noise_family == NoiseFamily::Device) {
    tc.noise.device = std::make_shared<const DeviceErrorModel>(DeviceErrorModel::from_csv(t.device_table));
  }
  tc.seed = seed;

  const std::uint64_t batches = (train_size + t.batch_size - 1) / t.batch_size;
  const std::uint64_t total = std::max<std::uint64_t>(1, batches * t.epochs);
  std::uint64_t warmup = 1;
  if (t.schedule != ScheduleKind::Constant) {
    if (t.warmup_iters) {
      warmup = *t.warmup_iters;
    } else {
      const double fraction = t.warmup_fraction.value_or(0.5);
      warmup = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(fraction * static_cast<double>(total))));
    }
  }
  tc.schedule = Schedule{t.schedule, t.strength, warmup};
  return tc;
}

std::filesystem::path resolve_output_dir(const std::string& output_dir) {
  std::filesystem::path p(output_dir);
  const char* root = std::getenv("FLATNOISE_OUTPUT_ROOT");
  if (root != nullptr && *root != '\0' && p.is_relative()) return std::filesystem::path(root) / p;
  return p;
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace flatnoise
