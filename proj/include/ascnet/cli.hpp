#ifndef ASCNET_CLI_HPP_
#define ASCNET_CLI_HPP_

// Command implementations behind tools/ascnet. Kept in a header so the test
// suite can drive the same code paths without spawning processes.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ascnet/checkpoint.hpp"
#include "ascnet/corpus.hpp"
#include "ascnet/evaluator.hpp"
#include "ascnet/pretrainer.hpp"

namespace ascnet::cli {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct EvalConfig {
  std::size_t probe_epochs = 100;
  double probe_lr = 0.1;
  std::size_t probe_batch = 32;
  std::size_t speed_clips_per_speed = 4;
  std::size_t finetune_epochs = 10;
  double finetune_lr = 0.05;
  std::size_t finetune_batch = 16;
};

struct RunConfig {
  std::uint64_t seed = 0;  // training and evaluation; the corpus has its own seed
  std::string out_dir = "runs/default";
  CorpusConfig corpus;
  TrainConfig train;
  EvalConfig eval;

  ProbeConfig probe_config() const {
    ProbeConfig p;
    p.epochs = eval.probe_epochs;
    p.base_lr = eval.probe_lr;
    p.batch_size = eval.probe_batch;
    p.seed = seed;
    return p;
  }

  SpeedProbeConfig speed_probe_config() const {
    SpeedProbeConfig s;
    s.clips_per_speed = eval.speed_clips_per_speed;
    s.probe = probe_config();
    s.seed = seed;
    return s;
  }

  FinetuneConfig finetune_config() const {
    FinetuneConfig f;
    f.epochs = eval.finetune_epochs;
    f.base_lr = eval.finetune_lr;
    f.batch_size = eval.finetune_batch;
    f.seed = seed;
    return f;
  }
};

// ---------------------------------------------------------------------------
// Config file
// ---------------------------------------------------------------------------

inline ordered_json to_json(const CorpusConfig& c) {
  return {{"num_videos", c.num_videos}, {"num_classes", c.num_classes}, {"frames", c.frames},
          {"height", c.height},         {"width", c.width},             {"motion_speed", c.motion_speed},
          {"seed", c.seed}};
}

inline ordered_json to_json(const EvalConfig& e) {
  return {{"probe_epochs", e.probe_epochs},
          {"probe_lr", e.probe_lr},
          {"probe_batch", e.probe_batch},
          {"speed_clips_per_speed", e.speed_clips_per_speed},
          {"finetune_epochs", e.finetune_epochs},
          {"finetune_lr", e.finetune_lr},
          {"finetune_batch", e.finetune_batch}};
}

inline ordered_json to_json(const RunConfig& r) {
  ordered_json train = ascnet::to_json(r.train);
  train.erase("seed");
  train.erase("augment");
  train.erase("encoder");
  ordered_json j;
  j["seed"] = r.seed;
  j["output"] = {{"dir", r.out_dir}};
  j["corpus"] = to_json(r.corpus);
  j["train"] = std::move(train);
  j["augment"] = ascnet::to_json(r.train.augment);
  j["encoder"] = ascnet::to_json(r.train.encoder);
  j["eval"] = to_json(r.eval);
  return j;
}

namespace detail {

inline void check_keys(const nlohmann::json& given, const ordered_json& known, const std::string& where) {
  if (!given.is_object()) throw ConfigError(where.empty() ? "config must be a JSON object" : where + " must be an object");
  for (const auto& [key, value] : given.items()) {
    const std::string path = where.empty() ? key : where + "." + key;
    if (!known.contains(key)) throw ConfigError("unknown config key '" + path + "'");
    if (value.is_null()) throw ConfigError("config key '" + path + "' is null");
    if (known[key].is_object()) check_keys(value, known[key], path);
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  out = j.at(key).get<T>();
}

inline AugmentConfig augment_from_json(const nlohmann::json& j) {
  AugmentConfig a;
  read(j, "out_height", a.out_height);
  read(j, "out_width", a.out_width);
  read(j, "crop_enabled", a.crop_enabled);
  read(j, "crop_scale_min", a.crop_scale_min);
  read(j, "crop_scale_max", a.crop_scale_max);
  read(j, "crop_ratio_min", a.crop_ratio_min);
  read(j, "crop_ratio_max", a.crop_ratio_max);
  read(j, "jitter_enabled", a.jitter_enabled);
  read(j, "jitter_prob", a.jitter_prob);
  read(j, "brightness", a.brightness);
  read(j, "contrast", a.contrast);
  read(j, "saturation", a.saturation);
  read(j, "blur_enabled", a.blur_enabled);
  read(j, "blur_prob", a.blur_prob);
  read(j, "blur_sigma_min", a.blur_sigma_min);
  read(j, "blur_sigma_max", a.blur_sigma_max);
  read(j, "grayscale_enabled", a.grayscale_enabled);
  read(j, "grayscale_prob", a.grayscale_prob);
  read(j, "solarize_enabled", a.solarize_enabled);
  read(j, "solarize_prob", a.solarize_prob);
  read(j, "solarize_threshold", a.solarize_threshold);
  return a;
}

}  // namespace detail

/**
 * Parses a run config. Missing keys take the defaults of RunConfig{}; keys
 * that do not exist there are rejected, as are type mismatches.
 */
inline RunConfig run_config_from_json(const nlohmann::json& given) {
  const ordered_json defaults = to_json(RunConfig{});
  detail::check_keys(given, defaults, "");
  nlohmann::json j = defaults;
  j.merge_patch(given);
  RunConfig r;
  try {
    using detail::read;
    read(j, "seed", r.seed);
    read(j.at("output"), "dir", r.out_dir);

    const auto& c = j.at("corpus");
    read(c, "num_videos", r.corpus.num_videos);
    read(c, "num_classes", r.corpus.num_classes);
    read(c, "frames", r.corpus.frames);
    read(c, "height", r.corpus.height);
    read(c, "width", r.corpus.width);
    read(c, "motion_speed", r.corpus.motion_speed);
    read(c, "seed", r.corpus.seed);

    const auto& t = j.at("train");
    TrainConfig& tc = r.train;
    read(t, "batch_size", tc.batch_size);
    read(t, "base_lr", tc.base_lr);
    read(t, "momentum", tc.momentum);
    read(t, "weight_decay", tc.weight_decay);
    read(t, "trust_coefficient", tc.trust_coefficient);
    read(t, "gamma", tc.gamma);
    read(t, "speed_set", tc.speed_set);
    read(t, "fixed_speed_pair", tc.fixed_speed_pair);
    read(t, "epochs", tc.epochs);
    read(t, "max_steps", tc.max_steps);
    tc.instance_mode = instance_mode_from_string(t.at("instance_mode").get<std::string>());
    tc.scp_mode = scp_mode_from_string(t.at("scp_mode").get<std::string>());
    read(t, "bank_capacity", tc.bank_capacity);
    read(t, "stop_gradient", tc.stop_gradient);
    read(t, "symmetric", tc.symmetric);
    read(t, "checkpoint_every", tc.checkpoint_every);
    read(t, "log_wall_time", tc.log_wall_time);
    tc.seed = r.seed;
    tc.augment = detail::augment_from_json(j.at("augment"));
    tc.encoder = encoder_config_from_json(j.at("encoder"));

    const auto& e = j.at("eval");
    read(e, "probe_epochs", r.eval.probe_epochs);
    read(e, "probe_lr", r.eval.probe_lr);
    read(e, "probe_batch", r.eval.probe_batch);
    read(e, "speed_clips_per_speed", r.eval.speed_clips_per_speed);
    read(e, "finetune_epochs", r.eval.finetune_epochs);
    read(e, "finetune_lr", r.eval.finetune_lr);
    read(e, "finetune_batch", r.eval.finetune_batch);
  } catch (const nlohmann::json::exception& ex) {
    throw ConfigError(std::string("bad config value: ") + ex.what());
  }
  r.corpus.validate();
  r.train.validate();
  if (r.eval.probe_epochs == 0 || r.eval.probe_batch == 0 || r.eval.finetune_batch == 0)
    throw ConfigError("eval epochs and batch sizes must be positive");
  return r;
}

inline RunConfig load_run_config(const fs::path& path) {
  std::vector<char> bytes;
  try {
    bytes = io::read_file(path);
  } catch (const IoError&) {
    throw IoError("cannot read config file '" + path.string() + "'");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

// ---------------------------------------------------------------------------
// Shared helpers
// ---------------------------------------------------------------------------

struct Options {
  fs::path config;
  std::optional<fs::path> out;
  std::optional<std::uint64_t> seed;
  std::optional<fs::path> resume;
  std::optional<std::string> ckpt;  // path, or "init" for untrained step-0 weights
  std::string task;
  std::string axis;
};

inline const std::vector<std::string> kTasks{"retrieval", "probe", "finetune", "speed", "collapse"};
inline const std::vector<std::string> kAxes{"instance_mode", "speed_set", "augmentation"};

inline std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + v[i];
  return s;
}

inline void write_text(const fs::path& path, const std::string& text) {
  io::write_file_if_changed(path, std::vector<char>(text.begin(), text.end()));
}

inline void make_dirs(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError("cannot create directory '" + dir.string() + "'");
}

/// Loads the config, applies --out / --seed, and echoes the result.
inline RunConfig resolve(const Options& opt) {
  RunConfig cfg = load_run_config(opt.config);
  if (opt.out) cfg.out_dir = opt.out->string();
  if (opt.seed) {
    cfg.seed = *opt.seed;
    cfg.train.seed = *opt.seed;
  }
  make_dirs(cfg.out_dir);
  write_text(fs::path(cfg.out_dir) / "resolved_config.json", to_json(cfg).dump(2) + "\n");
  return cfg;
}

inline fs::path corpus_dir(const RunConfig& cfg) { return fs::path(cfg.out_dir) / "corpus"; }

/// Manifest a config would produce, computed without rendering pixels.
inline ordered_json expected_manifest(const CorpusConfig& cfg) {
  Corpus c{cfg, std::vector<SyntheticVideo>(cfg.num_videos)};
  for (std::size_t i = 0; i < cfg.num_videos; ++i) c.videos[i].params = corpus_video_params(cfg, i);
  return corpus_manifest(c);
}

/// Reuses the corpus in <out>/corpus when it matches the config, otherwise
/// generates and saves it. A mismatching corpus on disk is an error.
inline Corpus ensure_corpus(const RunConfig& cfg, std::size_t required_span) {
  const fs::path dir = corpus_dir(cfg);
  if (fs::exists(dir / "manifest.json")) {
    Corpus c = load_corpus(dir, required_span);
    if (corpus_manifest(c) != expected_manifest(cfg.corpus))
      throw ConfigError("corpus in '" + dir.string() + "' does not match the config");
    c.config = cfg.corpus;
    return c;
  }
  Corpus c = build_corpus(cfg.corpus, required_span);
  save_corpus(c, dir);
  return c;
}

inline ModelParams load_model(const RunConfig& cfg, const Options& opt) {
  const std::string which = opt.ckpt.value_or((fs::path(cfg.out_dir) / "pretrain" / "final.ckpt").string());
  if (which == "init") return init_params(cfg.train.encoder, model_init_seed(cfg.seed));
  const Checkpoint ck = Checkpoint::load(which);
  const auto* train = ck.config.contains("train") ? &ck.config["train"] : nullptr;
  if (!train || !train->contains("encoder")) throw IoError("checkpoint '" + which + "' has no encoder config");
  return model_from_checkpoint(ck, encoder_config_from_json((*train)["encoder"]));
}

inline std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

inline double tail_mean(const std::vector<StepRecord>& log, std::size_t n) {
  if (log.empty()) return 0.0;
  const std::size_t from = log.size() > n ? log.size() - n : 0;
  double s = 0.0;
  for (std::size_t i = from; i < log.size(); ++i) s += log[i].losses.total;
  return s / static_cast<double>(log.size() - from);
}

// ---------------------------------------------------------------------------
// Evaluation tasks
// ---------------------------------------------------------------------------

inline const std::vector<FeatureSpace> kSpaces{FeatureSpace::encoder, FeatureSpace::appearance, FeatureSpace::speed};

/// Video-level retrieval: 20% of videos query the remaining 80%.
inline RetrievalReport retrieval_report(const Corpus& corpus, ModelParams& params, FeatureSpace space,
                                        std::uint64_t seed) {
  const auto features = extract_features(corpus, params, space);
  const Split split = split_indices(features.size(), seed);
  return topk_retrieval(gather(features, split.test), gather(features, split.train));
}

struct Report {
  ordered_json json;
  std::string table;
};

inline Report eval_retrieval(const Corpus& corpus, ModelParams& params, const RunConfig& cfg) {
  Report r;
  r.json["task"] = "retrieval";
  std::ostringstream t;
  t << std::left << std::setw(12) << "features";
  for (std::size_t k : kRetrievalKs) t << std::setw(9) << ("top-" + std::to_string(k));
  t << '\n';
  for (FeatureSpace s : kSpaces) {
    const RetrievalReport rep = retrieval_report(corpus, params, s, cfg.seed);
    r.json["spaces"][to_string(s)] = to_json(rep);
    t << std::setw(12) << to_string(s);
    for (double a : rep.accuracy) t << std::setw(9) << fmt(100.0 * a, 2);
    t << '\n';
  }
  r.table = t.str();
  return r;
}

inline Report eval_probe(const Corpus& corpus, ModelParams& params, const RunConfig& cfg) {
  Report r;
  r.json["task"] = "probe";
  std::ostringstream t;
  t << std::left << std::setw(12) << "features" << "accuracy\n";
  for (FeatureSpace s : {FeatureSpace::encoder, FeatureSpace::appearance}) {
    const ProbeResult p = appearance_probe(corpus, extract_features(corpus, params, s), cfg.probe_config(), cfg.seed);
    r.json["spaces"][to_string(s)] = to_json(p);
    t << std::setw(12) << to_string(s) << fmt(100.0 * p.accuracy, 2) << '\n';
  }
  r.table = t.str();
  return r;
}

inline Report eval_finetune(const Corpus& corpus, ModelParams& params, const RunConfig& cfg) {
  const FinetuneResult f = finetune(corpus, params, cfg.finetune_config());
  Report r;
  r.json["task"] = "finetune";
  r.json["accuracy"] = f.accuracy;
  r.json["test_count"] = f.test_count;
  r.table = "finetune accuracy " + fmt(100.0 * f.accuracy, 2) + "\n";
  return r;
}

inline Report eval_speed(const Corpus& corpus, ModelParams& params, const RunConfig& cfg) {
  const ProbeResult p = speed_probe(params, corpus, cfg.train.speed_set, cfg.speed_probe_config());
  Report r;
  r.json["task"] = "speed";
  r.json["speed_set"] = cfg.train.speed_set;
  r.json["probe"] = to_json(p);
  r.table = "speed probe accuracy " + fmt(100.0 * p.accuracy, 2) + " (chance " +
            fmt(100.0 / static_cast<double>(cfg.train.speed_set.size()), 2) + ")\n";
  return r;
}

inline Report eval_collapse(const Corpus& corpus, ModelParams& params, const RunConfig&) {
  Report r;
  r.json["task"] = "collapse";
  std::ostringstream t;
  t << std::left << std::setw(12) << "features" << std::setw(12) << "mean_std" << "mean_cosine\n";
  for (FeatureSpace s : {FeatureSpace::appearance, FeatureSpace::speed}) {
    std::vector<std::vector<float>> rows;
    for (const auto& f : extract_features(corpus, params, s)) rows.push_back(f.vector);
    const CollapseMetrics m = collapse_metrics(rows);
    r.json["spaces"][to_string(s)] = to_json(m);
    t << std::setw(12) << to_string(s) << std::setw(12) << fmt(m.mean_std, 6) << fmt(m.mean_cosine, 4) << '\n';
  }
  r.table = t.str();
  return r;
}

inline Report run_task(const std::string& task, const Corpus& corpus, ModelParams& params, const RunConfig& cfg) {
  if (task == "retrieval") return eval_retrieval(corpus, params, cfg);
  if (task == "probe") return eval_probe(corpus, params, cfg);
  if (task == "finetune") return eval_finetune(corpus, params, cfg);
  if (task == "speed") return eval_speed(corpus, params, cfg);
  if (task == "collapse") return eval_collapse(corpus, params, cfg);
  throw ConfigError("unknown task '" + task + "'; valid tasks: " + join(kTasks));
}

// ---------------------------------------------------------------------------
// Ablation axes
// ---------------------------------------------------------------------------

struct Variant {
  std::string name;
  TrainConfig train;
};

inline std::vector<Variant> ablation_variants(const std::string& axis, const TrainConfig& base) {
  std::vector<Variant> out;
  if (axis == "instance_mode") {
    for (InstanceMode m : {InstanceMode::same, InstanceMode::different, InstanceMode::similar}) {
      Variant v{to_string(m), base};
      v.train.instance_mode = m;
      out.push_back(v);
    }
  } else if (axis == "speed_set") {
    const std::vector<std::pair<std::string, std::vector<SpeedClass>>> sets{
        {"1x_2x", {1, 2}}, {"1x_1x", {1, 1}}, {"1x_4x", {1, 4}}, {"4x_8x", {4, 8}}};
    for (const auto& [name, speeds] : sets) {
      Variant v{name, base};
      v.train.speed_set = speeds;
      v.train.encoder.num_speeds = speeds.size();
      out.push_back(v);
    }
  } else if (axis == "augmentation") {
    // Color transforms added one at a time; the spatial crop stays on throughout.
    const char* names[] = {"color_jitter", "+gaussian_blur", "+grayscale", "+solarization"};
    for (int level = 0; level < 4; ++level) {
      Variant v{names[level], base};
      AugmentConfig& a = v.train.augment;
      a.jitter_enabled = true;
      a.blur_enabled = level >= 1;
      a.grayscale_enabled = level >= 2;
      a.solarize_enabled = level >= 3;
      out.push_back(v);
    }
  } else {
    throw ConfigError("unknown axis '" + axis + "'; valid axes: " + join(kAxes));
  }
  return out;
}

inline const std::vector<std::string> kAblationColumns{"final_loss",      "final_feat_std", "retrieval_top1",
                                                        "retrieval_top5", "probe_accuracy", "speed_probe_accuracy"};

inline ordered_json ablation_row(const Corpus& corpus, const Variant& v, const RunConfig& cfg, const fs::path& dir) {
  const TrainResult tr = train(corpus, v.train, dir);
  ModelParams params = model_from_checkpoint(Checkpoint::load(tr.final_checkpoint), v.train.encoder);
  const RetrievalReport ret = retrieval_report(corpus, params, FeatureSpace::appearance, cfg.seed);
  const ProbeResult probe =
      appearance_probe(corpus, extract_features(corpus, params, FeatureSpace::encoder), cfg.probe_config(), cfg.seed);
  const ProbeResult speed = speed_probe(params, corpus, v.train.speed_set, cfg.speed_probe_config());
  ordered_json row;
  row["config"] = v.name;
  row["final_loss"] = tail_mean(tr.log, 100);
  row["final_feat_std"] = tr.log.empty() ? 0.0 : tr.log.back().feat_std;
  row["retrieval_top1"] = ret.at(1);
  row["retrieval_top5"] = ret.at(5);
  row["probe_accuracy"] = probe.accuracy;
  row["speed_probe_accuracy"] = speed.accuracy;
  return row;
}

inline Report ablation_report(const std::string& axis, const std::vector<ordered_json>& rows) {
  Report r;
  r.json["axis"] = axis;
  r.json["columns"] = kAblationColumns;
  r.json["rows"] = rows;
  std::vector<std::pair<double, std::string>> order;
  for (const auto& row : rows) order.emplace_back(row["retrieval_top1"].get<double>(), row["config"].get<std::string>());
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [acc, name] : order) r.json["diagnostic_order_by_retrieval_top1"].push_back(name);

  std::ostringstream t;
  t << std::left << std::setw(16) << "config";
  for (const auto& c : kAblationColumns) t << std::setw(22) << c;
  t << '\n';
  for (const auto& row : rows) {
    t << std::setw(16) << row["config"].get<std::string>();
    for (const auto& c : kAblationColumns) t << std::setw(22) << fmt(row[c].get<double>(), 4);
    t << '\n';
  }
  r.table = t.str();
  return r;
}

// ---------------------------------------------------------------------------
// Commands
// ---------------------------------------------------------------------------

inline int cmd_gen_data(const Options& opt, std::ostream& out) {
  const RunConfig cfg = resolve(opt);
  const Corpus c = ensure_corpus(cfg, cfg.train.required_span());
  out << "corpus: " << c.size() << " videos, " << cfg.corpus.num_classes << " classes -> "
      << corpus_dir(cfg).string() << '\n';
  return 0;
}

inline int cmd_pretrain(const Options& opt, std::ostream& out) {
  const RunConfig cfg = resolve(opt);
  const Corpus corpus = ensure_corpus(cfg, cfg.train.required_span());
  const fs::path dir = fs::path(cfg.out_dir) / "pretrain";
  const TrainResult tr = train(corpus, cfg.train, dir, opt.resume);
  out << "pretrain: " << tr.log.size() << " steps, final 100-step mean loss " << fmt(tail_mean(tr.log, 100), 6)
      << " -> " << tr.final_checkpoint.string() << '\n';
  return 0;
}

inline int cmd_eval(const Options& opt, std::ostream& out) {
  if (std::find(kTasks.begin(), kTasks.end(), opt.task) == kTasks.end())
    throw ConfigError("unknown task '" + opt.task + "'; valid tasks: " + join(kTasks));
  const RunConfig cfg = resolve(opt);
  ModelParams params = load_model(cfg, opt);
  const Corpus corpus = ensure_corpus(cfg, cfg.train.required_span());
  Report r = run_task(opt.task, corpus, params, cfg);
  r.json["checkpoint"] = opt.ckpt.value_or("final");
  const fs::path dir = fs::path(cfg.out_dir) / "eval";
  make_dirs(dir);
  write_text(dir / (opt.task + ".json"), r.json.dump(2) + "\n");
  write_text(dir / (opt.task + ".txt"), r.table);
  out << r.table;
  return 0;
}

inline int cmd_ablate(const Options& opt, std::ostream& out) {
  if (std::find(kAxes.begin(), kAxes.end(), opt.axis) == kAxes.end())
    throw ConfigError("unknown axis '" + opt.axis + "'; valid axes: " + join(kAxes));
  const RunConfig cfg = resolve(opt);
  const auto variants = ablation_variants(opt.axis, cfg.train);
  std::size_t span = 0;
  for (const auto& v : variants) {
    v.train.validate();
    span = std::max(span, v.train.required_span());
  }
  const Corpus corpus = ensure_corpus(cfg, span);
  const fs::path dir = fs::path(cfg.out_dir) / "ablate" / opt.axis;
  std::vector<ordered_json> rows;
  for (const auto& v : variants) {
    out << "ablate " << opt.axis << ": " << v.name << '\n' << std::flush;
    rows.push_back(ablation_row(corpus, v, cfg, dir / v.name));
  }
  const Report r = ablation_report(opt.axis, rows);
  write_text(dir / "report.json", r.json.dump(2) + "\n");
  write_text(dir / "report.txt", r.table);
  out << r.table;
  return 0;
}

/// Full command line; returns the process exit code. args excludes argv[0].
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"appearance/speed consistency pretraining on a synthetic video corpus", "ascnet"};
  app.require_subcommand(1);
  Options opt;
  std::string out_dir, resume, ckpt;
  std::uint64_t seed = 0;

  auto common = [&](CLI::App* sub) {
    sub->add_option("config", opt.config, "run config (JSON)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "run seed (overrides seed)");
  };
  CLI::App* gen = app.add_subcommand("gen-data", "generate the synthetic corpus");
  common(gen);
  CLI::App* pre = app.add_subcommand("pretrain", "run pretraining");
  common(pre);
  pre->add_option("--resume", resume, "checkpoint to resume from");
  CLI::App* ev = app.add_subcommand("eval", "evaluate a checkpoint");
  common(ev);
  ev->add_option("--ckpt", ckpt, "checkpoint path, or 'init' for untrained weights");
  ev->add_option("--task", opt.task, "one of: " + join(kTasks))->required();
  CLI::App* ab = app.add_subcommand("ablate", "run an ablation sweep");
  common(ab);
  ab->add_option("--axis", opt.axis, "one of: " + join(kAxes))->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--out")) opt.out = out_dir;
  if (sub->count("--seed")) opt.seed = seed;
  if (sub->get_name() == "pretrain" && sub->count("--resume")) opt.resume = resume;
  if (sub->get_name() == "eval" && sub->count("--ckpt")) opt.ckpt = ckpt;

  try {
    if (sub->get_name() == "gen-data") return cmd_gen_data(opt, out);
    if (sub->get_name() == "pretrain") return cmd_pretrain(opt, out);
    if (sub->get_name() == "eval") return cmd_eval(opt, out);
    return cmd_ablate(opt, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace ascnet::cli

#endif  // ASCNET_CLI_HPP_
