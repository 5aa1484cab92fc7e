#ifndef ASCNET_PRETRAINER_HPP_
#define ASCNET_PRETRAINER_HPP_

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "ascnet/checkpoint.hpp"
#include "ascnet/corpus.hpp"
#include "ascnet/errors.hpp"
#include "ascnet/graph.hpp"
#include "ascnet/lars.hpp"
#include "ascnet/model.hpp"
#include "ascnet/objectives.hpp"
#include "ascnet/parallel.hpp"
#include "ascnet/random.hpp"
#include "ascnet/synthcorpus.hpp"

namespace ascnet {

enum class InstanceMode { same, different, similar };
enum class ScpMode { scp, sp };

inline std::string to_string(InstanceMode m) {
  switch (m) {
    case InstanceMode::same: return "same";
    case InstanceMode::different: return "different";
    default: return "similar";
  }
}
inline InstanceMode instance_mode_from_string(const std::string& s) {
  if (s == "same") return InstanceMode::same;
  if (s == "different") return InstanceMode::different;
  if (s == "similar") return InstanceMode::similar;
  throw ConfigError("unknown instance_mode '" + s + "' (same|different|similar)");
}
inline std::string to_string(ScpMode m) { return m == ScpMode::scp ? "scp" : "sp"; }
inline ScpMode scp_mode_from_string(const std::string& s) {
  if (s == "scp") return ScpMode::scp;
  if (s == "sp") return ScpMode::sp;
  throw ConfigError("unknown scp_mode '" + s + "' (scp|sp)");
}

struct TrainConfig {
  std::size_t batch_size = 16;
  double base_lr = 0.3;
  double momentum = 0.9;
  double weight_decay = 1e-6;
  double trust_coefficient = 0.001;
  double gamma = 0.5;
  std::vector<SpeedClass> speed_set{4, 8};
  bool fixed_speed_pair = false;  // s_i = speed_set[0], s_j = speed_set[1]
  std::size_t epochs = 1;
  std::size_t max_steps = 0;  // > 0 overrides epochs
  InstanceMode instance_mode = InstanceMode::similar;
  ScpMode scp_mode = ScpMode::scp;
  std::size_t bank_capacity = 512;
  std::uint64_t seed = 0;
  bool stop_gradient = true;
  bool symmetric = false;
  std::size_t checkpoint_every = 0;
  bool log_wall_time = false;
  AugmentConfig augment;
  EncoderConfig encoder;

  double learning_rate() const { return scaled_lr(base_lr, batch_size); }

  std::size_t speed_index(SpeedClass s) const {
    const auto it = std::find(speed_set.begin(), speed_set.end(), s);
    if (it == speed_set.end()) throw LabelError("speed " + std::to_string(s) + " not in speed set");
    return static_cast<std::size_t>(it - speed_set.begin());
  }

  SpeedClass max_speed() const { return *std::max_element(speed_set.begin(), speed_set.end()); }

  /// Frames a video must have for every clip this config samples.
  std::size_t required_span() const { return max_speed() * encoder.clip_frames; }

  void validate() const {
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    check_gamma(gamma);
    if (speed_set.empty()) throw ConfigError("speed_set must not be empty");
    for (SpeedClass s : speed_set)
      if (!is_valid_speed(s)) throw ConfigError("speed " + std::to_string(s) + " not in {1,2,4,8}");
    if (fixed_speed_pair && speed_set.size() != 2) throw ConfigError("fixed_speed_pair needs exactly two speeds");
    if (bank_capacity == 0) throw ConfigError("bank_capacity must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0,1)");
    if (!(base_lr > 0.0)) throw ConfigError("base_lr must be positive");
    if (encoder.num_speeds != speed_set.size())
      throw ConfigError("encoder.num_speeds must equal the speed set size");
    encoder.validate();
    augment.validate();
  }
};

inline nlohmann::ordered_json to_json(const AugmentConfig& a) {
  return {{"out_height", a.out_height},       {"out_width", a.out_width},
          {"crop_enabled", a.crop_enabled},   {"crop_scale_min", a.crop_scale_min},
          {"crop_scale_max", a.crop_scale_max}, {"crop_ratio_min", a.crop_ratio_min},
          {"crop_ratio_max", a.crop_ratio_max}, {"jitter_enabled", a.jitter_enabled},
          {"jitter_prob", a.jitter_prob},     {"brightness", a.brightness},
          {"contrast", a.contrast},           {"saturation", a.saturation},
          {"blur_enabled", a.blur_enabled},   {"blur_prob", a.blur_prob},
          {"blur_sigma_min", a.blur_sigma_min}, {"blur_sigma_max", a.blur_sigma_max},
          {"grayscale_enabled", a.grayscale_enabled}, {"grayscale_prob", a.grayscale_prob},
          {"solarize_enabled", a.solarize_enabled}, {"solarize_prob", a.solarize_prob},
          {"solarize_threshold", a.solarize_threshold}};
}

inline nlohmann::ordered_json to_json(const TrainConfig& c) {
  nlohmann::ordered_json j;
  j["batch_size"] = c.batch_size;
  j["base_lr"] = c.base_lr;
  j["momentum"] = c.momentum;
  j["weight_decay"] = c.weight_decay;
  j["trust_coefficient"] = c.trust_coefficient;
  j["gamma"] = c.gamma;
  j["speed_set"] = c.speed_set;
  j["fixed_speed_pair"] = c.fixed_speed_pair;
  j["epochs"] = c.epochs;
  j["max_steps"] = c.max_steps;
  j["instance_mode"] = to_string(c.instance_mode);
  j["scp_mode"] = to_string(c.scp_mode);
  j["bank_capacity"] = c.bank_capacity;
  j["seed"] = c.seed;
  j["stop_gradient"] = c.stop_gradient;
  j["symmetric"] = c.symmetric;
  j["checkpoint_every"] = c.checkpoint_every;
  j["log_wall_time"] = c.log_wall_time;
  j["augment"] = to_json(c.augment);
  j["encoder"] = to_json(c.encoder);
  return j;
}

struct StepRecord {
  std::size_t step = 0;
  LossBreakdown losses;
  double lr = 0.0;
  double feat_std = 0.0;  // mean over dims of the per-dim batch std of a_i
  double ms = 0.0;
};

inline std::string to_jsonl(const StepRecord& r) {
  nlohmann::ordered_json j;
  j["step"] = r.step;
  j["l_a"] = r.losses.l_a;
  j["l_m"] = r.losses.l_m;
  j["l_sp"] = r.losses.l_sp ? nlohmann::ordered_json(*r.losses.l_sp) : nlohmann::ordered_json(nullptr);
  j["total"] = r.losses.total;
  j["lr"] = r.lr;
  j["feat_std"] = r.feat_std;
  j["ms"] = r.ms;
  return j.dump();
}

inline StepRecord step_record_from_json(const nlohmann::json& j) {
  StepRecord r;
  r.step = j.at("step").get<std::size_t>();
  r.losses.l_a = j.at("l_a").get<double>();
  r.losses.l_m = j.at("l_m").get<double>();
  if (!j.at("l_sp").is_null()) r.losses.l_sp = j.at("l_sp").get<double>();
  r.losses.total = j.at("total").get<double>();
  r.lr = j.at("lr").get<double>();
  r.feat_std = j.at("feat_std").get<double>();
  r.ms = j.at("ms").get<double>();
  return r;
}

/// Mean over columns of the population std of each column of a [N,D] block.
inline double mean_feature_std(std::span<const float> rows, std::size_t n, std::size_t d) {
  if (n < 2) return 0.0;
  double total = 0.0;
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += rows[r * d + c];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t r = 0; r < n; ++r) var += (rows[r * d + c] - mean) * (rows[r * d + c] - mean);
    total += std::sqrt(var / static_cast<double>(n));
  }
  return total / static_cast<double>(d);
}

/// Seed of the step-0 parameters for a run seed.
inline std::uint64_t model_init_seed(std::uint64_t run_seed) { return derive_seed(run_seed, {0xC0FFEE}); }

/// Nodes of the appearance half of a training step.
struct AppearanceBranch {
  Var x_i, x_j;  // encoder features of c_i, c_j
  Var a_i, a_j;  // appearance projections
  Var l_a;
};

/**
 * c_i and c_j stacked as [2b,3,T,H,W] (rows 0..b are c_i). Encodes both with
 * the shared encoder, projects with the appearance head, predicts from a_i
 * and scores it against a_j (detached when stop_gradient). The symmetric variant
 * averages in the j -> i direction.
 */
template <typename T>
AppearanceBranch appearance_branch(BasicGraph<T>& g, BasicModelParams<T>& params, BasicTensor<T> clips_ij,
                                   bool stop_gradient, bool symmetric) {
  const std::size_t b = clips_ij.dim(0) / 2;
  auto target = [&](Var v) { return stop_gradient ? g.detach(v) : v; };
  AppearanceBranch br;
  const Var x_ij = encode(g, g.input(std::move(clips_ij)), params);
  br.x_i = g.slice_rows(x_ij, 0, b);
  br.x_j = g.slice_rows(x_ij, b, 2 * b);
  br.a_i = project(g, br.x_i, Head::appearance, params);
  br.a_j = project(g, br.x_j, Head::appearance, params);
  br.l_a = acp_loss(g, predict(g, br.a_i, Head::appearance, params), target(br.a_j));
  if (symmetric) {
    const Var back = acp_loss(g, predict(g, br.a_j, Head::appearance, params), target(br.a_i));
    br.l_a = g.scale(g.add(br.l_a, back), T(0.5));
  }
  return br;
}

/// Speed half: m_i and m_k from the speed head, loss of the predicted m_i against m_k.
template <typename T>
Var speed_consistency_branch(BasicGraph<T>& g, BasicModelParams<T>& params, Var x_i, BasicTensor<T> clips_k,
                             bool stop_gradient, bool symmetric) {
  auto target = [&](Var v) { return stop_gradient ? g.detach(v) : v; };
  const Var x_k = encode(g, g.input(std::move(clips_k)), params);
  const Var m_i = project(g, x_i, Head::speed, params);
  const Var m_k = project(g, x_k, Head::speed, params);
  Var loss = scp_loss(g, predict(g, m_i, Head::speed, params), target(m_k));
  if (symmetric) {
    const Var back = scp_loss(g, predict(g, m_k, Head::speed, params), target(m_i));
    loss = g.scale(g.add(loss, back), T(0.5));
  }
  return loss;
}

/**
 * Appearance/speed consistency pretraining.
 *
 * Randomness is counter-based: every draw for item `i` of step `s` comes from
 * derive_seed(seed, {s, i, ...}), so a run is a pure function of (seed,
 * config, corpus) and resuming only needs the step counter.
 */
class Pretrainer {
 public:
  Pretrainer(const Corpus& corpus, TrainConfig config)
      : corpus_(&corpus),
        config_(std::move(config)),
        params_(init_params((config_.validate(), config_.encoder), model_init_seed(config_.seed))),
        bank_(config_.bank_capacity, config_.encoder.projection_dim) {
    if (corpus.size() < 2) throw ConfigError("pretraining needs at least 2 videos");
    if (config_.batch_size > corpus.size()) throw ConfigError("batch_size exceeds corpus size");
    for (const auto& v : corpus.videos)
      if (v.length() < config_.required_span())
        throw ConfigError("video " + std::to_string(v.id()) + " too short for the configured clips");
  }

  const TrainConfig& config() const { return config_; }
  ModelParams& params() { return params_; }
  const ModelParams& params() const { return params_; }
  const MemoryBank& bank() const { return bank_; }
  std::size_t step_index() const { return step_; }

  std::size_t steps_per_epoch() const { return std::max<std::size_t>(1, corpus_->size() / config_.batch_size); }

  std::size_t total_steps() const {
    return config_.max_steps > 0 ? config_.max_steps : config_.epochs * steps_per_epoch();
  }

  /// Corpus indices of the videos in batch `step` (seeded shuffle per epoch).
  std::vector<std::size_t> batch_indices(std::size_t step) const {
    const std::size_t spe = steps_per_epoch();
    const std::size_t epoch = step / spe, pos = step % spe;
    std::vector<std::size_t> perm(corpus_->size());
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(derive_seed(config_.seed, {0xE90C, epoch}));
    std::shuffle(perm.begin(), perm.end(), rng);
    return {perm.begin() + pos * config_.batch_size, perm.begin() + (pos + 1) * config_.batch_size};
  }

  /// One iteration of the training loop on the given videos.
  StepRecord train_step(const std::vector<std::size_t>& batch) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::size_t b = batch.size();
    const std::size_t n_frames = config_.encoder.clip_frames;

    // Speeds, starts and augmentation seeds for c_i and c_j.
    std::vector<SpeedClass> s_i(b), s_j(b);
    std::vector<VideoClip> clips_ij(2 * b);
    for (std::size_t n = 0; n < b; ++n) {
      Rng rng(item_seed(n, 0));
      if (config_.fixed_speed_pair) {
        s_i[n] = config_.speed_set[0];
        s_j[n] = config_.speed_set[1];
      } else {
        s_i[n] = config_.speed_set[uniform_index(rng, config_.speed_set.size())];
        s_j[n] = config_.speed_set[uniform_index(rng, config_.speed_set.size())];
      }
    }
    parallel_for(2 * b, [&](std::size_t k) {
      const std::size_t n = k % b;
      const bool is_j = k >= b;
      clips_ij[k] = make_clip(video(batch[n]), is_j ? s_j[n] : s_i[n], n_frames, item_seed(n, is_j ? 2 : 1));
    });

    Graph g;
    const AppearanceBranch app = appearance_branch(g, params_, clips_to_tensor(clips_ij), config_.stop_gradient,
                                                   config_.symmetric);
    const std::size_t P = config_.encoder.projection_dim;
    const std::vector<float> a_j_values = g.value(app.a_j).values;

    LossBreakdown losses;
    losses.gamma = config_.gamma;
    Var second;
    if (config_.scp_mode == ScpMode::scp) {
      std::vector<std::size_t> partner(b);
      for (std::size_t n = 0; n < b; ++n) {
        const std::span<const float> query(a_j_values.data() + n * P, P);
        partner[n] = choose_partner(batch[n], query, n);
      }
      std::vector<VideoClip> clips_k(b);
      parallel_for(b, [&](std::size_t n) {
        clips_k[n] = make_clip(video(partner[n]), s_i[n], n_frames, item_seed(n, 3));
      });
      second = speed_consistency_branch(g, params_, app.x_i, clips_to_tensor(clips_k), config_.stop_gradient,
                                        config_.symmetric);
      losses.l_m = g.value(second)[0];
    } else {
      std::vector<std::size_t> labels(b);
      for (std::size_t n = 0; n < b; ++n) labels[n] = config_.speed_index(s_i[n]);
      second = sp_loss(g, speed_logits(g, app.x_i, params_), std::move(labels));
      losses.l_sp = g.value(second)[0];
    }
    const Var l_a = app.l_a;
    const Var a_i = app.a_i;

    const Var total = combined_loss(g, l_a, second, static_cast<float>(config_.gamma));
    losses.l_a = g.value(l_a)[0];
    losses.total = g.value(total)[0];
    if (!std::isfinite(losses.total)) throw NumericsError("non-finite loss at step " + std::to_string(step_));

    params_.zero_grad();
    g.backward(total);
    auto tensors = param_pointers();
    const double lr = config_.learning_rate();
    lars_step(tensors, lars_, LarsHyper{lr, config_.momentum, config_.weight_decay, config_.trust_coefficient});

    // Bank writes happen after every read of this step.
    for (std::size_t n = 0; n < b; ++n) {
      FeatureRecord r;
      r.vector.assign(a_j_values.begin() + n * P, a_j_values.begin() + (n + 1) * P);
      r.video_id = video(batch[n]).id();
      r.insert_step = bank_.total_inserts();
      bank_.insert(std::move(r));
    }

    StepRecord rec;
    rec.step = step_;
    rec.losses = losses;
    rec.lr = lr;
    rec.feat_std = mean_feature_std(g.value(a_i).values, b, P);
    if (config_.log_wall_time)
      rec.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    ++step_;
    return rec;
  }

  StepRecord train_step() { return train_step(batch_indices(step_)); }

  // ---- persistence ----

  nlohmann::ordered_json config_echo() const {
    nlohmann::ordered_json j;
    j["train"] = to_json(config_);
    j["corpus"] = {{"num_videos", corpus_->size()},
                   {"num_classes", corpus_->config.num_classes},
                   {"corpus_seed", corpus_->config.seed}};
    return j;
  }

  Checkpoint checkpoint() const {
    Checkpoint ck;
    ck.config = config_echo();
    append_model(ck, params_);
    const auto named = params_.named();
    for (std::size_t i = 0; i < lars_.velocity.size(); ++i)
      ck.blobs.emplace_back("lars/" + named[i].first, Tensor(named[i].second->shape, lars_.velocity[i]));
    ck.meta["step"] = step_;
    ck.meta["rng"] = {{"seed", config_.seed}, {"counter", step_}};
    ck.meta["bank"] = bank_.dump(ck, "bank/");
    return ck;
  }

  /// Restores model, optimizer, bank and step. The checkpoint must come from
  /// the same config and corpus.
  void restore(const Checkpoint& ck) {
    if (ck.config != config_echo()) throw ConfigError("checkpoint was written for a different config or corpus");
    params_ = model_from_checkpoint(ck, config_.encoder);
    const auto named = params_.named();
    lars_.velocity.clear();
    if (ck.find("lars/" + named[0].first)) {
      for (const auto& [name, t] : named) {
        const Tensor* v = ck.find("lars/" + name);
        if (!v || v->shape != t->shape) throw ConfigError("checkpoint optimizer state for " + name + " is missing");
        lars_.velocity.push_back(v->values);
      }
    }
    bank_ = MemoryBank::restore(ck, "bank/", ck.meta.at("bank"));
    step_ = ck.meta.at("step").get<std::size_t>();
  }

 private:
  const SyntheticVideo& video(std::size_t index) const { return corpus_->videos[index]; }

  std::uint64_t item_seed(std::size_t item, std::uint64_t tag) const {
    return derive_seed(config_.seed, {0x57E9, step_, item, tag});
  }

  VideoClip make_clip(const SyntheticVideo& v, SpeedClass speed, std::size_t n_frames, std::uint64_t seed) const {
    Rng rng(seed);
    const std::size_t span = clip_span(n_frames, speed);
    const std::size_t start = uniform_index(rng, v.length() - span + 1);
    VideoClip raw = sample_clip(v, start, speed, n_frames);
    AugmentConfig aug = config_.augment;
    aug.out_height = config_.encoder.clip_height;
    aug.out_width = config_.encoder.clip_width;
    return augment(raw, aug, rng());
  }

  std::size_t random_other(std::size_t self, Rng& rng) const {
    std::size_t k = uniform_index(rng, corpus_->size() - 1);
    return k >= self ? k + 1 : k;
  }

  /// Corpus index of the SCP partner video for batch item n.
  std::size_t choose_partner(std::size_t self, std::span<const float> query, std::size_t n) const {
    Rng rng(item_seed(n, 4));
    switch (config_.instance_mode) {
      case InstanceMode::same: return self;
      case InstanceMode::different: return random_other(self, rng);
      case InstanceMode::similar: {
        const std::int64_t id = video(self).id();
        if (!bank_.full() || !bank_.has_candidate(id)) return random_other(self, rng);
        return index_of(bank_.retrieve_similar(query, id).video_id);
      }
    }
    return self;
  }

  std::size_t index_of(std::int64_t video_id) const {
    if (video_id >= 0 && static_cast<std::size_t>(video_id) < corpus_->size() && video(video_id).id() == video_id)
      return static_cast<std::size_t>(video_id);
    for (std::size_t i = 0; i < corpus_->size(); ++i)
      if (video(i).id() == video_id) return i;
    throw NoCandidateError("retrieved video " + std::to_string(video_id) + " is not in the corpus");
  }

  std::vector<Tensor*> param_pointers() {
    std::vector<Tensor*> out;
    for (auto& [name, t] : params_.named()) out.push_back(t);
    return out;
  }

  const Corpus* corpus_;
  TrainConfig config_;
  ModelParams params_;
  MemoryBank bank_;
  LarsState lars_;
  std::size_t step_ = 0;
};

inline std::string checkpoint_name(std::size_t step) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "ckpt_%08zu.bin", step);
  return buf;
}

struct TrainResult {
  std::filesystem::path final_checkpoint;
  std::vector<StepRecord> log;
};

/**
 * Runs the fixed-length schedule, appending one JSON line per step to
 * <out>/metrics.jsonl (flushed each step). Writes the initial checkpoint,
 * one every checkpoint_every steps, and <out>/final.ckpt.
 *
 * With resume set, state is restored and log lines at or after the resumed
 * step are dropped before continuing, so the finished log matches an
 * uninterrupted run.
 */
inline TrainResult train(const Corpus& corpus, const TrainConfig& config, const std::filesystem::path& out_dir,
                         const std::optional<std::filesystem::path>& resume = std::nullopt,
                         const std::function<void(const StepRecord&)>& on_step = {}) {
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string());
  Pretrainer trainer(corpus, config);
  const auto log_path = out_dir / "metrics.jsonl";

  TrainResult result;
  if (resume) {
    trainer.restore(Checkpoint::load(*resume));
    std::vector<std::string> kept;
    if (std::ifstream in(log_path); in) {
      std::string line;
      while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto rec = step_record_from_json(nlohmann::json::parse(line));
        if (rec.step >= trainer.step_index()) break;
        kept.push_back(line);
        result.log.push_back(rec);
      }
    }
    std::ofstream out(log_path, std::ios::trunc);
    for (const auto& l : kept) out << l << '\n';
  } else {
    std::ofstream(log_path, std::ios::trunc);
    trainer.checkpoint().save(out_dir / checkpoint_name(0));
  }

  std::ofstream log(log_path, std::ios::app);
  if (!log) throw IoError("cannot write " + log_path.string());
  const std::size_t total = trainer.total_steps();
  while (trainer.step_index() < total) {
    StepRecord rec = trainer.train_step();
    log << to_jsonl(rec) << '\n';
    log.flush();
    if (on_step) on_step(rec);
    result.log.push_back(rec);
    if (config.checkpoint_every > 0 && trainer.step_index() % config.checkpoint_every == 0)
      trainer.checkpoint().save(out_dir / checkpoint_name(trainer.step_index()));
  }
  result.final_checkpoint = out_dir / "final.ckpt";
  trainer.checkpoint().save(result.final_checkpoint);
  return result;
}

}  // namespace ascnet

#endif  // ASCNET_PRETRAINER_HPP_
