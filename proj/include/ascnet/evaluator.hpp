#ifndef ASCNET_EVALUATOR_HPP_
#define ASCNET_EVALUATOR_HPP_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "json.hpp"

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

enum class FeatureSpace { encoder, appearance, speed };

inline std::string to_string(FeatureSpace s) {
  switch (s) {
    case FeatureSpace::encoder: return "encoder";
    case FeatureSpace::appearance: return "appearance";
    default: return "speed";
  }
}

struct VideoFeature {
  std::vector<float> vector;
  std::int64_t video_id = 0;
  std::size_t appearance_class = 0;
  bool degenerate = false;  // mean too small to normalize; raw mean kept
};

inline constexpr std::size_t kEvalClips = 10;

/// Feature rows [N, D or P] for a batch of prepared clips.
inline std::vector<std::vector<float>> clip_features(const std::vector<VideoClip>& clips, ModelParams& params,
                                                     FeatureSpace space) {
  Graph g;
  Var out = encode(g, g.input(clips_to_tensor(clips)), params);
  if (space == FeatureSpace::appearance) out = project(g, out, Head::appearance, params);
  if (space == FeatureSpace::speed) out = project(g, out, Head::speed, params);
  const Tensor& t = g.value(out);
  const std::size_t d = t.dim(1);
  std::vector<std::vector<float>> rows(t.dim(0));
  for (std::size_t r = 0; r < rows.size(); ++r) rows[r].assign(t.values.begin() + r * d, t.values.begin() + (r + 1) * d);
  return rows;
}

/**
 * Mean of clip features, re-normalized when its norm is at least 1e-8.
 * Each dimension is summed in sorted order so the result does not depend on
 * clip order.
 */
inline VideoFeature average_clip_features(const std::vector<std::vector<float>>& rows) {
  if (rows.empty()) throw ShapeError("no clip features to average");
  const std::size_t d = rows[0].size();
  VideoFeature f;
  f.vector.resize(d);
  std::vector<float> column(rows.size());
  for (std::size_t c = 0; c < d; ++c) {
    for (std::size_t r = 0; r < rows.size(); ++r) column[r] = rows[r][c];
    std::sort(column.begin(), column.end());
    double acc = 0.0;
    for (float v : column) acc += v;
    f.vector[c] = static_cast<float>(acc / static_cast<double>(rows.size()));
  }
  const double norm = std::sqrt(dot(f.vector, f.vector));
  if (norm >= 1e-8) {
    for (float& v : f.vector) v = static_cast<float>(v / norm);
  } else {
    f.degenerate = true;
  }
  return f;
}

/// Center-cropped, unaugmented speed-1 clips at uniform starts, pooled to one vector.
inline VideoFeature extract_video_feature(const SyntheticVideo& video, ModelParams& params, FeatureSpace space,
                                          std::size_t n_clips = kEvalClips) {
  const EncoderConfig& c = params.config;
  const auto starts = uniform_clip_starts(video.length(), n_clips, clip_span(c.clip_frames, 1));
  std::vector<VideoClip> clips;
  for (std::size_t s : starts) clips.push_back(center_crop(sample_clip(video, s, 1, c.clip_frames), c.clip_height, c.clip_width));
  VideoFeature f = average_clip_features(clip_features(clips, params, space));
  f.video_id = video.id();
  f.appearance_class = video.params.appearance_class;
  return f;
}

inline std::vector<VideoFeature> extract_features(const Corpus& corpus, ModelParams& params, FeatureSpace space) {
  std::vector<VideoFeature> out(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t i) { out[i] = extract_video_feature(corpus[i], params, space); });
  return out;
}

// ---------------------------------------------------------------------------
// Retrieval
// ---------------------------------------------------------------------------

inline const std::vector<std::size_t> kRetrievalKs{1, 5, 10, 20, 50};

struct RetrievalReport {
  std::vector<std::size_t> ks;
  std::vector<double> accuracy;  // parallel to ks
  std::size_t query_count = 0;
  std::size_t gallery_count = 0;

  double at(std::size_t k) const {
    for (std::size_t i = 0; i < ks.size(); ++i)
      if (ks[i] == k) return accuracy[i];
    throw RangeError("k=" + std::to_string(k) + " not in report");
  }

  bool operator==(const RetrievalReport&) const = default;
};

inline nlohmann::ordered_json to_json(const RetrievalReport& r) {
  nlohmann::ordered_json j;
  j["query_count"] = r.query_count;
  j["gallery_count"] = r.gallery_count;
  auto& acc = j["top_k"] = nlohmann::ordered_json::object();
  for (std::size_t i = 0; i < r.ks.size(); ++i) acc[std::to_string(r.ks[i])] = r.accuracy[i];
  return j;
}

/**
 * Nearest-neighbour retrieval by dot product. Gallery items are ranked by
 * (similarity desc, video_id asc); a query hits at k when any of its k
 * nearest items shares its appearance class.
 */
inline RetrievalReport topk_retrieval(const std::vector<VideoFeature>& queries, const std::vector<VideoFeature>& gallery,
                                      const std::vector<std::size_t>& ks = kRetrievalKs) {
  if (gallery.empty()) throw ConfigError("retrieval gallery is empty");
  RetrievalReport report;
  report.ks = ks;
  report.accuracy.assign(ks.size(), 0.0);
  report.query_count = queries.size();
  report.gallery_count = gallery.size();
  if (queries.empty()) return report;

  std::vector<std::size_t> order(gallery.size());
  std::vector<double> sim(gallery.size());
  std::vector<std::size_t> hits(ks.size(), 0);
  for (const VideoFeature& q : queries) {
    for (std::size_t i = 0; i < gallery.size(); ++i) sim[i] = dot(q.vector, gallery[i].vector);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      if (sim[a] != sim[b]) return sim[a] > sim[b];
      return gallery[a].video_id < gallery[b].video_id;
    });
    // Rank of the first same-class item decides every k at once.
    std::size_t first = gallery.size();
    for (std::size_t r = 0; r < order.size(); ++r)
      if (gallery[order[r]].appearance_class == q.appearance_class) {
        first = r;
        break;
      }
    for (std::size_t i = 0; i < ks.size(); ++i)
      if (first < ks[i]) ++hits[i];
  }
  for (std::size_t i = 0; i < ks.size(); ++i)
    report.accuracy[i] = static_cast<double>(hits[i]) / static_cast<double>(queries.size());
  return report;
}

struct Split {
  std::vector<std::size_t> test;   // queries
  std::vector<std::size_t> train;  // gallery
};

/// Seeded shuffle, first round(frac * n) indices become the test/query side.
inline Split split_indices(std::size_t n, std::uint64_t seed, double test_fraction = 0.2) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  Rng rng(derive_seed(seed, {0x5A117}));
  std::shuffle(perm.begin(), perm.end(), rng);
  const std::size_t n_test = std::clamp<std::size_t>(
      static_cast<std::size_t>(std::lround(test_fraction * static_cast<double>(n))), n > 1 ? 1 : 0, n > 1 ? n - 1 : n);
  Split s;
  s.test.assign(perm.begin(), perm.begin() + n_test);
  s.train.assign(perm.begin() + n_test, perm.end());
  std::sort(s.test.begin(), s.test.end());
  std::sort(s.train.begin(), s.train.end());
  return s;
}

template <typename T>
std::vector<T> gather(const std::vector<T>& v, const std::vector<std::size_t>& idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(v[i]);
  return out;
}

// ---------------------------------------------------------------------------
// Linear probe
// ---------------------------------------------------------------------------

struct ProbeConfig {
  std::size_t epochs = 100;
  double base_lr = 0.1;
  double momentum = 0.9;
  std::size_t batch_size = 32;
  std::uint64_t seed = 0;
  bool standardize = true;  // z-score with train statistics before the classifier
};

struct ProbeResult {
  double accuracy = 0.0;
  std::size_t test_count = 0;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted]
};

inline nlohmann::ordered_json to_json(const ProbeResult& r) {
  return {{"accuracy", r.accuracy}, {"test_count", r.test_count}, {"confusion", r.confusion}};
}

/**
 * Softmax-regression classifier on frozen features, minibatch SGD with
 * momentum under the cosine schedule; returns held-out accuracy.
 */
inline ProbeResult linear_probe(const std::vector<std::vector<float>>& train_x, const std::vector<std::size_t>& train_y,
                                const std::vector<std::vector<float>>& test_x, const std::vector<std::size_t>& test_y,
                                std::size_t classes, const ProbeConfig& cfg) {
  if (classes < 2) throw LabelError("probe needs at least 2 classes");
  if (train_x.empty() || train_x.size() != train_y.size() || test_x.size() != test_y.size())
    throw ShapeError("probe features and labels disagree");
  {
    std::vector<bool> seen(classes, false);
    for (std::size_t y : train_y) {
      if (y >= classes) throw LabelError("probe label " + std::to_string(y) + " out of range");
      seen[y] = true;
    }
    for (std::size_t y : test_y)
      if (y >= classes) throw LabelError("probe label " + std::to_string(y) + " out of range");
    if (std::count(seen.begin(), seen.end(), true) < 2) throw LabelError("probe training set holds a single class");
  }
  const std::size_t d = train_x[0].size();

  std::vector<double> mu(d, 0.0), sd(d, 1.0);
  if (cfg.standardize) {
    for (const auto& x : train_x)
      for (std::size_t c = 0; c < d; ++c) mu[c] += x[c];
    for (double& m : mu) m /= static_cast<double>(train_x.size());
    for (std::size_t c = 0; c < d; ++c) {
      double v = 0.0;
      for (const auto& x : train_x) v += (x[c] - mu[c]) * (x[c] - mu[c]);
      sd[c] = std::sqrt(v / static_cast<double>(train_x.size()));
      if (sd[c] < 1e-8) sd[c] = 1.0;
    }
  }
  auto prep = [&](const std::vector<float>& x) {
    std::vector<double> z(d);
    for (std::size_t c = 0; c < d; ++c) z[c] = (x[c] - mu[c]) / sd[c];
    return z;
  };
  std::vector<std::vector<double>> tx, ex;
  for (const auto& x : train_x) tx.push_back(prep(x));
  for (const auto& x : test_x) ex.push_back(prep(x));

  Rng rng(derive_seed(cfg.seed, {0x9809E}));
  const double bound = std::sqrt(1.0 / static_cast<double>(d));
  std::vector<double> W(d * classes), B(classes, 0.0), vW(d * classes, 0.0), vB(classes, 0.0);
  for (double& w : W) w = std::uniform_real_distribution<double>(-bound, bound)(rng);

  auto logits = [&](const std::vector<double>& z, std::vector<double>& out) {
    out.assign(classes, 0.0);
    for (std::size_t k = 0; k < classes; ++k) {
      double acc = B[k];
      for (std::size_t c = 0; c < d; ++c) acc += z[c] * W[c * classes + k];
      out[k] = acc;
    }
  };

  const std::size_t n = tx.size();
  const std::size_t bs = std::max<std::size_t>(1, std::min(cfg.batch_size, n));
  const std::size_t steps_per_epoch = (n + bs - 1) / bs;
  const std::size_t total_steps = cfg.epochs * steps_per_epoch;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> gW(d * classes), gB(classes), lg;
  std::size_t step = 0;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t s = 0; s < n; s += bs, ++step) {
      const std::size_t end = std::min(n, s + bs);
      std::fill(gW.begin(), gW.end(), 0.0);
      std::fill(gB.begin(), gB.end(), 0.0);
      for (std::size_t i = s; i < end; ++i) {
        const auto& z = tx[order[i]];
        logits(z, lg);
        const double mx = *std::max_element(lg.begin(), lg.end());
        double sum = 0.0;
        for (double& v : lg) sum += (v = std::exp(v - mx));
        for (std::size_t k = 0; k < classes; ++k) {
          const double gk = lg[k] / sum - (k == train_y[order[i]] ? 1.0 : 0.0);
          gB[k] += gk;
          for (std::size_t c = 0; c < d; ++c) gW[c * classes + k] += gk * z[c];
        }
      }
      const double lr = cosine_lr(step, total_steps, cfg.base_lr);
      const double inv = 1.0 / static_cast<double>(end - s);
      for (std::size_t i = 0; i < W.size(); ++i) {
        vW[i] = cfg.momentum * vW[i] + gW[i] * inv;
        W[i] -= lr * vW[i];
      }
      for (std::size_t k = 0; k < classes; ++k) {
        vB[k] = cfg.momentum * vB[k] + gB[k] * inv;
        B[k] -= lr * vB[k];
      }
    }
  }

  ProbeResult result;
  result.test_count = ex.size();
  result.confusion.assign(classes, std::vector<std::size_t>(classes, 0));
  std::size_t correct = 0;
  for (std::size_t i = 0; i < ex.size(); ++i) {
    logits(ex[i], lg);
    const std::size_t pred = static_cast<std::size_t>(std::max_element(lg.begin(), lg.end()) - lg.begin());
    ++result.confusion[test_y[i]][pred];
    if (pred == test_y[i]) ++correct;
  }
  result.accuracy = ex.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(ex.size());
  return result;
}

/// Appearance-class probe on frozen video-level features of one space.
inline ProbeResult appearance_probe(const Corpus& corpus, const std::vector<VideoFeature>& features,
                                    const ProbeConfig& cfg, std::uint64_t split_seed) {
  const Split split = split_indices(features.size(), split_seed);
  std::vector<std::vector<float>> trx, tex;
  std::vector<std::size_t> try_, tey;
  for (std::size_t i : split.train) {
    trx.push_back(features[i].vector);
    try_.push_back(features[i].appearance_class);
  }
  for (std::size_t i : split.test) {
    tex.push_back(features[i].vector);
    tey.push_back(features[i].appearance_class);
  }
  return linear_probe(trx, try_, tex, tey, corpus.config.num_classes, cfg);
}

// ---------------------------------------------------------------------------
// Speed probe
// ---------------------------------------------------------------------------

struct SpeedProbeConfig {
  std::size_t clips_per_speed = 4;  // per video
  ProbeConfig probe;
  std::uint64_t seed = 0;
};

/// Unaugmented, center-cropped clips at random starts, labeled by speed index.
struct SpeedSamples {
  std::vector<std::vector<float>> features;
  std::vector<std::size_t> labels;
  std::vector<std::size_t> video_index;
};

inline SpeedSamples speed_samples(ModelParams& params, const Corpus& corpus, const std::vector<SpeedClass>& speed_set,
                                  const SpeedProbeConfig& cfg) {
  const EncoderConfig& c = params.config;
  std::vector<SpeedSamples> per_video(corpus.size());
  parallel_for(corpus.size(), [&](std::size_t v) {
    std::vector<VideoClip> clips;
    std::vector<std::size_t> labels;
    Rng rng(derive_seed(cfg.seed, {0x5BEED, v}));
    for (std::size_t s = 0; s < speed_set.size(); ++s)
      for (std::size_t r = 0; r < cfg.clips_per_speed; ++r) {
        const std::size_t span = clip_span(c.clip_frames, speed_set[s]);
        if (span > corpus[v].length()) throw RangeError("video too short for speed probe");
        const std::size_t start = uniform_index(rng, corpus[v].length() - span + 1);
        clips.push_back(center_crop(sample_clip(corpus[v], start, speed_set[s], c.clip_frames), c.clip_height, c.clip_width));
        labels.push_back(s);
      }
    per_video[v].features = clip_features(clips, params, FeatureSpace::speed);
    per_video[v].labels = labels;
    per_video[v].video_index.assign(labels.size(), v);
  });
  SpeedSamples all;
  for (auto& pv : per_video) {
    all.features.insert(all.features.end(), pv.features.begin(), pv.features.end());
    all.labels.insert(all.labels.end(), pv.labels.begin(), pv.labels.end());
    all.video_index.insert(all.video_index.end(), pv.video_index.begin(), pv.video_index.end());
  }
  return all;
}

/// Linear probe of playback speed on speed-head features; train/test split by video.
inline ProbeResult speed_probe(ModelParams& params, const Corpus& corpus, const std::vector<SpeedClass>& speed_set,
                               const SpeedProbeConfig& cfg) {
  if (speed_set.size() < 2) throw LabelError("speed probe needs at least 2 speeds");
  const SpeedSamples samples = speed_samples(params, corpus, speed_set, cfg);
  const Split split = split_indices(corpus.size(), cfg.seed);
  std::vector<bool> is_test(corpus.size(), false);
  for (std::size_t i : split.test) is_test[i] = true;
  std::vector<std::vector<float>> trx, tex;
  std::vector<std::size_t> try_, tey;
  for (std::size_t i = 0; i < samples.labels.size(); ++i) {
    if (is_test[samples.video_index[i]]) {
      tex.push_back(samples.features[i]);
      tey.push_back(samples.labels[i]);
    } else {
      trx.push_back(samples.features[i]);
      try_.push_back(samples.labels[i]);
    }
  }
  return linear_probe(trx, try_, tex, tey, speed_set.size(), cfg.probe);
}

// ---------------------------------------------------------------------------
// Fine-tuning
// ---------------------------------------------------------------------------

struct FinetuneConfig {
  std::size_t epochs = 10;
  double base_lr = 0.05;
  double momentum = 0.9;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
};

struct FinetuneResult {
  double accuracy = 0.0;
  std::size_t test_count = 0;
};

/**
 * Whole-network training with a freshly initialized linear classifier on the
 * encoder output. The caller's parameters are copied, never modified. Test
 * videos are scored by averaging class probabilities over 10 uniform
 * center-cropped clips.
 */
inline FinetuneResult finetune(const Corpus& corpus, const ModelParams& pretrained, const FinetuneConfig& cfg) {
  ModelParams params = pretrained;
  params.set_requires_grad(true);
  const EncoderConfig& c = params.config;
  const std::size_t classes = corpus.config.num_classes;
  if (classes < 2) throw LabelError("finetune needs at least 2 classes");
  Rng init_rng(derive_seed(cfg.seed, {0xF1E7}));
  Linear classifier = detail::make_linear(c.feature_dim(), classes, init_rng);

  std::vector<Tensor*> tensors;
  for (ConvStage& s : params.encoder) {
    tensors.push_back(&s.kernel);
    tensors.push_back(&s.bias);
  }
  tensors.push_back(&classifier.weight);
  tensors.push_back(&classifier.bias);

  const Split split = split_indices(corpus.size(), cfg.seed);
  const std::size_t n = split.train.size();
  const std::size_t bs = std::max<std::size_t>(1, std::min(cfg.batch_size, n));
  const std::size_t steps_per_epoch = (n + bs - 1) / bs;
  const std::size_t total_steps = cfg.epochs * steps_per_epoch;
  std::vector<std::vector<float>> velocity(tensors.size());
  for (std::size_t i = 0; i < tensors.size(); ++i) velocity[i].assign(tensors[i]->size(), 0.0f);

  std::vector<std::size_t> order = split.train;
  Rng rng(derive_seed(cfg.seed, {0xF1E8}));
  std::size_t step = 0;
  for (std::size_t e = 0; e < cfg.epochs; ++e) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t s = 0; s < n; s += bs, ++step) {
      const std::size_t end = std::min(n, s + bs);
      std::vector<VideoClip> clips;
      std::vector<std::size_t> labels;
      for (std::size_t i = s; i < end; ++i) {
        const SyntheticVideo& v = corpus[order[i]];
        const std::size_t start = uniform_index(rng, v.length() - c.clip_frames + 1);
        clips.push_back(center_crop(sample_clip(v, start, 1, c.clip_frames), c.clip_height, c.clip_width));
        labels.push_back(v.params.appearance_class);
      }
      Graph g;
      const Var x = encode(g, g.input(clips_to_tensor(clips)), params);
      const Var loss = g.softmax_cross_entropy(linear(g, x, classifier), labels);
      for (Tensor* t : tensors) t->zero_grad();
      g.backward(loss);
      const double lr = cosine_lr(step, total_steps, cfg.base_lr);
      for (std::size_t i = 0; i < tensors.size(); ++i) {
        Tensor& t = *tensors[i];
        for (std::size_t k = 0; k < t.size(); ++k) {
          if (!std::isfinite(t.grad[k])) throw NumericsError("non-finite gradient during finetune");
          velocity[i][k] = static_cast<float>(cfg.momentum * velocity[i][k] + t.grad[k]);
          t.values[k] -= static_cast<float>(lr * velocity[i][k]);
        }
      }
    }
  }

  FinetuneResult result;
  result.test_count = split.test.size();
  std::size_t correct = 0;
  for (std::size_t vi : split.test) {
    const SyntheticVideo& v = corpus[vi];
    std::vector<VideoClip> clips;
    for (std::size_t st : uniform_clip_starts(v.length(), kEvalClips, c.clip_frames))
      clips.push_back(center_crop(sample_clip(v, st, 1, c.clip_frames), c.clip_height, c.clip_width));
    Graph g;
    const Tensor& logits = g.value(linear(g, encode(g, g.input(clips_to_tensor(clips)), params), classifier));
    std::vector<double> prob(classes, 0.0);
    for (std::size_t r = 0; r < clips.size(); ++r) {
      const float* row = &logits.values[r * classes];
      const double mx = *std::max_element(row, row + classes);
      double z = 0.0;
      for (std::size_t k = 0; k < classes; ++k) z += std::exp(row[k] - mx);
      for (std::size_t k = 0; k < classes; ++k) prob[k] += std::exp(row[k] - mx) / z;
    }
    const auto pred = static_cast<std::size_t>(std::max_element(prob.begin(), prob.end()) - prob.begin());
    if (pred == v.params.appearance_class) ++correct;
  }
  result.accuracy = split.test.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(split.test.size());
  return result;
}

// ---------------------------------------------------------------------------
// Collapse diagnostics
// ---------------------------------------------------------------------------

struct CollapseMetrics {
  std::vector<double> per_dim_std;
  double mean_std = 0.0;
  double mean_cosine = 0.0;  // over ordered off-diagonal pairs
};

inline nlohmann::ordered_json to_json(const CollapseMetrics& m) {
  return {{"mean_std", m.mean_std}, {"mean_cosine", m.mean_cosine}, {"per_dim_std", m.per_dim_std}};
}

inline CollapseMetrics collapse_metrics(const std::vector<std::vector<float>>& rows) {
  if (rows.size() < 2) throw ShapeError("collapse metrics need at least 2 rows");
  const std::size_t n = rows.size(), d = rows[0].size();
  CollapseMetrics m;
  m.per_dim_std.resize(d);
  for (std::size_t c = 0; c < d; ++c) {
    double mean = 0.0;
    for (const auto& r : rows) mean += r[c];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& r : rows) var += (r[c] - mean) * (r[c] - mean);
    m.per_dim_std[c] = std::sqrt(var / static_cast<double>(n));
    m.mean_std += m.per_dim_std[c];
  }
  m.mean_std /= static_cast<double>(d);
  std::vector<double> norms(n);
  for (std::size_t i = 0; i < n; ++i) norms[i] = std::sqrt(dot(rows[i], rows[i]));
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double denom = norms[i] * norms[j];
      total += denom > 0.0 ? dot(rows[i], rows[j]) / denom : 0.0;
    }
  m.mean_cosine = total / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
  return m;
}

}  // namespace ascnet

#endif  // ASCNET_EVALUATOR_HPP_
