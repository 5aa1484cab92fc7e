#ifndef ASCNET_MODEL_HPP_
#define ASCNET_MODEL_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ascnet/errors.hpp"
#include "ascnet/graph.hpp"
#include "ascnet/random.hpp"
#include "ascnet/tensor.hpp"

namespace ascnet {

using Kernel3 = std::array<std::size_t, 3>;

/**
 * Geometry of the tiny 3D CNN encoder plus head widths.
 *
 * Every stage is conv3d -> relu with valid padding; a global average pool
 * follows the last stage, so the feature width D is the last stage's channel
 * count.
 */
struct EncoderConfig {
  std::size_t clip_frames = 8;
  std::size_t clip_height = 32;
  std::size_t clip_width = 32;
  std::size_t in_channels = 3;
  std::vector<std::size_t> stage_channels{8, 16, 32};
  std::vector<Kernel3> kernels{{3, 3, 3}, {3, 3, 3}, {3, 3, 3}};
  std::vector<Stride3> strides{{1, 2, 2}, {1, 2, 2}, {2, 2, 2}};
  std::size_t projection_dim = 256;
  std::size_t num_speeds = 2;

  std::size_t feature_dim() const { return stage_channels.empty() ? 0 : stage_channels.back(); }

  /// Spatio-temporal extent [T,H,W] after each stage. Throws ConfigError if a
  /// stage would see an input smaller than its kernel.
  std::vector<std::array<std::size_t, 3>> stage_extents() const {
    if (stage_channels.empty()) throw ConfigError("encoder needs at least one stage");
    if (kernels.size() != stage_channels.size() || strides.size() != stage_channels.size())
      throw ConfigError("stage_channels, kernels and strides must have equal length");
    std::array<std::size_t, 3> ext{clip_frames, clip_height, clip_width};
    std::vector<std::array<std::size_t, 3>> out;
    for (std::size_t s = 0; s < stage_channels.size(); ++s) {
      if (stage_channels[s] == 0) throw ConfigError("stage width must be positive");
      for (int d = 0; d < 3; ++d) {
        if (kernels[s][d] == 0 || strides[s][d] == 0) throw ConfigError("kernel and stride must be positive");
        if (kernels[s][d] > ext[d])
          throw ConfigError("stage " + std::to_string(s) + " kernel exceeds its input extent " + std::to_string(ext[d]));
        ext[d] = (ext[d] - kernels[s][d]) / strides[s][d] + 1;
      }
      out.push_back(ext);
    }
    return out;
  }

  void validate() const {
    if (clip_frames == 0 || clip_height == 0 || clip_width == 0 || in_channels == 0)
      throw ConfigError("clip geometry must be positive");
    if (projection_dim == 0) throw ConfigError("projection_dim must be positive");
    if (num_speeds == 0) throw ConfigError("num_speeds must be positive");
    stage_extents();
  }
};

inline nlohmann::ordered_json to_json(const EncoderConfig& c) {
  nlohmann::ordered_json j;
  j["clip_frames"] = c.clip_frames;
  j["clip_height"] = c.clip_height;
  j["clip_width"] = c.clip_width;
  j["in_channels"] = c.in_channels;
  j["stage_channels"] = c.stage_channels;
  j["kernels"] = c.kernels;
  j["strides"] = c.strides;
  j["projection_dim"] = c.projection_dim;
  j["num_speeds"] = c.num_speeds;
  return j;
}

inline EncoderConfig encoder_config_from_json(const nlohmann::json& j) {
  EncoderConfig c;
  c.clip_frames = j.at("clip_frames").get<std::size_t>();
  c.clip_height = j.at("clip_height").get<std::size_t>();
  c.clip_width = j.at("clip_width").get<std::size_t>();
  c.in_channels = j.at("in_channels").get<std::size_t>();
  c.stage_channels = j.at("stage_channels").get<std::vector<std::size_t>>();
  c.kernels = j.at("kernels").get<std::vector<Kernel3>>();
  c.strides = j.at("strides").get<std::vector<Stride3>>();
  c.projection_dim = j.at("projection_dim").get<std::size_t>();
  c.num_speeds = j.at("num_speeds").get<std::size_t>();
  return c;
}

template <typename T>
struct BasicLinear {
  BasicTensor<T> weight;  // [in, out]
  BasicTensor<T> bias;    // [out]
};

template <typename T>
struct BasicConvStage {
  BasicTensor<T> kernel;  // [K, C, t, h, w]
  BasicTensor<T> bias;    // [K]
  Stride3 stride{1, 1, 1};
};

using Linear = BasicLinear<float>;
using ConvStage = BasicConvStage<float>;

enum class Head { appearance, speed };

inline const char* head_name(Head h) { return h == Head::appearance ? "appearance" : "speed"; }

/**
 * All trainable tensors: the encoder, a projection head and a predictor for
 * each of appearance and speed, and the speed classifier used by the speed-prediction baseline.
 * Heads never share storage.
 */
template <typename T>
struct BasicModelParams {
  using TensorT = BasicTensor<T>;
  using LinearT = BasicLinear<T>;

  EncoderConfig config;
  std::vector<BasicConvStage<T>> encoder;
  LinearT proj_appearance;
  LinearT proj_speed;
  LinearT pred_appearance;
  LinearT pred_speed;
  LinearT speed_classifier;

  LinearT& projection(Head h) { return h == Head::appearance ? proj_appearance : proj_speed; }
  LinearT& predictor(Head h) { return h == Head::appearance ? pred_appearance : pred_speed; }

  /// Stable (name, tensor) listing; names key checkpoint blobs.
  std::vector<std::pair<std::string, TensorT*>> named() {
    std::vector<std::pair<std::string, TensorT*>> out;
    for (std::size_t s = 0; s < encoder.size(); ++s) {
      out.emplace_back("encoder." + std::to_string(s) + ".kernel", &encoder[s].kernel);
      out.emplace_back("encoder." + std::to_string(s) + ".bias", &encoder[s].bias);
    }
    auto lin = [&](const std::string& name, LinearT& l) {
      out.emplace_back(name + ".weight", &l.weight);
      out.emplace_back(name + ".bias", &l.bias);
    };
    lin("proj_appearance", proj_appearance);
    lin("proj_speed", proj_speed);
    lin("pred_appearance", pred_appearance);
    lin("pred_speed", pred_speed);
    lin("speed_classifier", speed_classifier);
    return out;
  }

  std::vector<std::pair<std::string, const TensorT*>> named() const {
    auto mut = const_cast<BasicModelParams*>(this)->named();
    return {mut.begin(), mut.end()};
  }

  std::size_t encoder_parameter_count() const {
    std::size_t n = 0;
    for (const auto& s : encoder) n += s.kernel.size() + s.bias.size();
    return n;
  }

  void zero_grad() {
    for (auto& [name, t] : named()) t->zero_grad();
  }

  void set_requires_grad(bool on) {
    for (auto& [name, t] : named()) t->requires_grad = on;
  }
};

using ModelParams = BasicModelParams<float>;
using ModelParams64 = BasicModelParams<double>;

/// Same parameters at another precision (grads dropped).
template <typename To, typename From>
BasicModelParams<To> params_cast(const BasicModelParams<From>& p) {
  BasicModelParams<To> out;
  out.config = p.config;
  for (const auto& s : p.encoder)
    out.encoder.push_back({tensor_cast<To>(s.kernel), tensor_cast<To>(s.bias), s.stride});
  auto lin = [](const BasicLinear<From>& l) { return BasicLinear<To>{tensor_cast<To>(l.weight), tensor_cast<To>(l.bias)}; };
  out.proj_appearance = lin(p.proj_appearance);
  out.proj_speed = lin(p.proj_speed);
  out.pred_appearance = lin(p.pred_appearance);
  out.pred_speed = lin(p.pred_speed);
  out.speed_classifier = lin(p.speed_classifier);
  return out;
}

namespace detail {

/// He-uniform: U(-b, b) with b = sqrt(6 / fan_in), so std = sqrt(2 / fan_in).
inline void fill_fan_in_uniform(Tensor& t, std::size_t fan_in, Rng& rng) {
  const float bound = std::sqrt(6.0f / static_cast<float>(fan_in));
  for (float& v : t.values) v = uniform(rng, -bound, bound);
}

inline Linear make_linear(std::size_t in, std::size_t out, Rng& rng) {
  Linear l{Tensor(Shape{in, out}, 0.0f, true), Tensor(Shape{out}, 0.0f, true)};
  fill_fan_in_uniform(l.weight, in, rng);
  return l;
}

}  // namespace detail

inline float fan_in_std(std::size_t fan_in) { return std::sqrt(2.0f / static_cast<float>(fan_in)); }

/// Deterministic in (config, seed). Weights He-uniform, biases zero.
inline ModelParams init_params(const EncoderConfig& config, std::uint64_t seed) {
  config.validate();
  ModelParams p;
  p.config = config;
  std::size_t in_ch = config.in_channels;
  for (std::size_t s = 0; s < config.stage_channels.size(); ++s) {
    Rng rng(derive_seed(seed, {0, s}));
    const Kernel3& k = config.kernels[s];
    ConvStage stage;
    stage.kernel = Tensor(Shape{config.stage_channels[s], in_ch, k[0], k[1], k[2]}, 0.0f, true);
    stage.bias = Tensor(Shape{config.stage_channels[s]}, 0.0f, true);
    stage.stride = config.strides[s];
    detail::fill_fan_in_uniform(stage.kernel, in_ch * k[0] * k[1] * k[2], rng);
    p.encoder.push_back(std::move(stage));
    in_ch = config.stage_channels[s];
  }
  const std::size_t D = config.feature_dim(), P = config.projection_dim;
  auto head_rng = [&](std::uint64_t tag) { return Rng(derive_seed(seed, {1, tag})); };
  {
    Rng r = head_rng(0);
    p.proj_appearance = detail::make_linear(D, P, r);
  }
  {
    Rng r = head_rng(1);
    p.proj_speed = detail::make_linear(D, P, r);
  }
  {
    Rng r = head_rng(2);
    p.pred_appearance = detail::make_linear(P, P, r);
  }
  {
    Rng r = head_rng(3);
    p.pred_speed = detail::make_linear(P, P, r);
  }
  {
    Rng r = head_rng(4);
    p.speed_classifier = detail::make_linear(D, config.num_speeds, r);
  }
  return p;
}

template <typename T>
Var linear(BasicGraph<T>& g, Var x, BasicLinear<T>& layer) {
  return g.add_bias(g.matmul(x, g.parameter(layer.weight)), g.parameter(layer.bias));
}

/// Conv stages with relu, then global average pooling -> [N, D].
template <typename T>
Var encode(BasicGraph<T>& g, Var clips, BasicModelParams<T>& params) {
  const EncoderConfig& c = params.config;
  const Shape expect{g.shape(clips).empty() ? 0 : g.shape(clips)[0], c.in_channels, c.clip_frames, c.clip_height,
                     c.clip_width};
  if (g.shape(clips) != expect)
    throw ShapeError("encode input " + shape_str(g.shape(clips)) + ", expected " + shape_str(expect));
  Var h = clips;
  for (auto& stage : params.encoder)
    h = g.relu(g.conv3d(h, g.parameter(stage.kernel), g.parameter(stage.bias), stage.stride));
  return g.global_avg_pool(h);
}

/// Projection head: affine map to projection_dim, then unit normalization.
template <typename T>
Var project(BasicGraph<T>& g, Var x, Head head, BasicModelParams<T>& params) {
  if (g.shape(x).size() != 2 || g.shape(x)[1] != params.config.feature_dim())
    throw ShapeError("project input " + shape_str(g.shape(x)));
  return g.l2_normalize(linear(g, x, params.projection(head)));
}

/// Predictor: affine map on the projection sphere, then unit normalization.
template <typename T>
Var predict(BasicGraph<T>& g, Var v, Head head, BasicModelParams<T>& params) {
  if (g.shape(v).size() != 2 || g.shape(v)[1] != params.config.projection_dim)
    throw ShapeError("predict input " + shape_str(g.shape(v)));
  return g.l2_normalize(linear(g, v, params.predictor(head)));
}

/// Raw speed-class logits [N, M].
template <typename T>
Var speed_logits(BasicGraph<T>& g, Var x, BasicModelParams<T>& params) {
  if (g.shape(x).size() != 2 || g.shape(x)[1] != params.config.feature_dim())
    throw ShapeError("speed_logits input " + shape_str(g.shape(x)));
  return linear(g, x, params.speed_classifier);
}

}  // namespace ascnet

#endif  // ASCNET_MODEL_HPP_
