#ifndef ASCNET_SYNTHCORPUS_HPP_
#define ASCNET_SYNTHCORPUS_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "ascnet/errors.hpp"
#include "ascnet/random.hpp"
#include "ascnet/tensor.hpp"

namespace ascnet {

/// Frame sampling interval of a clip.
using SpeedClass = std::size_t;

inline constexpr std::array<SpeedClass, 4> kAllSpeeds{1, 2, 4, 8};

inline bool is_valid_speed(SpeedClass s) {
  return std::find(kAllSpeeds.begin(), kAllSpeeds.end(), s) != kAllSpeeds.end();
}

struct VideoParams {
  std::uint64_t seed = 0;
  std::int64_t video_id = 0;
  std::size_t appearance_class = 0;
  std::size_t num_classes = 8;
  float motion_speed = 1.0f;
  std::size_t frames = 64;
  std::size_t height = 32;
  std::size_t width = 32;
};

struct SyntheticVideo {
  VideoParams params;
  std::vector<float> frames;  // [T,H,W,3], values in [0,1]

  std::int64_t id() const { return params.video_id; }
  std::size_t length() const { return params.frames; }
  std::size_t height() const { return params.height; }
  std::size_t width() const { return params.width; }
  std::size_t frame_size() const { return params.height * params.width * 3; }
  const float* frame(std::size_t t) const { return frames.data() + t * frame_size(); }
};

struct VideoClip {
  std::vector<float> pixels;  // [n_frames,H,W,3]
  std::size_t n_frames = 0;
  std::size_t height = 0;
  std::size_t width = 0;
  std::int64_t video_id = 0;
  std::size_t start = 0;
  SpeedClass speed = 1;

  std::size_t frame_size() const { return height * width * 3; }
};

/// Frames touched by a clip of n_frames at the given speed.
inline std::size_t clip_span(std::size_t n_frames, SpeedClass speed) { return (n_frames - 1) * speed + 1; }

namespace detail {

struct Rgb {
  float r, g, b;
};

inline Rgb hsv_to_rgb(float h, float s, float v) {
  h = h - std::floor(h);
  const float hh = h * 6.0f;
  const int sector = static_cast<int>(hh) % 6;
  const float f = hh - std::floor(hh);
  const float p = v * (1 - s), q = v * (1 - s * f), t = v * (1 - s * (1 - f));
  switch (sector) {
    case 0: return {v, t, p};
    case 1: return {q, v, p};
    case 2: return {p, v, t};
    case 3: return {p, q, v};
    case 4: return {t, p, v};
    default: return {v, p, q};
  }
}

/// Per-class appearance recipe. Everything here depends on the class only.
struct ClassStyle {
  Rgb background;
  Rgb foreground;
  std::size_t lattice;   // value-noise cells per side
  std::size_t levels;    // quantization levels of the noise
  std::size_t sides;     // polygon sides
  bool star;             // alternate vertex radius
  float radius_frac;     // polygon radius relative to min(H, W)
};

inline ClassStyle class_style(std::size_t cls, std::size_t num_classes) {
  const float hue = static_cast<float>(cls) / static_cast<float>(std::max<std::size_t>(num_classes, 1));
  ClassStyle s{};
  s.background = hsv_to_rgb(hue, 0.65f, 0.75f);
  s.foreground = hsv_to_rgb(hue + 0.5f, 0.9f, 1.0f);
  s.lattice = 2 + cls % 4;
  s.levels = 3 + (cls / 2) % 3;
  s.sides = 3 + cls % 4;
  s.star = (cls / 4) % 2 == 1;
  s.radius_frac = 0.22f;
  return s;
}

/// Per-video geometry drawn from the video seed.
struct Motion {
  float x0, y0;  // centroid at t = 0
  float dx, dy;  // unit axis direction
  float phase;   // polygon rotation
};

inline Motion video_motion(std::uint64_t seed) {
  Rng rng(derive_seed(seed, {1}));
  Motion m{};
  m.x0 = uniform(rng, 0.0f, 1.0f);
  m.y0 = uniform(rng, 0.0f, 1.0f);
  static constexpr float dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  const std::size_t d = uniform_index(rng, 4);
  m.dx = dirs[d][0];
  m.dy = dirs[d][1];
  m.phase = uniform(rng, 0.0f, 2.0f * std::numbers::pi_v<float>);
  return m;
}

inline float wrap_pos(float v, float period) {
  float r = std::fmod(v, period);
  return r < 0 ? r + period : r;
}

/// Signed offset folded into [-period/2, period/2).
inline float wrap_delta(float d, float period) {
  d = wrap_pos(d + period * 0.5f, period);
  return d - period * 0.5f;
}

inline bool inside_polygon(float x, float y, const std::vector<std::array<float, 2>>& poly) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const float xi = poly[i][0], yi = poly[i][1], xj = poly[j][0], yj = poly[j][1];
    if (((yi > y) != (yj > y)) && (x < (xj - xi) * (y - yi) / (yj - yi) + xi)) in = !in;
  }
  return in;
}

/// Polygon vertices relative to the centroid.
inline std::vector<std::array<float, 2>> polygon(const ClassStyle& style, float radius, float phase) {
  const std::size_t n = style.star ? style.sides * 2 : style.sides;
  std::vector<std::array<float, 2>> pts(n);
  for (std::size_t i = 0; i < n; ++i) {
    const float a = phase + 2.0f * std::numbers::pi_v<float> * static_cast<float>(i) / static_cast<float>(n);
    const float r = (style.star && i % 2 == 1) ? radius * 0.45f : radius;
    pts[i] = {r * std::cos(a), r * std::sin(a)};
  }
  return pts;
}

}  // namespace detail

/// Centroid of the foreground shape at frame t, in pixels, already wrapped.
inline std::array<float, 2> shape_centroid(const VideoParams& p, std::size_t t) {
  const detail::Motion m = detail::video_motion(p.seed);
  const float W = static_cast<float>(p.width), H = static_cast<float>(p.height);
  const float step = p.motion_speed * static_cast<float>(t);
  return {detail::wrap_pos(m.x0 * W + m.dx * step, W), detail::wrap_pos(m.y0 * H + m.dy * step, H)};
}

/// Foreground coverage of frame t, [H,W] with 1 inside the shape.
inline std::vector<std::uint8_t> foreground_mask(const VideoParams& p, std::size_t t) {
  const detail::ClassStyle style = detail::class_style(p.appearance_class, p.num_classes);
  const detail::Motion m = detail::video_motion(p.seed);
  const float radius = style.radius_frac * static_cast<float>(std::min(p.height, p.width));
  const auto poly = detail::polygon(style, radius, m.phase);
  const auto c = shape_centroid(p, t);
  const float W = static_cast<float>(p.width), H = static_cast<float>(p.height);
  std::vector<std::uint8_t> mask(p.height * p.width, 0);
  for (std::size_t y = 0; y < p.height; ++y)
    for (std::size_t x = 0; x < p.width; ++x) {
      const float ox = detail::wrap_delta(static_cast<float>(x) + 0.5f - c[0], W);
      const float oy = detail::wrap_delta(static_cast<float>(y) + 0.5f - c[1], H);
      mask[y * p.width + x] = detail::inside_polygon(ox, oy, poly) ? 1 : 0;
    }
  return mask;
}

/**
 * Renders a video: a static class-styled value-noise background with a
 * class-styled polygon translating motion_speed px/frame along one axis,
 * wrapping at the borders. Deterministic in (seed, params).
 *
 * required_span is the longest frame span a clip will need (max speed times
 * clip length); shorter videos are rejected.
 */
inline SyntheticVideo generate_video(const VideoParams& params, std::size_t required_span = 8 * 16) {
  if (params.frames < required_span)
    throw ConfigError("video length " + std::to_string(params.frames) + " < required span " +
                      std::to_string(required_span));
  if (params.height < 32 || params.width < 32) throw ConfigError("video frames must be at least 32x32");
  if (params.appearance_class >= params.num_classes) throw ConfigError("appearance_class out of range");
  if (!(params.motion_speed >= 0.0f)) throw ConfigError("motion_speed must be >= 0");

  const std::size_t H = params.height, W = params.width;
  const detail::ClassStyle style = detail::class_style(params.appearance_class, params.num_classes);

  // Value-noise lattice; the extra row/column wraps so the texture tiles.
  Rng rng(derive_seed(params.seed, {0}));
  const std::size_t L = style.lattice;
  std::vector<float> lattice(L * L);
  for (float& v : lattice) v = uniform(rng, 0.0f, 1.0f);
  auto smooth = [](float f) { return f * f * (3 - 2 * f); };

  std::vector<float> background(H * W * 3);
  for (std::size_t y = 0; y < H; ++y)
    for (std::size_t x = 0; x < W; ++x) {
      const float gx = (static_cast<float>(x) + 0.5f) * static_cast<float>(L) / static_cast<float>(W);
      const float gy = (static_cast<float>(y) + 0.5f) * static_cast<float>(L) / static_cast<float>(H);
      const std::size_t ix = static_cast<std::size_t>(gx) % L, iy = static_cast<std::size_t>(gy) % L;
      const float fx = smooth(gx - std::floor(gx)), fy = smooth(gy - std::floor(gy));
      auto at = [&](std::size_t i, std::size_t j) { return lattice[(j % L) * L + (i % L)]; };
      const float top = at(ix, iy) * (1 - fx) + at(ix + 1, iy) * fx;
      const float bot = at(ix, iy + 1) * (1 - fx) + at(ix + 1, iy + 1) * fx;
      const float noise = top * (1 - fy) + bot * fy;
      const float q = std::min(std::floor(noise * static_cast<float>(style.levels)),
                               static_cast<float>(style.levels - 1)) /
                      static_cast<float>(style.levels - 1);
      const float shade = 0.45f + 0.55f * q;
      float* px = &background[(y * W + x) * 3];
      px[0] = style.background.r * shade;
      px[1] = style.background.g * shade;
      px[2] = style.background.b * shade;
    }

  SyntheticVideo video;
  video.params = params;
  video.frames.resize(params.frames * H * W * 3);
  for (std::size_t t = 0; t < params.frames; ++t) {
    const auto mask = foreground_mask(params, t);
    float* f = video.frames.data() + t * H * W * 3;
    std::copy(background.begin(), background.end(), f);
    for (std::size_t i = 0; i < H * W; ++i)
      if (mask[i]) {
        f[i * 3 + 0] = style.foreground.r;
        f[i * 3 + 1] = style.foreground.g;
        f[i * 3 + 2] = style.foreground.b;
      }
  }
  return video;
}

/// Frame indices start, start+speed, ..., start+(n-1)*speed.
inline VideoClip sample_clip(const SyntheticVideo& video, std::size_t start, SpeedClass speed, std::size_t n_frames) {
  if (speed == 0 || n_frames == 0) throw RangeError("speed and n_frames must be positive");
  const std::size_t last = start + (n_frames - 1) * speed;
  if (last >= video.length())
    throw RangeError("clip needs frame " + std::to_string(last) + " of a " + std::to_string(video.length()) +
                     "-frame video");
  VideoClip clip;
  clip.n_frames = n_frames;
  clip.height = video.height();
  clip.width = video.width();
  clip.video_id = video.id();
  clip.start = start;
  clip.speed = speed;
  clip.pixels.resize(n_frames * video.frame_size());
  for (std::size_t i = 0; i < n_frames; ++i) {
    const float* src = video.frame(start + i * speed);
    std::copy(src, src + video.frame_size(), clip.pixels.begin() + i * video.frame_size());
  }
  return clip;
}

/// Clip starts spread evenly over the video: round(i * (T - span) / (n - 1)).
inline std::vector<std::size_t> uniform_clip_starts(std::size_t length, std::size_t n_clips, std::size_t span) {
  if (span > length)
    throw RangeError("clip span " + std::to_string(span) + " exceeds video length " + std::to_string(length));
  std::vector<std::size_t> starts(n_clips, 0);
  if (n_clips < 2) return starts;
  const double room = static_cast<double>(length - span);
  for (std::size_t i = 0; i < n_clips; ++i)
    starts[i] = static_cast<std::size_t>(std::lround(static_cast<double>(i) * room / static_cast<double>(n_clips - 1)));
  return starts;
}

/**
 * Clip augmentation settings. Transforms run in a fixed order:
 * crop+resize, color jitter, Gaussian blur, grayscale, solarize.
 *
 * crop_scale_min/max is the area fraction of the random crop; the default
 * (0.4, 1.0) is a local choice.
 */
struct AugmentConfig {
  std::size_t out_height = 0;  // 0 keeps the input size
  std::size_t out_width = 0;

  bool crop_enabled = true;
  float crop_scale_min = 0.4f;
  float crop_scale_max = 1.0f;
  float crop_ratio_min = 3.0f / 4.0f;
  float crop_ratio_max = 4.0f / 3.0f;

  bool jitter_enabled = true;
  float jitter_prob = 0.8f;
  float brightness = 0.4f;
  float contrast = 0.4f;
  float saturation = 0.4f;

  bool blur_enabled = true;
  float blur_prob = 0.5f;
  float blur_sigma_min = 0.1f;
  float blur_sigma_max = 2.0f;

  bool grayscale_enabled = true;
  float grayscale_prob = 0.2f;

  bool solarize_enabled = true;
  float solarize_prob = 0.2f;
  float solarize_threshold = 0.5f;

  void validate() const {
    auto prob = [](float p, const char* name) {
      if (!(p >= 0.0f && p <= 1.0f)) throw ConfigError(std::string(name) + " must lie in [0,1]");
    };
    prob(jitter_prob, "jitter_prob");
    prob(blur_prob, "blur_prob");
    prob(grayscale_prob, "grayscale_prob");
    prob(solarize_prob, "solarize_prob");
    prob(solarize_threshold, "solarize_threshold");
    prob(brightness, "brightness");
    prob(contrast, "contrast");
    prob(saturation, "saturation");
    if (!(crop_scale_min > 0.0f && crop_scale_min <= crop_scale_max && crop_scale_max <= 1.0f))
      throw ConfigError("crop scale range must satisfy 0 < min <= max <= 1");
    if (!(crop_ratio_min > 0.0f && crop_ratio_min <= crop_ratio_max))
      throw ConfigError("crop ratio range must be ordered and positive");
    if (!(blur_sigma_min > 0.0f && blur_sigma_min <= blur_sigma_max))
      throw ConfigError("blur sigma range must be ordered and positive");
  }

  /// Everything off: the output is the input (resized only if out size differs).
  static AugmentConfig identity() {
    AugmentConfig c;
    c.crop_enabled = c.jitter_enabled = c.blur_enabled = c.grayscale_enabled = c.solarize_enabled = false;
    return c;
  }
};

inline constexpr float kLumaR = 0.299f, kLumaG = 0.587f, kLumaB = 0.114f;

namespace detail {

inline float clamp01(float v) { return std::clamp(v, 0.0f, 1.0f); }

/// Bilinear resample of a [y0,y0+ch) x [x0,x0+cw) window to oh x ow, per frame.
inline std::vector<float> crop_resize(const VideoClip& clip, float x0, float y0, float cw, float ch, std::size_t ow,
                                      std::size_t oh) {
  const std::size_t W = clip.width, H = clip.height;
  std::vector<float> out(clip.n_frames * oh * ow * 3);
  const float sx = cw / static_cast<float>(ow), sy = ch / static_cast<float>(oh);
  for (std::size_t f = 0; f < clip.n_frames; ++f) {
    const float* src = clip.pixels.data() + f * clip.frame_size();
    float* dst = out.data() + f * oh * ow * 3;
    for (std::size_t y = 0; y < oh; ++y) {
      float fy = y0 + (static_cast<float>(y) + 0.5f) * sy - 0.5f;
      fy = std::clamp(fy, 0.0f, static_cast<float>(H - 1));
      const std::size_t iy = static_cast<std::size_t>(fy);
      const std::size_t iy1 = std::min(iy + 1, H - 1);
      const float wy = fy - static_cast<float>(iy);
      for (std::size_t x = 0; x < ow; ++x) {
        float fx = x0 + (static_cast<float>(x) + 0.5f) * sx - 0.5f;
        fx = std::clamp(fx, 0.0f, static_cast<float>(W - 1));
        const std::size_t ix = static_cast<std::size_t>(fx);
        const std::size_t ix1 = std::min(ix + 1, W - 1);
        const float wx = fx - static_cast<float>(ix);
        for (std::size_t c = 0; c < 3; ++c) {
          const float p00 = src[(iy * W + ix) * 3 + c], p01 = src[(iy * W + ix1) * 3 + c];
          const float p10 = src[(iy1 * W + ix) * 3 + c], p11 = src[(iy1 * W + ix1) * 3 + c];
          const float top = p00 + (p01 - p00) * wx;
          const float bot = p10 + (p11 - p10) * wx;
          dst[(y * ow + x) * 3 + c] = top + (bot - top) * wy;
        }
      }
    }
  }
  return out;
}

inline std::vector<float> gaussian_kernel(float sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0f * sigma)));
  std::vector<float> k(2 * radius + 1);
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5f * static_cast<float>(i * i) / (sigma * sigma));
    total += k[i + radius];
  }
  for (float& v : k) v = static_cast<float>(v / total);
  return k;
}

/// Separable blur with clamped borders, frame by frame.
inline void gaussian_blur(VideoClip& clip, float sigma) {
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  const int H = static_cast<int>(clip.height), W = static_cast<int>(clip.width);
  std::vector<float> tmp(clip.frame_size());
  for (std::size_t f = 0; f < clip.n_frames; ++f) {
    float* px = clip.pixels.data() + f * clip.frame_size();
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        for (int c = 0; c < 3; ++c) {
          float acc = 0.0f;
          for (int i = -r; i <= r; ++i) acc += k[i + r] * px[(y * W + std::clamp(x + i, 0, W - 1)) * 3 + c];
          tmp[(y * W + x) * 3 + c] = acc;
        }
    for (int y = 0; y < H; ++y)
      for (int x = 0; x < W; ++x)
        for (int c = 0; c < 3; ++c) {
          float acc = 0.0f;
          for (int i = -r; i <= r; ++i) acc += k[i + r] * tmp[(std::clamp(y + i, 0, H - 1) * W + x) * 3 + c];
          px[(y * W + x) * 3 + c] = acc;
        }
  }
}

}  // namespace detail

/**
 * Applies the augmentation stack. All random parameters are drawn once per
 * clip (each transform from its own stream of `seed`) and applied to every
 * frame alike, so the clip stays temporally coherent. Output is in [0,1].
 */
inline VideoClip augment(const VideoClip& clip, const AugmentConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  const std::size_t oh = cfg.out_height ? cfg.out_height : clip.height;
  const std::size_t ow = cfg.out_width ? cfg.out_width : clip.width;

  VideoClip out = clip;
  out.height = oh;
  out.width = ow;

  {
    Rng rng(derive_seed(seed, {0}));
    float cw = static_cast<float>(clip.width), ch = static_cast<float>(clip.height), x0 = 0, y0 = 0;
    if (cfg.crop_enabled) {
      const float area = uniform(rng, cfg.crop_scale_min, cfg.crop_scale_max);
      const float log_ratio = uniform(rng, std::log(cfg.crop_ratio_min), std::log(cfg.crop_ratio_max));
      const float ratio = std::exp(log_ratio);
      cw = std::clamp(std::round(std::sqrt(area * ratio) * static_cast<float>(clip.width)), 1.0f,
                      static_cast<float>(clip.width));
      ch = std::clamp(std::round(std::sqrt(area / ratio) * static_cast<float>(clip.height)), 1.0f,
                      static_cast<float>(clip.height));
      x0 = std::floor(uniform(rng, 0.0f, 1.0f) * (static_cast<float>(clip.width) - cw + 1.0f));
      y0 = std::floor(uniform(rng, 0.0f, 1.0f) * (static_cast<float>(clip.height) - ch + 1.0f));
      x0 = std::min(x0, static_cast<float>(clip.width) - cw);
      y0 = std::min(y0, static_cast<float>(clip.height) - ch);
    }
    const bool unchanged = cw == static_cast<float>(ow) && ch == static_cast<float>(oh) &&
                           cw == static_cast<float>(clip.width) && ch == static_cast<float>(clip.height);
    if (!unchanged) out.pixels = detail::crop_resize(clip, x0, y0, cw, ch, ow, oh);
  }

  auto& px = out.pixels;
  const std::size_t npx = px.size() / 3;

  if (cfg.jitter_enabled) {
    Rng rng(derive_seed(seed, {1}));
    const bool apply = bernoulli(rng, cfg.jitter_prob);
    const float fb = uniform(rng, 1.0f - cfg.brightness, 1.0f + cfg.brightness);
    const float fc = uniform(rng, 1.0f - cfg.contrast, 1.0f + cfg.contrast);
    const float fs = uniform(rng, 1.0f - cfg.saturation, 1.0f + cfg.saturation);
    if (apply) {
      for (float& v : px) v = detail::clamp01(v * fb);
      double mean = 0.0;
      for (std::size_t i = 0; i < npx; ++i) mean += kLumaR * px[3 * i] + kLumaG * px[3 * i + 1] + kLumaB * px[3 * i + 2];
      const float m = static_cast<float>(mean / static_cast<double>(npx));
      for (float& v : px) v = detail::clamp01((v - m) * fc + m);
      for (std::size_t i = 0; i < npx; ++i) {
        float* p = &px[3 * i];
        const float gray = kLumaR * p[0] + kLumaG * p[1] + kLumaB * p[2];
        for (int c = 0; c < 3; ++c) p[c] = detail::clamp01(gray + (p[c] - gray) * fs);
      }
    }
  }

  if (cfg.blur_enabled) {
    Rng rng(derive_seed(seed, {2}));
    const bool apply = bernoulli(rng, cfg.blur_prob);
    const float sigma = uniform(rng, cfg.blur_sigma_min, cfg.blur_sigma_max);
    if (apply) detail::gaussian_blur(out, sigma);
  }

  if (cfg.grayscale_enabled) {
    Rng rng(derive_seed(seed, {3}));
    if (bernoulli(rng, cfg.grayscale_prob)) {
      for (std::size_t i = 0; i < npx; ++i) {
        float* p = &px[3 * i];
        const float gray = kLumaR * p[0] + kLumaG * p[1] + kLumaB * p[2];
        p[0] = p[1] = p[2] = gray;
      }
    }
  }

  if (cfg.solarize_enabled) {
    Rng rng(derive_seed(seed, {4}));
    if (bernoulli(rng, cfg.solarize_prob))
      for (float& v : px)
        if (v >= cfg.solarize_threshold) v = 1.0f - v;
  }

  for (float& v : px) v = detail::clamp01(v);
  return out;
}

/// Center crop of size (oh, ow); no resampling.
inline VideoClip center_crop(const VideoClip& clip, std::size_t oh, std::size_t ow) {
  if (oh > clip.height || ow > clip.width) throw RangeError("center crop larger than clip");
  if (oh == clip.height && ow == clip.width) return clip;
  VideoClip out = clip;
  out.height = oh;
  out.width = ow;
  out.pixels.assign(clip.n_frames * oh * ow * 3, 0.0f);
  const std::size_t y0 = (clip.height - oh) / 2, x0 = (clip.width - ow) / 2;
  for (std::size_t f = 0; f < clip.n_frames; ++f)
    for (std::size_t y = 0; y < oh; ++y) {
      const float* src = clip.pixels.data() + f * clip.frame_size() + ((y0 + y) * clip.width + x0) * 3;
      std::copy(src, src + ow * 3, out.pixels.begin() + (f * oh * ow + y * ow) * 3);
    }
  return out;
}

/// Packs clips of identical geometry into an encoder input [N,3,T,H,W].
inline Tensor clips_to_tensor(const std::vector<VideoClip>& clips) {
  if (clips.empty()) throw ShapeError("no clips to pack");
  const std::size_t T = clips[0].n_frames, H = clips[0].height, W = clips[0].width;
  Tensor out(Shape{clips.size(), 3, T, H, W});
  const std::size_t plane = H * W, vol = T * plane;
  for (std::size_t n = 0; n < clips.size(); ++n) {
    const VideoClip& c = clips[n];
    if (c.n_frames != T || c.height != H || c.width != W) throw ShapeError("clips differ in geometry");
    for (std::size_t t = 0; t < T; ++t)
      for (std::size_t i = 0; i < plane; ++i)
        for (std::size_t ch = 0; ch < 3; ++ch)
          out.values[(n * 3 + ch) * vol + t * plane + i] = c.pixels[(t * plane + i) * 3 + ch];
  }
  return out;
}

}  // namespace ascnet

#endif  // ASCNET_SYNTHCORPUS_HPP_
