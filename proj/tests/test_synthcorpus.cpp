#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>
#include <cstring>
#include <map>
#include <set>

#include "ascnet/corpus.hpp"
#include "ascnet/synthcorpus.hpp"

using namespace ascnet;

namespace {

VideoParams params_for(std::uint64_t seed, std::size_t cls, std::size_t frames = 128) {
  VideoParams p;
  p.seed = seed;
  p.video_id = static_cast<std::int64_t>(seed);
  p.appearance_class = cls;
  p.frames = frames;
  return p;
}

// Clip whose pixel k holds k / size, so any reordering is detectable.
VideoClip ramp_clip(std::size_t n, std::size_t h, std::size_t w) {
  VideoClip c;
  c.n_frames = n;
  c.height = h;
  c.width = w;
  c.pixels.resize(n * h * w * 3);
  for (std::size_t i = 0; i < c.pixels.size(); ++i) c.pixels[i] = static_cast<float>(i) / c.pixels.size();
  return c;
}

VideoClip solid_clip(float r, float g, float b) {
  VideoClip c;
  c.n_frames = 2;
  c.height = c.width = 4;
  for (std::size_t i = 0; i < 2 * 16; ++i) c.pixels.insert(c.pixels.end(), {r, g, b});
  return c;
}

}  // namespace

TEST(GenerateVideo, Deterministic) {
  const auto a = generate_video(params_for(11, 3));
  const auto b = generate_video(params_for(11, 3));
  EXPECT_EQ(a.frames, b.frames);
  EXPECT_EQ(a.frames.size(), 128u * 32 * 32 * 3);
}

TEST(GenerateVideo, PixelsInUnitRange) {
  for (std::size_t cls = 0; cls < 8; ++cls) {
    const auto v = generate_video(params_for(100 + cls, cls));
    for (float x : v.frames) {
      ASSERT_GE(x, 0.0f);
      ASSERT_LE(x, 1.0f);
    }
  }
}

TEST(GenerateVideo, CentroidMovesByMotionSpeed) {
  for (float speed : {1.0f, 2.0f, 3.0f}) {
    VideoParams p = params_for(5, 2);
    p.motion_speed = speed;
    for (std::size_t t = 0; t + 1 < 40; ++t) {
      const auto c0 = shape_centroid(p, t), c1 = shape_centroid(p, t + 1);
      auto wrapped = [](float d, float period) {
        d = std::fmod(d, period);
        if (d > period / 2) d -= period;
        if (d < -period / 2) d += period;
        return std::abs(d);
      };
      const float dx = wrapped(c1[0] - c0[0], 32.0f), dy = wrapped(c1[1] - c0[1], 32.0f);
      EXPECT_NEAR(std::hypot(dx, dy), speed, 1e-3f) << "t=" << t;
    }
  }
}

TEST(GenerateVideo, ForegroundMaskTracksCentroid) {
  const VideoParams p = params_for(8, 1);
  for (std::size_t t : {0u, 5u, 17u}) {
    const auto mask = foreground_mask(p, t);
    const auto c = shape_centroid(p, t);
    const std::size_t x = static_cast<std::size_t>(c[0]) % 32, y = static_cast<std::size_t>(c[1]) % 32;
    EXPECT_EQ(mask[y * 32 + x], 1) << "shape center not covered at t=" << t;
  }
}

TEST(GenerateVideo, SameClassDifferentSeedsShareFamilyNotPhase) {
  const auto a = generate_video(params_for(1, 4)), b = generate_video(params_for(2, 4));
  EXPECT_NE(a.frames, b.frames);
  EXPECT_NE(shape_centroid(a.params, 0), shape_centroid(b.params, 0));
}

TEST(GenerateVideo, ClassRecoverableFromSingleFrame) {
  // Nearest class-mean on per-frame mean colour; classes are styled to separate.
  constexpr std::size_t A = 8, per_class = 6;
  std::vector<std::array<double, 3>> centroid(A, {0, 0, 0});
  auto frame_color = [](const SyntheticVideo& v, std::size_t t) {
    std::array<double, 3> m{0, 0, 0};
    const float* f = v.frame(t);
    for (std::size_t i = 0; i < 32 * 32; ++i)
      for (int c = 0; c < 3; ++c) m[c] += f[3 * i + c] / 1024.0;
    return m;
  };
  for (std::size_t cls = 0; cls < A; ++cls)
    for (std::size_t k = 0; k < per_class; ++k) {
      const auto m = frame_color(generate_video(params_for(1000 + cls * 50 + k, cls)), 0);
      for (int c = 0; c < 3; ++c) centroid[cls][c] += m[c] / per_class;
    }
  std::size_t correct = 0, total = 0;
  for (std::size_t cls = 0; cls < A; ++cls)
    for (std::size_t k = 0; k < per_class; ++k) {
      const auto v = generate_video(params_for(9000 + cls * 50 + k, cls));
      const auto m = frame_color(v, 37);
      std::size_t best = 0;
      double best_d = 1e9;
      for (std::size_t j = 0; j < A; ++j) {
        double d = 0;
        for (int c = 0; c < 3; ++c) d += (m[c] - centroid[j][c]) * (m[c] - centroid[j][c]);
        if (d < best_d) best_d = d, best = j;
      }
      correct += best == cls;
      ++total;
    }
  EXPECT_GE(static_cast<double>(correct) / total, 0.9);
}

TEST(GenerateVideo, RejectsBadConfig) {
  EXPECT_THROW(generate_video(params_for(1, 0, 64), 128), ConfigError);
  VideoParams small = params_for(1, 0);
  small.height = 16;
  EXPECT_THROW(generate_video(small), ConfigError);
  EXPECT_THROW(generate_video(params_for(1, 8)), ConfigError);
}

TEST(SampleClip, ArithmeticProgression) {
  const auto v = generate_video(params_for(3, 0, 64), 64);
  const auto c = sample_clip(v, 0, 4, 16);
  ASSERT_EQ(c.n_frames, 16u);
  for (std::size_t i = 0; i < 16; ++i)
    EXPECT_TRUE(std::equal(v.frame(4 * i), v.frame(4 * i) + v.frame_size(), c.pixels.begin() + i * c.frame_size()));
  EXPECT_EQ(c.speed, 4u);
  EXPECT_EQ(c.video_id, v.id());
}

TEST(SampleClip, ConsecutiveIsContiguousSlice) {
  const auto v = generate_video(params_for(3, 0, 64), 64);
  const auto c = sample_clip(v, 3, 1, 16);
  EXPECT_TRUE(std::equal(c.pixels.begin(), c.pixels.end(), v.frame(3)));
  EXPECT_EQ(c.start, 3u);
}

TEST(SampleClip, OverflowRejected) {
  const auto v = generate_video(params_for(3, 0, 64), 64);
  EXPECT_THROW(sample_clip(v, 0, 8, 16), RangeError);
  EXPECT_NO_THROW(sample_clip(v, 56, 1, 8));
  EXPECT_THROW(sample_clip(v, 57, 1, 8), RangeError);
}

TEST(SampleClip, SpanFormula) {
  EXPECT_EQ(clip_span(16, 8), 121u);
  EXPECT_EQ(clip_span(8, 8), 57u);
  EXPECT_EQ(clip_span(8, 1), 8u);
}

TEST(UniformClipStarts, Endpoints) {
  const auto s = uniform_clip_starts(100, 10, 16);
  ASSERT_EQ(s.size(), 10u);
  EXPECT_EQ(s.front(), 0u);
  EXPECT_EQ(s.back(), 84u);
}

TEST(UniformClipStarts, InteriorMatchesRoundedFormula) {
  const auto s = uniform_clip_starts(100, 10, 16);
  for (std::size_t i = 0; i < 10; ++i) EXPECT_EQ(s[i], static_cast<std::size_t>(std::lround(i * 84.0 / 9.0)));
}

TEST(UniformClipStarts, DegenerateAndError) {
  for (std::size_t v : uniform_clip_starts(16, 10, 16)) EXPECT_EQ(v, 0u);
  EXPECT_THROW(uniform_clip_starts(15, 10, 16), RangeError);
}

TEST(Augment, IdentityConfigIsIdentity) {
  const VideoClip c = ramp_clip(3, 8, 8);
  const VideoClip out = augment(c, AugmentConfig::identity(), 42);
  EXPECT_EQ(out.pixels, c.pixels);
}

TEST(Augment, SolarizeAboveThreshold) {
  AugmentConfig cfg = AugmentConfig::identity();
  cfg.solarize_enabled = true;
  cfg.solarize_prob = 1.0f;
  cfg.solarize_threshold = 0.5f;
  const VideoClip out = augment(solid_clip(0.9f, 0.2f, 0.5f), cfg, 1);
  EXPECT_NEAR(out.pixels[0], 0.1f, 1e-6f);
  EXPECT_FLOAT_EQ(out.pixels[1], 0.2f);
  EXPECT_FLOAT_EQ(out.pixels[2], 0.5f);
}

TEST(Augment, GrayscaleUsesRec601) {
  AugmentConfig cfg = AugmentConfig::identity();
  cfg.grayscale_enabled = true;
  cfg.grayscale_prob = 1.0f;
  const VideoClip out = augment(solid_clip(1, 0, 0), cfg, 1);
  for (std::size_t i = 0; i < out.pixels.size(); ++i) EXPECT_NEAR(out.pixels[i], 0.299f, 1e-6f);
  const VideoClip g = augment(solid_clip(0, 1, 0), cfg, 1), b = augment(solid_clip(0, 0, 1), cfg, 1);
  EXPECT_NEAR(g.pixels[0], 0.587f, 1e-6f);
  EXPECT_NEAR(b.pixels[0], 0.114f, 1e-6f);
}

TEST(Augment, ShapeAndRangeHoldForRandomDraws) {
  const auto v = generate_video(params_for(21, 6, 64), 64);
  const VideoClip c = sample_clip(v, 0, 2, 8);
  AugmentConfig cfg;
  cfg.out_height = 24;
  cfg.out_width = 20;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const VideoClip out = augment(c, cfg, s);
    ASSERT_EQ(out.height, 24u);
    ASSERT_EQ(out.width, 20u);
    ASSERT_EQ(out.n_frames, 8u);
    ASSERT_EQ(out.pixels.size(), 8u * 24 * 20 * 3);
    for (float x : out.pixels) {
      ASSERT_GE(x, 0.0f);
      ASSERT_LE(x, 1.0f);
    }
  }
}

TEST(Augment, DeterministicPerSeed) {
  const VideoClip c = ramp_clip(4, 16, 16);
  const AugmentConfig cfg;
  EXPECT_EQ(augment(c, cfg, 7).pixels, augment(c, cfg, 7).pixels);
  EXPECT_NE(augment(c, cfg, 7).pixels, augment(c, cfg, 8).pixels);
}

TEST(Augment, SameParametersOnEveryFrame) {
  // With identical frames in, every output frame must match the first.
  VideoClip c = ramp_clip(1, 16, 16);
  const auto frame = c.pixels;
  c.n_frames = 5;
  for (int i = 0; i < 4; ++i) c.pixels.insert(c.pixels.end(), frame.begin(), frame.end());
  AugmentConfig cfg;
  cfg.jitter_prob = cfg.blur_prob = cfg.grayscale_prob = cfg.solarize_prob = 1.0f;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const VideoClip out = augment(c, cfg, s);
    const std::size_t fs = out.frame_size();
    for (std::size_t f = 1; f < 5; ++f)
      ASSERT_TRUE(std::equal(out.pixels.begin(), out.pixels.begin() + fs, out.pixels.begin() + f * fs));
  }
}

TEST(Augment, RejectsInvalidConfig) {
  AugmentConfig cfg;
  cfg.grayscale_prob = 1.5f;
  EXPECT_THROW(augment(ramp_clip(1, 4, 4), cfg, 0), ConfigError);
  cfg = AugmentConfig{};
  cfg.crop_scale_min = 0.9f;
  cfg.crop_scale_max = 0.5f;
  EXPECT_THROW(augment(ramp_clip(1, 4, 4), cfg, 0), ConfigError);
}

TEST(ClipsToTensor, ChannelMajorLayout) {
  const VideoClip c = ramp_clip(2, 3, 4);
  const Tensor t = clips_to_tensor({c, c});
  ASSERT_EQ(t.shape, (Shape{2, 3, 2, 3, 4}));
  for (std::size_t ch = 0; ch < 3; ++ch)
    for (std::size_t f = 0; f < 2; ++f)
      for (std::size_t i = 0; i < 12; ++i)
        EXPECT_EQ(t.values[(1 * 3 + ch) * 24 + f * 12 + i], c.pixels[(f * 12 + i) * 3 + ch]);
}

TEST(Corpus, ClassesCycleAndSeedsDiffer) {
  CorpusConfig cfg;
  cfg.num_videos = 20;
  const Corpus c = build_corpus(cfg, 64);
  std::set<std::uint64_t> seeds;
  for (std::size_t i = 0; i < c.size(); ++i) {
    EXPECT_EQ(c[i].params.appearance_class, i % 8);
    EXPECT_EQ(c[i].params.motion_speed, cfg.motion_speed);
    seeds.insert(c[i].params.seed);
  }
  EXPECT_EQ(seeds.size(), 20u);
}

TEST(Corpus, ParallelBuildMatchesSerial) {
  CorpusConfig cfg;
  cfg.num_videos = 6;
  const Corpus c = build_corpus(cfg, 64);
  for (std::size_t i = 0; i < c.size(); ++i)
    EXPECT_EQ(c[i].frames, generate_video(corpus_video_params(cfg, i), 64).frames);
}

TEST(Corpus, SaveLoadRoundTripAndRegenerate) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ascnet_corpus_roundtrip";
  fs::remove_all(dir);
  CorpusConfig cfg;
  cfg.num_videos = 4;
  const Corpus c = build_corpus(cfg, 64);
  save_corpus(c, dir);
  const auto stamp = fs::last_write_time(dir / video_file_name(1));
  save_corpus(c, dir);
  EXPECT_EQ(fs::last_write_time(dir / video_file_name(1)), stamp);

  fs::remove(dir / video_file_name(2));
  const Corpus back = load_corpus(dir, 64);
  ASSERT_EQ(back.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(back[i].frames, c[i].frames);
    EXPECT_EQ(back[i].params.seed, c[i].params.seed);
  }
  EXPECT_EQ(corpus_manifest(back), corpus_manifest(c));
  fs::remove_all(dir);
}

TEST(Corpus, PixelFileIsLittleEndianFloat32) {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "ascnet_corpus_bytes";
  fs::remove_all(dir);
  CorpusConfig cfg;
  cfg.num_videos = 2;
  const Corpus c = build_corpus(cfg, 64);
  save_corpus(c, dir);
  const auto bytes = io::read_file(dir / video_file_name(0));
  ASSERT_EQ(bytes.size(), c[0].frames.size() * 4);
  for (std::size_t i : {0u, 1u, 777u}) {
    std::uint32_t u = 0;
    for (int k = 3; k >= 0; --k) u = (u << 8) | static_cast<unsigned char>(bytes[i * 4 + k]);
    float f;
    std::memcpy(&f, &u, 4);
    EXPECT_EQ(f, c[0].frames[i]);
  }
  fs::remove_all(dir);
}

TEST(Corpus, SpeedLabelIndependentOfClass) {
  // Every (class, speed) cell of a sampled contingency table is reachable with
  // the same clip count, so appearance carries no speed information.
  CorpusConfig cfg;
  cfg.num_videos = 16;
  const Corpus c = build_corpus(cfg, 64);
  std::map<std::pair<std::size_t, SpeedClass>, std::size_t> counts;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (SpeedClass s : kAllSpeeds) {
      const auto clip = sample_clip(c[i], 0, s, 8);
      ++counts[{c[i].params.appearance_class, clip.speed}];
    }
  for (const auto& [key, n] : counts) EXPECT_EQ(n, 2u);
  EXPECT_EQ(counts.size(), 8u * 4);
}
