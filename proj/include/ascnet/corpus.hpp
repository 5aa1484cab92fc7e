#ifndef ASCNET_CORPUS_HPP_
#define ASCNET_CORPUS_HPP_

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "ascnet/binary_io.hpp"
#include "ascnet/errors.hpp"
#include "ascnet/parallel.hpp"
#include "ascnet/random.hpp"
#include "ascnet/synthcorpus.hpp"

namespace ascnet {

struct CorpusConfig {
  std::size_t num_videos = 200;
  std::size_t num_classes = 8;
  std::size_t frames = 64;
  std::size_t height = 32;
  std::size_t width = 32;
  float motion_speed = 1.0f;
  std::uint64_t seed = 1;

  void validate() const {
    if (num_videos < 2) throw ConfigError("corpus needs at least 2 videos");
    if (num_classes < 1) throw ConfigError("corpus needs at least 1 class");
  }
};

struct Corpus {
  CorpusConfig config;
  std::vector<SyntheticVideo> videos;

  std::size_t size() const { return videos.size(); }
  const SyntheticVideo& operator[](std::size_t i) const { return videos[i]; }
};

/// Video i gets class i mod A and its own seed; motion speed is shared corpus-wide.
inline VideoParams corpus_video_params(const CorpusConfig& cfg, std::size_t i) {
  VideoParams p;
  p.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(i)});
  p.video_id = static_cast<std::int64_t>(i);
  p.appearance_class = i % cfg.num_classes;
  p.num_classes = cfg.num_classes;
  p.motion_speed = cfg.motion_speed;
  p.frames = cfg.frames;
  p.height = cfg.height;
  p.width = cfg.width;
  return p;
}

inline Corpus build_corpus(const CorpusConfig& cfg, std::size_t required_span) {
  cfg.validate();
  Corpus corpus{cfg, std::vector<SyntheticVideo>(cfg.num_videos)};
  parallel_for(cfg.num_videos,
               [&](std::size_t i) { corpus.videos[i] = generate_video(corpus_video_params(cfg, i), required_span); });
  return corpus;
}

inline std::string video_file_name(std::int64_t id) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "video_%05lld.f32", static_cast<long long>(id));
  return buf;
}

inline nlohmann::ordered_json corpus_manifest(const Corpus& corpus) {
  nlohmann::ordered_json m;
  m["format"] = "ascnet-corpus";
  m["version"] = 1;
  m["num_classes"] = corpus.config.num_classes;
  m["corpus_seed"] = corpus.config.seed;
  auto& vids = m["videos"] = nlohmann::ordered_json::array();
  for (const auto& v : corpus.videos) {
    const VideoParams& p = v.params;
    vids.push_back({{"video_id", p.video_id},
                    {"appearance_class", p.appearance_class},
                    {"motion_speed", p.motion_speed},
                    {"seed", p.seed},
                    {"dims", {p.frames, p.height, p.width, 3}},
                    {"file", video_file_name(p.video_id)}});
  }
  return m;
}

/// Writes manifest.json plus one raw little-endian float32 [T,H,W,3] file per
/// video. Unchanged files are not rewritten.
inline void save_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const std::string text = corpus_manifest(corpus).dump(2) + "\n";
  io::write_file_if_changed(dir / "manifest.json", std::vector<char>(text.begin(), text.end()));
  for (const auto& v : corpus.videos) io::write_file_if_changed(dir / video_file_name(v.id()), io::floats_to_bytes(v.frames));
}

/// Reads a corpus; videos whose pixel file is missing are regenerated from the manifest.
inline Corpus load_corpus(const std::filesystem::path& dir, std::size_t required_span) {
  const auto bytes = io::read_file(dir / "manifest.json");
  nlohmann::json m;
  try {
    m = nlohmann::json::parse(bytes.begin(), bytes.end());
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad manifest in " + dir.string() + ": " + e.what());
  }
  if (m.value("format", "") != "ascnet-corpus") throw IoError("not an ascnet corpus manifest: " + dir.string());
  Corpus corpus;
  corpus.config.num_classes = m.at("num_classes").get<std::size_t>();
  corpus.config.seed = m.value("corpus_seed", std::uint64_t{0});
  const auto& vids = m.at("videos");
  corpus.config.num_videos = vids.size();
  corpus.videos.resize(vids.size());
  std::vector<VideoParams> params(vids.size());
  for (std::size_t i = 0; i < vids.size(); ++i) {
    const auto& j = vids[i];
    VideoParams& p = params[i];
    p.video_id = j.at("video_id").get<std::int64_t>();
    p.appearance_class = j.at("appearance_class").get<std::size_t>();
    p.num_classes = corpus.config.num_classes;
    p.motion_speed = j.at("motion_speed").get<float>();
    p.seed = j.at("seed").get<std::uint64_t>();
    const auto dims = j.at("dims").get<std::vector<std::size_t>>();
    if (dims.size() != 4 || dims[3] != 3) throw IoError("bad dims for video " + std::to_string(p.video_id));
    p.frames = dims[0];
    p.height = dims[1];
    p.width = dims[2];
  }
  if (!params.empty()) {
    corpus.config.frames = params[0].frames;
    corpus.config.height = params[0].height;
    corpus.config.width = params[0].width;
    corpus.config.motion_speed = params[0].motion_speed;
  }
  parallel_for(params.size(), [&](std::size_t i) {
    const VideoParams& p = params[i];
    const auto file = dir / vids[i].value("file", video_file_name(p.video_id));
    std::error_code ec;
    if (std::filesystem::exists(file, ec)) {
      SyntheticVideo v;
      v.params = p;
      v.frames = io::bytes_to_floats(io::read_file(file));
      if (v.frames.size() != p.frames * p.height * p.width * 3)
        throw IoError("pixel file " + file.string() + " does not match manifest dims");
      if (p.frames < required_span)
        throw ConfigError("video " + std::to_string(p.video_id) + " shorter than required span");
      corpus.videos[i] = std::move(v);
    } else {
      corpus.videos[i] = generate_video(p, required_span);
    }
  });
  return corpus;
}

}  // namespace ascnet

#endif  // ASCNET_CORPUS_HPP_
