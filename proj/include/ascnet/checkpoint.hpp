#ifndef ASCNET_CHECKPOINT_HPP_
#define ASCNET_CHECKPOINT_HPP_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

#include "ascnet/binary_io.hpp"
#include "ascnet/errors.hpp"
#include "ascnet/model.hpp"
#include "ascnet/tensor.hpp"

namespace ascnet {

/**
 * Checkpoint container.
 *
 * Layout (all integers and floats little-endian):
 *   magic "ASCNETCK" | u32 version | string config_json |
 *   u64 blob_count | blob* | string meta_json
 * blob: string name | u32 rank | u64 dims[rank] | f32 values[prod(dims)]
 * string: u64 length | bytes
 */
struct Checkpoint {
  static constexpr char kMagic[8] = {'A', 'S', 'C', 'N', 'E', 'T', 'C', 'K'};
  static constexpr std::uint32_t kVersion = 1;

  nlohmann::ordered_json config;
  std::vector<std::pair<std::string, Tensor>> blobs;
  nlohmann::ordered_json meta = nlohmann::ordered_json::object();

  const Tensor* find(const std::string& name) const {
    for (const auto& [n, t] : blobs)
      if (n == name) return &t;
    return nullptr;
  }

  std::vector<char> serialize() const {
    io::Writer w;
    w.put_raw(kMagic, sizeof kMagic);
    w.put<std::uint32_t>(kVersion);
    w.put_string(config.dump());
    w.put<std::uint64_t>(blobs.size());
    for (const auto& [name, t] : blobs) {
      w.put_string(name);
      w.put<std::uint32_t>(static_cast<std::uint32_t>(t.rank()));
      for (std::size_t d : t.shape) w.put<std::uint64_t>(d);
      w.put_floats(t.values);
    }
    w.put_string(meta.dump());
    return w.bytes();
  }

  static Checkpoint deserialize(std::vector<char> bytes) {
    io::Reader r(std::move(bytes));
    if (r.get_raw(sizeof kMagic) != std::string(kMagic, sizeof kMagic)) throw IoError("not an ascnet checkpoint");
    const auto version = r.get<std::uint32_t>();
    if (version != kVersion) throw IoError("unsupported checkpoint version " + std::to_string(version));
    Checkpoint ck;
    try {
      ck.config = nlohmann::ordered_json::parse(r.get_string());
      const auto count = r.get<std::uint64_t>();
      for (std::uint64_t i = 0; i < count; ++i) {
        std::string name = r.get_string();
        const auto rank = r.get<std::uint32_t>();
        Shape shape(rank);
        for (auto& d : shape) d = r.get<std::uint64_t>();
        auto values = r.get_floats(shape_size(shape));
        ck.blobs.emplace_back(std::move(name), Tensor(std::move(shape), std::move(values)));
      }
      ck.meta = nlohmann::ordered_json::parse(r.get_string());
    } catch (const nlohmann::json::exception& e) {
      throw IoError(std::string("corrupt checkpoint json: ") + e.what());
    }
    if (!r.done()) throw IoError("trailing bytes in checkpoint");
    return ck;
  }

  void save(const std::filesystem::path& path) const { io::write_file(path, serialize()); }
  static Checkpoint load(const std::filesystem::path& path) { return deserialize(io::read_file(path)); }
};

inline void append_model(Checkpoint& ck, const ModelParams& params) {
  for (const auto& [name, t] : params.named()) ck.blobs.emplace_back("model/" + name, Tensor(t->shape, t->values));
}

/// Restores parameters for `config`; every blob must exist with the expected shape.
inline ModelParams model_from_checkpoint(const Checkpoint& ck, const EncoderConfig& config) {
  ModelParams params = init_params(config, 0);
  for (auto& [name, t] : params.named()) {
    const Tensor* blob = ck.find("model/" + name);
    if (!blob) throw ConfigError("checkpoint lacks parameter " + name);
    if (blob->shape != t->shape)
      throw ConfigError("checkpoint parameter " + name + " has shape " + shape_str(blob->shape) + ", config expects " +
                        shape_str(t->shape));
    t->values = blob->values;
  }
  return params;
}

}  // namespace ascnet

#endif  // ASCNET_CHECKPOINT_HPP_
