#ifndef ASCNET_BINARY_IO_HPP_
#define ASCNET_BINARY_IO_HPP_

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "ascnet/errors.hpp"

namespace ascnet::io {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
T to_little(T v) {
  if constexpr (std::endian::native == std::endian::big) {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &v, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&v, b, sizeof(T));
  }
  return v;
}

/// Append-only little-endian encoder.
class Writer {
 public:
  template <typename T>
  void put(T v) {
    v = to_little(v);
    const auto* p = reinterpret_cast<const char*>(&v);
    buf_.insert(buf_.end(), p, p + sizeof(T));
  }
  void put_string(const std::string& s) {
    put<std::uint64_t>(s.size());
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void put_floats(std::span<const float> v) {
    for (float f : v) put(f);
  }
  void put_raw(const char* p, std::size_t n) { buf_.insert(buf_.end(), p, p + n); }
  const std::vector<char>& bytes() const { return buf_; }

 private:
  std::vector<char> buf_;
};

class Reader {
 public:
  explicit Reader(std::vector<char> bytes) : buf_(std::move(bytes)) {}

  template <typename T>
  T get() {
    need(sizeof(T));
    T v;
    std::memcpy(&v, buf_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return to_little(v);
  }
  std::string get_string() {
    const auto n = get<std::uint64_t>();
    need(n);
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  std::vector<float> get_floats(std::size_t n) {
    std::vector<float> v(n);
    for (float& f : v) f = get<float>();
    return v;
  }
  std::string get_raw(std::size_t n) {
    need(n);
    std::string s(buf_.data() + pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == buf_.size(); }

 private:
  void need(std::size_t n) const {
    if (pos_ + n > buf_.size()) throw IoError("truncated binary data");
  }
  std::vector<char> buf_;
  std::size_t pos_ = 0;
};

inline std::vector<char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return std::vector<char>(std::istreambuf_iterator<char>(in), {});
}

inline void write_file(const std::filesystem::path& path, const std::vector<char>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for " + path.string());
}

/// Writes only when content differs, so reruns leave files byte-unchanged.
inline bool write_file_if_changed(const std::filesystem::path& path, const std::vector<char>& bytes) {
  std::error_code ec;
  if (std::filesystem::exists(path, ec) && std::filesystem::file_size(path, ec) == bytes.size()) {
    if (read_file(path) == bytes) return false;
  }
  write_file(path, bytes);
  return true;
}

inline std::vector<char> floats_to_bytes(std::span<const float> v) {
  Writer w;
  w.put_floats(v);
  return w.bytes();
}

inline std::vector<float> bytes_to_floats(std::vector<char> bytes) {
  if (bytes.size() % sizeof(float) != 0) throw IoError("raw float file size not a multiple of 4");
  const std::size_t n = bytes.size() / sizeof(float);
  Reader r(std::move(bytes));
  return r.get_floats(n);
}

}  // namespace ascnet::io

#endif  // ASCNET_BINARY_IO_HPP_
