#ifndef ASCNET_OBJECTIVES_HPP_
#define ASCNET_OBJECTIVES_HPP_

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "ascnet/checkpoint.hpp"
#include "ascnet/errors.hpp"
#include "ascnet/graph.hpp"

namespace ascnet {

// ---------------------------------------------------------------------------
// Consistency losses
// ---------------------------------------------------------------------------

/// Mean over rows of |pred - target|^2. For unit rows this is 2 - 2 cos.
template <typename T>
Var squared_distance_loss(BasicGraph<T>& g, Var pred, Var target) {
  if (g.shape(pred) != g.shape(target) || g.shape(pred).size() != 2)
    throw ShapeError("consistency loss " + shape_str(g.shape(pred)) + " vs " + shape_str(g.shape(target)));
  const Var d = g.sub(pred, target);
  return g.scale(g.sum(g.mul(d, d)), T(1) / static_cast<T>(g.shape(pred)[0]));
}

/// Appearance consistency: prediction a_i' against the (detached) target a_j.
template <typename T>
Var acp_loss(BasicGraph<T>& g, Var a_pred, Var a_target) { return squared_distance_loss(g, a_pred, a_target); }

/// Speed consistency: prediction m_i' against the (detached) target m_k.
template <typename T>
Var scp_loss(BasicGraph<T>& g, Var m_pred, Var m_target) { return squared_distance_loss(g, m_pred, m_target); }

inline void check_gamma(double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0,1], got " + std::to_string(gamma));
}

/// gamma * l_m + (1 - gamma) * l_a
inline double combined_loss(double l_a, double l_m, double gamma) {
  check_gamma(gamma);
  return gamma * l_m + (1.0 - gamma) * l_a;
}

template <typename T>
Var combined_loss(BasicGraph<T>& g, Var l_a, Var l_m, T gamma) {
  check_gamma(gamma);
  return g.add(g.scale(l_m, gamma), g.scale(l_a, T(1) - gamma));
}

/// Speed-prediction baseline: mean softmax cross-entropy over the speed classes.
template <typename T>
Var sp_loss(BasicGraph<T>& g, Var logits, std::vector<std::size_t> speed_labels) {
  return g.softmax_cross_entropy(logits, std::move(speed_labels));
}

struct LossBreakdown {
  double l_a = 0.0;
  double l_m = 0.0;
  std::optional<double> l_sp;
  double total = 0.0;
  double gamma = 0.5;
};

// ---------------------------------------------------------------------------
// Memory bank
// ---------------------------------------------------------------------------

struct FeatureRecord {
  std::vector<float> vector;
  std::int64_t video_id = 0;
  std::uint64_t insert_step = 0;
};

inline double dot(std::span<const float> a, std::span<const float> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += double(a[i]) * double(b[i]);
  return acc;
}

inline constexpr double kUnitTolerance = 1e-5;

inline bool is_unit(std::span<const float> v, double tol = kUnitTolerance) {
  return std::abs(std::sqrt(dot(v, v)) - 1.0) <= tol;
}

/// Fixed-capacity FIFO ring of appearance features tagged with their video.
class MemoryBank {
 public:
  MemoryBank(std::size_t capacity, std::size_t dim) : capacity_(capacity), dim_(dim) {
    if (capacity == 0) throw ConfigError("memory bank capacity must be positive");
    if (dim == 0) throw ConfigError("memory bank dim must be positive");
    ring_.reserve(capacity);
  }

  std::size_t capacity() const { return capacity_; }
  std::size_t dim() const { return dim_; }
  std::size_t count() const { return ring_.size(); }
  std::size_t cursor() const { return cursor_; }
  std::uint64_t total_inserts() const { return total_inserts_; }
  bool full() const { return ring_.size() == capacity_; }

  /// Slot order, not insertion order.
  const std::vector<FeatureRecord>& records() const { return ring_; }

  /// Once full, overwrites the oldest record.
  void insert(FeatureRecord record) {
    if (record.vector.size() != dim_)
      throw ShapeError("bank record of width " + std::to_string(record.vector.size()) + ", bank dim " +
                       std::to_string(dim_));
    if (!is_unit(record.vector)) throw DegenerateFeatureError("bank records must be unit vectors");
    if (ring_.size() < capacity_)
      ring_.push_back(std::move(record));
    else
      ring_[cursor_] = std::move(record);
    cursor_ = (cursor_ + 1) % capacity_;
    ++total_inserts_;
  }

  /// Record with the largest dot product against `query` among those from
  /// other videos; ties go to the oldest insert_step.
  const FeatureRecord& retrieve_similar(std::span<const float> query, std::int64_t exclude_video_id) const {
    if (query.size() != dim_) throw ShapeError("query width does not match bank dim");
    const FeatureRecord* best = nullptr;
    double best_dot = 0.0;
    for (const FeatureRecord& r : ring_) {
      if (r.video_id == exclude_video_id) continue;
      const double d = dot(query, r.vector);
      if (!best || d > best_dot || (d == best_dot && r.insert_step < best->insert_step)) {
        best = &r;
        best_dot = d;
      }
    }
    if (!best)
      throw NoCandidateError("bank holds no record outside video " + std::to_string(exclude_video_id));
    return *best;
  }

  bool has_candidate(std::int64_t exclude_video_id) const {
    for (const FeatureRecord& r : ring_)
      if (r.video_id != exclude_video_id) return true;
    return false;
  }

  /// Adds "<prefix>vectors" as a blob and returns the bookkeeping as json.
  nlohmann::ordered_json dump(Checkpoint& ck, const std::string& prefix) const {
    if (!ring_.empty()) {
      Tensor vectors(Shape{ring_.size(), dim_});
      for (std::size_t i = 0; i < ring_.size(); ++i)
        std::copy(ring_[i].vector.begin(), ring_[i].vector.end(), vectors.values.begin() + i * dim_);
      ck.blobs.emplace_back(prefix + "vectors", std::move(vectors));
    }
    nlohmann::ordered_json j;
    j["capacity"] = capacity_;
    j["dim"] = dim_;
    j["cursor"] = cursor_;
    j["total_inserts"] = total_inserts_;
    std::vector<std::int64_t> ids;
    std::vector<std::uint64_t> steps;
    for (const auto& r : ring_) {
      ids.push_back(r.video_id);
      steps.push_back(r.insert_step);
    }
    j["video_ids"] = ids;
    j["insert_steps"] = steps;
    return j;
  }

  static MemoryBank restore(const Checkpoint& ck, const std::string& prefix, const nlohmann::json& j) {
    MemoryBank bank(j.at("capacity").get<std::size_t>(), j.at("dim").get<std::size_t>());
    const auto ids = j.at("video_ids").get<std::vector<std::int64_t>>();
    const auto steps = j.at("insert_steps").get<std::vector<std::uint64_t>>();
    if (ids.size() != steps.size() || ids.size() > bank.capacity_) throw IoError("inconsistent bank metadata");
    if (!ids.empty()) {
      const Tensor* vectors = ck.find(prefix + "vectors");
      if (!vectors || vectors->shape != Shape{ids.size(), bank.dim_}) throw IoError("bank vectors missing or misshapen");
      for (std::size_t i = 0; i < ids.size(); ++i) {
        FeatureRecord r;
        r.vector.assign(vectors->values.begin() + i * bank.dim_, vectors->values.begin() + (i + 1) * bank.dim_);
        r.video_id = ids[i];
        r.insert_step = steps[i];
        bank.ring_.push_back(std::move(r));
      }
    }
    bank.cursor_ = j.at("cursor").get<std::size_t>();
    bank.total_inserts_ = j.at("total_inserts").get<std::uint64_t>();
    return bank;
  }

 private:
  std::size_t capacity_;
  std::size_t dim_;
  std::vector<FeatureRecord> ring_;
  std::size_t cursor_ = 0;
  std::uint64_t total_inserts_ = 0;
};

inline void bank_insert(MemoryBank& bank, FeatureRecord record) { bank.insert(std::move(record)); }

inline const FeatureRecord& retrieve_similar(std::span<const float> query, const MemoryBank& bank,
                                             std::int64_t exclude_video_id) {
  return bank.retrieve_similar(query, exclude_video_id);
}

}  // namespace ascnet

#endif  // ASCNET_OBJECTIVES_HPP_
