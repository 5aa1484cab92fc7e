#ifndef ASCNET_LARS_HPP_
#define ASCNET_LARS_HPP_

#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "ascnet/errors.hpp"
#include "ascnet/tensor.hpp"

namespace ascnet {

/// Linear scaling rule: base_lr * batch / 128.
inline double scaled_lr(double base_lr, std::size_t batch_size) {
  return base_lr * static_cast<double>(batch_size) / 128.0;
}

/// Cosine annealing from base down to 0.01 * base at total_steps.
inline double cosine_lr(std::size_t step, std::size_t total_steps, double base) {
  if (total_steps == 0) return base;
  const double progress = static_cast<double>(std::min(step, total_steps)) / static_cast<double>(total_steps);
  return base * (0.01 + 0.99 * 0.5 * (1.0 + std::cos(std::numbers::pi * progress)));
}

struct LarsHyper {
  double lr = 0.3;
  double momentum = 0.9;
  double weight_decay = 1e-6;
  double trust_coefficient = 0.001;
};

/// One momentum buffer per parameter tensor, zero-initialized.
struct LarsState {
  std::vector<std::vector<float>> velocity;

  void ensure(std::span<Tensor* const> params) {
    if (velocity.size() != params.size()) velocity.assign(params.size(), {});
    for (std::size_t i = 0; i < params.size(); ++i)
      if (velocity[i].size() != params[i]->size()) velocity[i].assign(params[i]->size(), 0.0f);
  }
};

/// Rank-1 tensors (biases) skip weight decay and trust scaling.
inline bool lars_excluded(const Tensor& t) { return t.rank() <= 1; }

/// Per-tensor trust ratio eta * |w| / |g + wd w|, or 1 when either norm is zero
/// or the tensor is excluded.
inline double lars_local_lr(const Tensor& w, std::span<const float> grad, const LarsHyper& h) {
  if (lars_excluded(w)) return 1.0;
  double wn = 0.0, gn = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double g = double(grad[i]) + h.weight_decay * w.values[i];
    wn += double(w.values[i]) * w.values[i];
    gn += g * g;
  }
  wn = std::sqrt(wn);
  gn = std::sqrt(gn);
  return (wn > 0.0 && gn > 0.0) ? h.trust_coefficient * wn / gn : 1.0;
}

/**
 * LARS update, per tensor:
 *   g' = grad + wd * w
 *   v  = momentum * v + local_lr * lr * g'
 *   w  = w - v
 * Throws NumericsError before touching anything if a gradient is not finite.
 */
inline void lars_step(std::span<Tensor* const> params, LarsState& state, const LarsHyper& h) {
  for (const Tensor* p : params) {
    if (p->grad.size() != p->size()) continue;
    for (float g : p->grad)
      if (!std::isfinite(g)) throw NumericsError("non-finite gradient");
  }
  state.ensure(params);
  for (std::size_t i = 0; i < params.size(); ++i) {
    Tensor& w = *params[i];
    if (w.grad.size() != w.size()) w.ensure_grad();
    const double wd = lars_excluded(w) ? 0.0 : h.weight_decay;
    const double local = lars_local_lr(w, w.grad, LarsHyper{h.lr, h.momentum, wd, h.trust_coefficient});
    auto& v = state.velocity[i];
    for (std::size_t k = 0; k < w.size(); ++k) {
      const double g = double(w.grad[k]) + wd * w.values[k];
      v[k] = static_cast<float>(h.momentum * v[k] + local * h.lr * g);
      w.values[k] -= v[k];
    }
  }
}

}  // namespace ascnet

#endif  // ASCNET_LARS_HPP_
