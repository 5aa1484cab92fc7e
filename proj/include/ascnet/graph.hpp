#ifndef ASCNET_GRAPH_HPP_
#define ASCNET_GRAPH_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ascnet/errors.hpp"
#include "ascnet/tensor.hpp"

namespace ascnet {

/// Handle to a node of a Graph.
struct Var {
  std::size_t id = 0;
};

using Stride3 = std::array<std::size_t, 3>;

/**
 * Reverse-mode tape.
 *
 * Nodes are appended in creation order, so inputs always precede their
 * consumers and a reverse sweep is a valid topological order. Parameters are
 * referenced, not copied: backward accumulates (+=) straight into the
 * referenced TensorT::grad, which the caller zeroes between steps.
 */
template <typename T>
class BasicGraph {
 public:
  using Scalar = T;
  using TensorT = BasicTensor<T>;

  BasicGraph() = default;
  BasicGraph(const BasicGraph&) = delete;
  BasicGraph& operator=(const BasicGraph&) = delete;

  /// Registers an external tensor. Gradients reach it only if t.requires_grad.
  Var parameter(TensorT& t) {
    Node n;
    n.external = &t;
    n.needs_grad = t.requires_grad;
    return push(std::move(n));
  }

  /// Owned constant input.
  Var input(TensorT t) {
    Node n;
    n.owned = std::move(t);
    return push(std::move(n));
  }

  const TensorT& value(Var v) const { return nodes_.at(v.id).value(); }
  const Shape& shape(Var v) const { return value(v).shape; }

  /// Gradient of the last backward() w.r.t. node v; empty when nothing flowed.
  std::span<const T> grad(Var v) const {
    const Node& n = nodes_.at(v.id);
    if (n.external) return n.external->grad;
    return n.grad;
  }

  /// Storage a parameter node reads from (nullptr for owned nodes).
  const TensorT* storage(Var v) const { return nodes_.at(v.id).external; }

  std::size_t size() const { return nodes_.size(); }

  // ---- elementwise ----

  Var add(Var a, Var b) { return binary(a, b, "add", [](T x, T y) { return x + y; }, T(1), T(1)); }
  Var sub(Var a, Var b) { return binary(a, b, "sub", [](T x, T y) { return x - y; }, T(1), -T(1)); }

  Var mul(Var a, Var b) {
    check_same(a, b, "mul");
    TensorT out(shape(a));
    const auto& av = value(a).values;
    const auto& bv = value(b).values;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * bv[i];
    return push_op(std::move(out), {a, b}, [a, b](BasicGraph& g, std::size_t self) {
      const auto& go = g.nodes_[self].grad;
      const auto& av = g.value(a).values;
      const auto& bv = g.value(b).values;
      if (g.needs(a)) {
        auto& ga = g.grad_buffer(a);
        for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * bv[i];
      }
      if (g.needs(b)) {
        auto& gb = g.grad_buffer(b);
        for (std::size_t i = 0; i < go.size(); ++i) gb[i] += go[i] * av[i];
      }
    });
  }

  Var scale(Var a, T s) {
    TensorT out(shape(a));
    const auto& av = value(a).values;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] * s;
    return push_op(std::move(out), {a}, [a, s](BasicGraph& g, std::size_t self) {
      const auto& go = g.nodes_[self].grad;
      auto& ga = g.grad_buffer(a);
      for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i] * s;
    });
  }

  Var add_scalar(Var a, T s) {
    TensorT out(shape(a));
    const auto& av = value(a).values;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] + s;
    return push_op(std::move(out), {a}, [a](BasicGraph& g, std::size_t self) {
      const auto& go = g.nodes_[self].grad;
      auto& ga = g.grad_buffer(a);
      for (std::size_t i = 0; i < go.size(); ++i) ga[i] += go[i];
    });
  }

  Var relu(Var a) {
    TensorT out(shape(a));
    const auto& av = value(a).values;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = av[i] > T(0) ? av[i] : T(0);
    return push_op(std::move(out), {a}, [a](BasicGraph& g, std::size_t self) {
      const auto& go = g.nodes_[self].grad;
      const auto& av = g.value(a).values;
      auto& ga = g.grad_buffer(a);
      for (std::size_t i = 0; i < go.size(); ++i)
        if (av[i] > T(0)) ga[i] += go[i];
    });
  }

  // ---- reductions ----

  Var sum(Var a) {
    double acc = 0.0;
    for (T v : value(a).values) acc += v;
    TensorT out(Shape{1}, static_cast<T>(acc));
    return push_op(std::move(out), {a}, [a](BasicGraph& g, std::size_t self) {
      const T go = g.nodes_[self].grad[0];
      for (T& x : g.grad_buffer(a)) x += go;
    });
  }

  Var mean(Var a) { return scale(sum(a), T(1) / static_cast<T>(value(a).size())); }

  /// Row-wise sum of a [N,D] tensor -> [N].
  Var row_sum(Var a) {
    require_rank(a, 2, "row_sum");
    const std::size_t rows = shape(a)[0], cols = shape(a)[1];
    TensorT out(Shape{rows});
    const auto& av = value(a).values;
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc += av[r * cols + c];
      out[r] = static_cast<T>(acc);
    }
    return push_op(std::move(out), {a}, [a, rows, cols](BasicGraph& g, std::size_t self) {
      const auto& go = g.nodes_[self].grad;
      auto& ga = g.grad_buffer(a);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) ga[r * cols + c] += go[r];
    });
  }

  // ---- linear algebra ----

  Var matmul(Var a, Var b) {
    require_rank(a, 2, "matmul lhs");
    require_rank(b, 2, "matmul rhs");
    const std::size_t m = shape(a)[0], k = shape(a)[1], n = shape(b)[1];
    if (shape(b)[0] != k)
      throw ShapeError("matmul " + shape_str(shape(a)) + " x " + shape_str(shape(b)));
    TensorT out(Shape{m, n});
    const auto& av = value(a).values;
    const auto& bv = value(b).values;
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t p = 0; p < k; ++p) {
        const T aip = av[i * k + p];
        const T* brow = &bv[p * n];
        T* orow = &out.values[i * n];
        for (std::size_t j = 0; j < n; ++j) orow[j] += aip * brow[j];
      }
    return push_op(std::move(out), {a, b}, [a, b, m, k, n](BasicGraph& g, std::size_t self) {
      const auto& go = g.nodes_[self].grad;
      const auto& av = g.value(a).values;
      const auto& bv = g.value(b).values;
      if (g.needs(a)) {
        auto& ga = g.grad_buffer(a);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            T acc = T(0);
            for (std::size_t j = 0; j < n; ++j) acc += go[i * n + j] * bv[p * n + j];
            ga[i * k + p] += acc;
          }
      }
      if (g.needs(b)) {
        auto& gb = g.grad_buffer(b);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t p = 0; p < k; ++p) {
            const T aip = av[i * k + p];
            for (std::size_t j = 0; j < n; ++j) gb[p * n + j] += aip * go[i * n + j];
          }
      }
    });
  }

  /// x[N,M] + bias[M] broadcast over rows (the affine half of a linear layer).
  Var add_bias(Var x, Var bias) {
    require_rank(x, 2, "add_bias");
    const std::size_t rows = shape(x)[0], cols = shape(x)[1];
    if (value(bias).size() != cols)
      throw ShapeError("bias " + shape_str(shape(bias)) + " for " + shape_str(shape(x)));
    TensorT out(shape(x));
    const auto& xv = value(x).values;
    const auto& bv = value(bias).values;
    for (std::size_t r = 0; r < rows; ++r)
      for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = xv[r * cols + c] + bv[c];
    return push_op(std::move(out), {x, bias}, [x, bias, rows, cols](BasicGraph& g, std::size_t self) {
      const auto& go = g.nodes_[self].grad;
      if (g.needs(x)) {
        auto& gx = g.grad_buffer(x);
        for (std::size_t i = 0; i < go.size(); ++i) gx[i] += go[i];
      }
      if (g.needs(bias)) {
        auto& gb = g.grad_buffer(bias);
        for (std::size_t r = 0; r < rows; ++r)
          for (std::size_t c = 0; c < cols; ++c) gb[c] += go[r * cols + c];
      }
    });
  }

  /**
   * Valid (unpadded) 3D cross-correlation.
   * input [N,C,T,H,W], kernel [K,C,t,h,w], bias [K] -> [N,K,T',H',W'] with
   * T' = (T - t) / sT + 1 and likewise for H', W'.
   */
  Var conv3d(Var input, Var kernel, Var bias, Stride3 stride) {
    require_rank(input, 5, "conv3d input");
    require_rank(kernel, 5, "conv3d kernel");
    const Shape& is = shape(input);
    const Shape& ks = shape(kernel);
    if (ks[1] != is[1])
      throw ShapeError("conv3d channels: input " + shape_str(is) + " kernel " + shape_str(ks));
    if (value(bias).size() != ks[0]) throw ShapeError("conv3d bias " + shape_str(shape(bias)));
    for (std::size_t s : stride)
      if (s == 0) throw ShapeError("conv3d stride must be >= 1");
    for (int d = 0; d < 3; ++d)
      if (ks[2 + d] > is[2 + d])
        throw ShapeError("conv3d kernel " + shape_str(ks) + " larger than input " + shape_str(is));

    const ConvGeom geo{is[0], is[1], is[2], is[3], is[4], ks[0], ks[2], ks[3], ks[4], stride};
    TensorT out(Shape{geo.n, geo.k, geo.ot(), geo.oh(), geo.ow()});
    conv_forward(geo, value(input).values, value(kernel).values, value(bias).values, out.values);
    return push_op(std::move(out), {input, kernel, bias}, [input, kernel, bias, geo](BasicGraph& g, std::size_t self) {
      conv_backward(geo, g.nodes_[self].grad, g.value(input).values, g.value(kernel).values,
                    g.needs(input) ? &g.grad_buffer(input) : nullptr,
                    g.needs(kernel) ? &g.grad_buffer(kernel) : nullptr,
                    g.needs(bias) ? &g.grad_buffer(bias) : nullptr);
    });
  }

  /// [N,K,T,H,W] -> [N,K], mean over the T*H*W positions.
  Var global_avg_pool(Var input) {
    require_rank(input, 5, "global_avg_pool");
    const Shape& s = shape(input);
    const std::size_t rows = s[0] * s[1];
    const std::size_t area = s[2] * s[3] * s[4];
    TensorT out(Shape{s[0], s[1]});
    const auto& iv = value(input).values;
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (std::size_t i = 0; i < area; ++i) acc += iv[r * area + i];
      out[r] = static_cast<T>(acc / static_cast<double>(area));
    }
    return push_op(std::move(out), {input}, [input, rows, area](BasicGraph& g, std::size_t self) {
      const auto& go = g.nodes_[self].grad;
      auto& gi = g.grad_buffer(input);
      const T inv = T(1) / static_cast<T>(area);
      for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t i = 0; i < area; ++i) gi[r * area + i] += go[r] * inv;
    });
  }

  /// Row-wise unit normalization of a [N,D] tensor.
  Var l2_normalize(Var v, double min_norm = 1e-8) {
    require_rank(v, 2, "l2_normalize");
    const std::size_t rows = shape(v)[0], cols = shape(v)[1];
    const auto& vv = value(v).values;
    TensorT out(shape(v));
    std::vector<T> norms(rows);
    for (std::size_t r = 0; r < rows; ++r) {
      double acc = 0.0;
      for (std::size_t c = 0; c < cols; ++c) acc += double(vv[r * cols + c]) * vv[r * cols + c];
      const double norm = std::sqrt(acc);
      if (!(norm >= min_norm))
        throw DegenerateFeatureError("row " + std::to_string(r) + " has norm " + std::to_string(norm));
      norms[r] = static_cast<T>(norm);
      for (std::size_t c = 0; c < cols; ++c)
        out[r * cols + c] = static_cast<T>(vv[r * cols + c] / norm);
    }
    return push_op(std::move(out), {v}, [v, rows, cols, norms = std::move(norms)](BasicGraph& g, std::size_t self) {
      const Node& me = g.nodes_[self];
      const auto& go = me.grad;
      const auto& y = me.owned.values;
      auto& gv = g.grad_buffer(v);
      // dx = (g - y <y, g>) / |x|
      for (std::size_t r = 0; r < rows; ++r) {
        double dot = 0.0;
        for (std::size_t c = 0; c < cols; ++c) dot += double(y[r * cols + c]) * go[r * cols + c];
        for (std::size_t c = 0; c < cols; ++c) {
          const std::size_t i = r * cols + c;
          gv[i] += static_cast<T>((go[i] - y[i] * dot) / norms[r]);
        }
      }
    });
  }

  /// Same values, no gradient path back to v.
  Var detach(Var v) { return input(TensorT(shape(v), value(v).values)); }

  /// Mean softmax cross-entropy of logits [N,M] against integer labels.
  Var softmax_cross_entropy(Var logits, std::vector<std::size_t> labels) {
    require_rank(logits, 2, "softmax_cross_entropy");
    const std::size_t rows = shape(logits)[0], cols = shape(logits)[1];
    if (labels.size() != rows)
      throw ShapeError("softmax_cross_entropy: " + std::to_string(labels.size()) + " labels for " +
                       std::to_string(rows) + " rows");
    for (std::size_t l : labels)
      if (l >= cols)
        throw LabelError("label " + std::to_string(l) + " outside [0," + std::to_string(cols) + ")");
    const auto& lv = value(logits).values;
    std::vector<T> probs(rows * cols);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      const T* row = &lv[r * cols];
      T mx = row[0];
      for (std::size_t c = 1; c < cols; ++c) mx = std::max(mx, row[c]);
      double z = 0.0;
      for (std::size_t c = 0; c < cols; ++c) z += std::exp(double(row[c]) - mx);
      for (std::size_t c = 0; c < cols; ++c)
        probs[r * cols + c] = static_cast<T>(std::exp(double(row[c]) - mx) / z);
      total += -(double(row[labels[r]]) - mx - std::log(z));
    }
    TensorT out(Shape{1}, static_cast<T>(total / static_cast<double>(rows)));
    return push_op(std::move(out), {logits},
                   [logits, rows, cols, labels = std::move(labels), probs = std::move(probs)](BasicGraph& g,
                                                                                              std::size_t self) {
                     const T go = g.nodes_[self].grad[0] / static_cast<T>(rows);
                     auto& gl = g.grad_buffer(logits);
                     for (std::size_t r = 0; r < rows; ++r)
                       for (std::size_t c = 0; c < cols; ++c) {
                         const T target = (c == labels[r]) ? T(1) : T(0);
                         gl[r * cols + c] += go * (probs[r * cols + c] - target);
                       }
                   });
  }

  // ---- shape plumbing ----

  /// Rows [begin, end) of the leading axis.
  Var slice_rows(Var a, std::size_t begin, std::size_t end) {
    const Shape& s = shape(a);
    if (s.empty() || begin >= end || end > s[0])
      throw ShapeError("slice_rows [" + std::to_string(begin) + "," + std::to_string(end) + ") of " + shape_str(s));
    const std::size_t stride = value(a).size() / s[0];
    Shape os = s;
    os[0] = end - begin;
    TensorT out(os);
    const auto& av = value(a).values;
    std::copy(av.begin() + begin * stride, av.begin() + end * stride, out.values.begin());
    return push_op(std::move(out), {a}, [a, begin, stride](BasicGraph& g, std::size_t self) {
      const auto& go = g.nodes_[self].grad;
      auto& ga = g.grad_buffer(a);
      for (std::size_t i = 0; i < go.size(); ++i) ga[begin * stride + i] += go[i];
    });
  }

  /**
   * Backpropagates from a scalar node. Each node is visited once, in reverse
   * creation order; parameter grads accumulate with +=.
   */
  void backward(Var loss) {
    Node& root = nodes_.at(loss.id);
    if (root.value().size() != 1)
      throw ShapeError("backward needs a scalar loss, got " + shape_str(root.value().shape));
    for (Node& n : nodes_)
      if (!n.external) n.grad.clear();
    if (!root.needs_grad) return;
    grad_buffer(loss)[0] += T(1);
    for (std::size_t i = loss.id + 1; i-- > 0;) {
      Node& n = nodes_[i];
      if (!n.needs_grad || !n.backward_fn) continue;
      if (n.grad.empty()) continue;  // nothing downstream reached it
      n.backward_fn(*this, i);
    }
  }

 private:
  struct Node {
    TensorT owned;
    TensorT* external = nullptr;
    std::vector<T> grad;
    bool needs_grad = false;
    std::vector<std::size_t> inputs;
    std::function<void(BasicGraph&, std::size_t)> backward_fn;

    const TensorT& value() const { return external ? *external : owned; }
  };

  struct ConvGeom {
    std::size_t n, c, t, h, w, k, kt, kh, kw;
    Stride3 s;
    std::size_t ot() const { return (t - kt) / s[0] + 1; }
    std::size_t oh() const { return (h - kh) / s[1] + 1; }
    std::size_t ow() const { return (w - kw) / s[2] + 1; }
  };

  static void conv_forward(const ConvGeom& g, const std::vector<T>& in, const std::vector<T>& ker,
                           const std::vector<T>& bias, std::vector<T>& out) {
    const std::size_t OT = g.ot(), OH = g.oh(), OW = g.ow();
    const std::size_t in_plane = g.h * g.w, in_vol = g.t * in_plane;
    const std::size_t out_plane = OH * OW, out_vol = OT * out_plane;
    for (std::size_t n = 0; n < g.n; ++n)
      for (std::size_t k = 0; k < g.k; ++k) {
        T* o = &out[(n * g.k + k) * out_vol];
        std::fill(o, o + out_vol, bias[k]);
        for (std::size_t c = 0; c < g.c; ++c) {
          const T* src = &in[(n * g.c + c) * in_vol];
          const T* kc = &ker[((k * g.c + c) * g.kt) * g.kh * g.kw];
          for (std::size_t dt = 0; dt < g.kt; ++dt)
            for (std::size_t dh = 0; dh < g.kh; ++dh)
              for (std::size_t dw = 0; dw < g.kw; ++dw) {
                const T wv = kc[(dt * g.kh + dh) * g.kw + dw];
                for (std::size_t ot = 0; ot < OT; ++ot)
                  for (std::size_t oh = 0; oh < OH; ++oh) {
                    const T* row = src + (ot * g.s[0] + dt) * in_plane + (oh * g.s[1] + dh) * g.w + dw;
                    T* orow = o + ot * out_plane + oh * OW;
                    for (std::size_t ow = 0; ow < OW; ++ow) orow[ow] += wv * row[ow * g.s[2]];
                  }
              }
        }
      }
  }

  static void conv_backward(const ConvGeom& g, const std::vector<T>& go, const std::vector<T>& in,
                            const std::vector<T>& ker, std::vector<T>* gin, std::vector<T>* gker,
                            std::vector<T>* gbias) {
    const std::size_t OT = g.ot(), OH = g.oh(), OW = g.ow();
    const std::size_t in_plane = g.h * g.w, in_vol = g.t * in_plane;
    const std::size_t out_plane = OH * OW, out_vol = OT * out_plane;
    for (std::size_t n = 0; n < g.n; ++n)
      for (std::size_t k = 0; k < g.k; ++k) {
        const T* o = &go[(n * g.k + k) * out_vol];
        if (gbias) {
          double acc = 0.0;
          for (std::size_t i = 0; i < out_vol; ++i) acc += o[i];
          (*gbias)[k] += static_cast<T>(acc);
        }
        for (std::size_t c = 0; c < g.c; ++c) {
          const std::size_t in_off = (n * g.c + c) * in_vol;
          const std::size_t k_off = ((k * g.c + c) * g.kt) * g.kh * g.kw;
          for (std::size_t dt = 0; dt < g.kt; ++dt)
            for (std::size_t dh = 0; dh < g.kh; ++dh)
              for (std::size_t dw = 0; dw < g.kw; ++dw) {
                const std::size_t ki = k_off + (dt * g.kh + dh) * g.kw + dw;
                const T wv = ker[ki];
                T wacc = T(0);
                for (std::size_t ot = 0; ot < OT; ++ot)
                  for (std::size_t oh = 0; oh < OH; ++oh) {
                    const std::size_t base = in_off + (ot * g.s[0] + dt) * in_plane + (oh * g.s[1] + dh) * g.w + dw;
                    const T* orow = o + ot * out_plane + oh * OW;
                    if (gker) {
                      const T* row = &in[base];
                      for (std::size_t ow = 0; ow < OW; ++ow) wacc += orow[ow] * row[ow * g.s[2]];
                    }
                    if (gin) {
                      T* grow = &(*gin)[base];
                      for (std::size_t ow = 0; ow < OW; ++ow) grow[ow * g.s[2]] += wv * orow[ow];
                    }
                  }
                if (gker) (*gker)[ki] += wacc;
              }
        }
      }
  }

  Var push(Node n) {
    nodes_.push_back(std::move(n));
    return Var{nodes_.size() - 1};
  }

  Var push_op(TensorT out, std::initializer_list<Var> inputs, std::function<void(BasicGraph&, std::size_t)> fn) {
    Node n;
    n.owned = std::move(out);
    for (Var v : inputs) {
      n.inputs.push_back(v.id);
      n.needs_grad = n.needs_grad || nodes_[v.id].needs_grad;
    }
    if (n.needs_grad) n.backward_fn = std::move(fn);
    return push(std::move(n));
  }

  bool needs(Var v) const { return nodes_[v.id].needs_grad; }

  std::vector<T>& grad_buffer(Var v) {
    Node& n = nodes_[v.id];
    if (n.external) {
      n.external->ensure_grad();
      return n.external->grad;
    }
    if (n.grad.size() != n.owned.size()) n.grad.assign(n.owned.size(), T(0));
    return n.grad;
  }

  void require_rank(Var v, std::size_t rank, const char* op) const {
    if (shape(v).size() != rank)
      throw ShapeError(std::string(op) + " expects rank " + std::to_string(rank) + ", got " + shape_str(shape(v)));
  }

  void check_same(Var a, Var b, const char* op) const {
    if (shape(a) != shape(b))
      throw ShapeError(std::string(op) + " " + shape_str(shape(a)) + " vs " + shape_str(shape(b)));
  }

  template <typename F>
  Var binary(Var a, Var b, const char* op, F f, T da, T db) {
    check_same(a, b, op);
    TensorT out(shape(a));
    const auto& av = value(a).values;
    const auto& bv = value(b).values;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = f(av[i], bv[i]);
    return push_op(std::move(out), {a, b}, [a, b, da, db](BasicGraph& g, std::size_t self) {
      const auto& go = g.nodes_[self].grad;
      if (g.needs(a)) {
        auto& ga = g.grad_buffer(a);
        for (std::size_t i = 0; i < go.size(); ++i) ga[i] += da * go[i];
      }
      if (g.needs(b)) {
        auto& gb = g.grad_buffer(b);
        for (std::size_t i = 0; i < go.size(); ++i) gb[i] += db * go[i];
      }
    });
  }

  std::vector<Node> nodes_;
};

using Graph = BasicGraph<float>;
using Graph64 = BasicGraph<double>;

}  // namespace ascnet

#endif  // ASCNET_GRAPH_HPP_
