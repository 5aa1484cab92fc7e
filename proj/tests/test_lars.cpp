#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "ascnet/lars.hpp"

using namespace ascnet;

namespace {

Tensor param(Shape s, std::vector<float> v) { return Tensor(std::move(s), std::move(v), true); }

void step(Tensor& w, std::vector<float> grad, LarsState& state, const LarsHyper& h) {
  w.grad = std::move(grad);
  Tensor* ptrs[] = {&w};
  lars_step(ptrs, state, h);
}

}  // namespace

TEST(ScaledLr, LinearRule) {
  EXPECT_DOUBLE_EQ(scaled_lr(0.3, 128), 0.3);
  EXPECT_DOUBLE_EQ(scaled_lr(0.3, 512), 1.2);
  EXPECT_DOUBLE_EQ(scaled_lr(0.3, 16), 0.0375);
}

TEST(CosineLr, Endpoints) {
  EXPECT_DOUBLE_EQ(cosine_lr(0, 100, 0.2), 0.2);
  EXPECT_NEAR(cosine_lr(100, 100, 0.2), 0.002, 1e-15);
  EXPECT_NEAR(cosine_lr(50, 100, 0.2), 0.505 * 0.2, 1e-15);
  double prev = 1e9;
  for (std::size_t s = 0; s <= 100; ++s) {
    const double lr = cosine_lr(s, 100, 1.0);
    EXPECT_LE(lr, prev);
    prev = lr;
  }
}

TEST(Lars, SingleStepUnitTrust) {
  Tensor w = param({1, 2}, {1, 0});
  LarsState st;
  step(w, {1, 0}, st, LarsHyper{1.0, 0.0, 0.0, 1.0});
  EXPECT_NEAR(w.values[0], 0.0f, 1e-7f);
  EXPECT_NEAR(w.values[1], 0.0f, 1e-7f);
}

TEST(Lars, ZeroGradientIsFixedPoint) {
  Tensor w = param({2, 2}, {1, -2, 3, 0.5f});
  const auto before = w.values;
  LarsState st;
  for (int i = 0; i < 3; ++i) step(w, {0, 0, 0, 0}, st, LarsHyper{0.5, 0.9, 0.0, 0.001});
  EXPECT_EQ(w.values, before);
}

TEST(Lars, PureWeightDecay) {
  // g' = 0.1 * [3,4], |g'| = 0.5, |w| = 5, local = 0.5 * 5 / 0.5 = 5, step = 5 * 0.2 * g'.
  Tensor w = param({1, 2}, {3, 4});
  LarsState st;
  step(w, {0, 0}, st, LarsHyper{0.2, 0.0, 0.1, 0.5});
  EXPECT_NEAR(w.values[0], 2.7f, 1e-6f);
  EXPECT_NEAR(w.values[1], 3.6f, 1e-6f);
  EXPECT_NEAR(st.velocity[0][0], 0.3f, 1e-6f);
}

TEST(Lars, ThreeStepsWithMomentum) {
  Tensor w = param({1, 2}, {3, 4});
  LarsState st;
  const LarsHyper h{0.1, 0.9, 0.01, 0.5};
  step(w, {1, 0}, st, h);
  EXPECT_NEAR(w.values[0], 2.75018831, 1e-6);
  EXPECT_NEAR(w.values[1], 3.99029857, 1e-6);
  step(w, {0, 1}, st, h);
  EXPECT_NEAR(w.values[0], 2.51895170, 1e-6);
  EXPECT_NEAR(w.values[1], 3.73934011, 1e-6);
  step(w, {1, 1}, st, h);
  EXPECT_NEAR(w.values[0], 2.15238040, 1e-6);
  EXPECT_NEAR(w.values[1], 3.35313284, 1e-6);
}

TEST(Lars, BiasSkipsTrustAndDecay) {
  Tensor b = param({2}, {1, 2});
  LarsState st;
  step(b, {0.5f, 0.5f}, st, LarsHyper{0.1, 0.0, 0.1, 0.001});
  EXPECT_NEAR(b.values[0], 0.95f, 1e-6f);
  EXPECT_NEAR(b.values[1], 1.95f, 1e-6f);
  EXPECT_TRUE(lars_excluded(b));
  EXPECT_DOUBLE_EQ(lars_local_lr(b, b.grad, LarsHyper{}), 1.0);
}

TEST(Lars, UpdateDirectionInvariantToTensorScale) {
  std::mt19937_64 rng(3);
  std::normal_distribution<float> n01;
  for (float c : {0.01f, 0.5f, 7.0f, 300.0f}) {
    Tensor w = param({3, 4}, std::vector<float>(12)), ws = w;
    std::vector<float> g(12);
    for (std::size_t i = 0; i < 12; ++i) w.values[i] = n01(rng), g[i] = n01(rng);
    ws.values = w.values;
    std::vector<float> gs = g;
    for (std::size_t i = 0; i < 12; ++i) ws.values[i] *= c, gs[i] *= c;
    const auto w0 = w.values, ws0 = ws.values;
    LarsState a, b;
    const LarsHyper h{0.3, 0.0, 0.0, 0.001};
    step(w, g, a, h);
    step(ws, gs, b, h);
    double nw = 0, nws = 0;
    for (std::size_t i = 0; i < 12; ++i) nw += double(w0[i]) * w0[i], nws += double(ws0[i]) * ws0[i];
    for (std::size_t i = 0; i < 12; ++i)
      EXPECT_NEAR((w0[i] - w.values[i]) / std::sqrt(nw), (ws0[i] - ws.values[i]) / std::sqrt(nws), 1e-5) << c;
  }
}

TEST(Lars, NonFiniteGradientAbortsWithoutUpdate) {
  Tensor w = param({1, 2}, {1, 1}), v = param({1, 2}, {2, 2});
  w.grad = {0.1f, 0.1f};
  v.grad = {std::numeric_limits<float>::quiet_NaN(), 0.0f};
  LarsState st;
  Tensor* ptrs[] = {&w, &v};
  EXPECT_THROW(lars_step(ptrs, st, LarsHyper{}), NumericsError);
  EXPECT_EQ(w.values, (std::vector<float>{1, 1}));
  EXPECT_EQ(v.values, (std::vector<float>{2, 2}));
}

TEST(Lars, StateShapesTrackParameters) {
  Tensor w = param({2, 3}, std::vector<float>(6, 1.0f)), b = param({3}, {0, 0, 0});
  w.ensure_grad();
  b.ensure_grad();
  LarsState st;
  Tensor* ptrs[] = {&w, &b};
  lars_step(ptrs, st, LarsHyper{0.3, 0.9, 0.0, 0.001});
  ASSERT_EQ(st.velocity.size(), 2u);
  EXPECT_EQ(st.velocity[0], std::vector<float>(6, 0.0f));
  EXPECT_EQ(st.velocity[1].size(), 3u);
}

TEST(Lars, Deterministic) {
  auto run = [] {
    std::mt19937_64 rng(11);
    std::normal_distribution<float> n01;
    Tensor w = param({4, 4}, std::vector<float>(16));
    for (float& x : w.values) x = n01(rng);
    LarsState st;
    for (int s = 0; s < 10; ++s) {
      std::vector<float> g(16);
      for (float& x : g) x = n01(rng);
      step(w, g, st, LarsHyper{0.3, 0.9, 1e-6, 0.001});
    }
    return w.values;
  };
  EXPECT_EQ(run(), run());
}
