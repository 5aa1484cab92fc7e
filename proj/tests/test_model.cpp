#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <string>
#include <random>
#include <set>

#include "ascnet/checkpoint.hpp"
#include "ascnet/model.hpp"
#include "ascnet/objectives.hpp"
#include "ascnet/pretrainer.hpp"
#include "gradcheck.hpp"

using namespace ascnet;
using gradcheck::all_tensors;
using gradcheck::fd_params;
using gradcheck::random_tensor;

namespace {

Tensor random_clips(const EncoderConfig& c, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> u(0.0f, 1.0f);
  Tensor t(Shape{n, c.in_channels, c.clip_frames, c.clip_height, c.clip_width});
  for (float& v : t.values) v = u(rng);
  return t;
}

// x W + b then row normalization, by loops.
std::vector<double> affine_normalized(const std::vector<float>& x, std::size_t n, const Linear& l) {
  const std::size_t in = l.weight.dim(0), out = l.weight.dim(1);
  std::vector<double> y(n * out);
  for (std::size_t r = 0; r < n; ++r) {
    double norm = 0;
    for (std::size_t o = 0; o < out; ++o) {
      double acc = l.bias.values[o];
      for (std::size_t i = 0; i < in; ++i) acc += double(x[r * in + i]) * l.weight.values[i * out + o];
      y[r * out + o] = acc;
      norm += acc * acc;
    }
    for (std::size_t o = 0; o < out; ++o) y[r * out + o] /= std::sqrt(norm);
  }
  return y;
}

// Gradients of `real` (which detaches its targets) must equal the finite
// differences of `frozen`, where those targets are constants fixed at the
// current parameters.
void expect_detached_grad(ModelParams64& p, const std::function<Var(Graph64&)>& real,
                          const std::function<Var(Graph64&)>& frozen, const std::string& label) {
  p.set_requires_grad(true);
  p.zero_grad();
  {
    Graph64 g;
    g.backward(real(g));
  }
  std::vector<std::vector<double>> analytic;
  for (auto* t : all_tensors(p)) {
    t->ensure_grad();
    analytic.push_back(t->grad);
  }
  const auto r = gradcheck::check(all_tensors(p), frozen);
  EXPECT_TRUE(r.ok()) << label << ": " << r.describe();
  const auto tensors = all_tensors(p);
  for (std::size_t i = 0; i < tensors.size(); ++i)
    for (std::size_t k = 0; k < analytic[i].size(); ++k)
      ASSERT_NEAR(analytic[i][k], tensors[i]->grad[k], 1e-12) << label;
}

}  // namespace

TEST(InitParams, DeterministicPerSeed) {
  const EncoderConfig cfg;
  const ModelParams a = init_params(cfg, 5), b = init_params(cfg, 5), c = init_params(cfg, 6);
  const auto na = a.named(), nb = b.named(), nc = c.named();
  ASSERT_EQ(na.size(), nb.size());
  bool any_diff = false;
  for (std::size_t i = 0; i < na.size(); ++i) {
    EXPECT_EQ(na[i].first, nb[i].first);
    EXPECT_EQ(na[i].second->values, nb[i].second->values) << na[i].first;
    any_diff |= na[i].second->values != nc[i].second->values;
  }
  EXPECT_TRUE(any_diff);
}

TEST(InitParams, BiasesZero) {
  const ModelParams p = init_params(EncoderConfig{}, 1);
  for (const auto& [name, t] : p.named())
    if (t->rank() == 1)
      for (float v : t->values) ASSERT_EQ(v, 0.0f) << name;
}

TEST(InitParams, WeightStdMatchesFanIn) {
  const ModelParams p = init_params(EncoderConfig{}, 3);
  const Tensor& k = p.encoder[2].kernel;  // 32 x 16 x 3 x 3 x 3
  ASSERT_GE(k.size(), 10000u);
  double sum = 0, sq = 0;
  for (std::size_t i = 0; i < 10000; ++i) sum += k.values[i], sq += double(k.values[i]) * k.values[i];
  const double mean = sum / 10000, sd = std::sqrt(sq / 10000 - mean * mean);
  const double expected = std::sqrt(2.0 / (16 * 27));
  EXPECT_NEAR(sd, expected, 0.2 * expected);
}

TEST(InitParams, EncoderUnderParameterBudget) {
  EXPECT_LT(init_params(EncoderConfig{}, 0).encoder_parameter_count(), 100000u);
}

TEST(InitParams, CollapsingStrideRejected) {
  EncoderConfig cfg;
  cfg.strides = {{2, 2, 2}, {2, 2, 2}, {2, 2, 2}};
  EXPECT_THROW(init_params(cfg, 0), ConfigError);
  cfg = EncoderConfig{};
  cfg.kernels.pop_back();
  EXPECT_THROW(init_params(cfg, 0), ConfigError);
}

TEST(InitParams, HeadsDoNotShareStorage) {
  ModelParams p = init_params(EncoderConfig{}, 0);
  std::set<const float*> seen;
  for (auto& [name, t] : p.named()) EXPECT_TRUE(seen.insert(t->values.data()).second) << name;
  EXPECT_NE(p.proj_appearance.weight.values, p.proj_speed.weight.values);
  EXPECT_NE(p.pred_appearance.weight.values, p.pred_speed.weight.values);
}

TEST(Encode, DefaultShape) {
  ModelParams p = init_params(EncoderConfig{}, 0);
  Graph g;
  const Var x = encode(g, g.input(random_clips(p.config, 2, 1)), p);
  EXPECT_EQ(g.shape(x), (Shape{2, 32}));
}

TEST(Encode, ZeroInputGivesZeroFeatures) {
  ModelParams p = init_params(EncoderConfig{}, 0);
  Graph g;
  const Var x = encode(g, g.input(Tensor(Shape{2, 3, 8, 32, 32})), p);
  for (float v : g.value(x).values) EXPECT_EQ(v, 0.0f);
}

TEST(Encode, ShapeMismatchRejected) {
  ModelParams p = init_params(EncoderConfig{}, 0);
  Graph g;
  EXPECT_THROW(encode(g, g.input(Tensor(Shape{2, 3, 8, 32, 31})), p), ShapeError);
  EXPECT_THROW(encode(g, g.input(Tensor(Shape{2, 3, 8, 32 * 32})), p), ShapeError);
}

TEST(Encode, PermutationEquivariant) {
  ModelParams p = init_params(EncoderConfig{}, 4);
  const Tensor clips = random_clips(p.config, 3, 9);
  const std::size_t per = clips.size() / 3;
  const std::vector<std::size_t> perm{2, 0, 1};
  Tensor permuted(clips.shape);
  for (std::size_t r = 0; r < 3; ++r)
    std::copy_n(clips.values.begin() + perm[r] * per, per, permuted.values.begin() + r * per);
  Graph g;
  const auto a = g.value(encode(g, g.input(clips), p)).values;
  const auto b = g.value(encode(g, g.input(permuted), p)).values;
  const std::size_t D = p.config.feature_dim();
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t d = 0; d < D; ++d) EXPECT_FLOAT_EQ(b[r * D + d], a[perm[r] * D + d]);
}

TEST(Encode, SharedParametersAccumulateAcrossCalls) {
  // Two encodes in one graph read the same tensors, so gradients sum.
  ModelParams p = init_params(EncoderConfig{}, 2);
  const Tensor c1 = random_clips(p.config, 2, 1), c2 = random_clips(p.config, 2, 2);
  auto grad_of = [&](std::vector<const Tensor*> inputs) {
    p.zero_grad();
    Graph g;
    Var total;
    bool first = true;
    for (const Tensor* in : inputs) {
      const Var m = g.mean(encode(g, g.input(*in), p));
      total = first ? m : g.add(total, m);
      first = false;
    }
    g.backward(total);
    return p.encoder[0].kernel.grad;
  };
  const auto g1 = grad_of({&c1}), g2 = grad_of({&c2}), both = grad_of({&c1, &c2});
  for (std::size_t i = 0; i < both.size(); ++i) EXPECT_NEAR(both[i], g1[i] + g2[i], 1e-6f);

  Graph g;
  const Var k1 = g.parameter(p.encoder[0].kernel), k2 = g.parameter(p.encoder[0].kernel);
  EXPECT_EQ(g.storage(k1), &p.encoder[0].kernel);
  EXPECT_EQ(g.storage(k2), &p.encoder[0].kernel);
}

TEST(Encode, GradientMatchesFiniteDifferences) {
  for (int seed = 0; seed < 20; ++seed) {
    ModelParams64 p = fd_params(gradcheck::small_encoder(), seed);
    std::mt19937_64 rng(500 + seed);
    const Tensor64 clips = gradcheck::random_clips(p.config, 2, rng);
    std::vector<Tensor64*> enc;
    for (auto& s : p.encoder) enc.insert(enc.end(), {&s.kernel, &s.bias});
    const auto r = gradcheck::check(enc, [&](Graph64& g) { return g.mean(encode(g, g.input(clips), p)); });
    EXPECT_TRUE(r.ok()) << "seed " << seed << ": " << r.describe();
  }
}

TEST(Project, UnitRowsAndMatmulOracle) {
  ModelParams p = init_params(EncoderConfig{}, 1);
  std::mt19937_64 rng(3);
  std::normal_distribution<float> n01;
  Tensor x(Shape{5, 32});
  for (float& v : x.values) v = n01(rng);
  for (Head h : {Head::appearance, Head::speed}) {
    Graph g;
    const auto out = g.value(project(g, g.input(x), h, p)).values;
    const auto oracle = affine_normalized(x.values, 5, p.projection(h));
    for (std::size_t r = 0; r < 5; ++r) {
      double norm = 0;
      for (std::size_t o = 0; o < 256; ++o) norm += double(out[r * 256 + o]) * out[r * 256 + o];
      EXPECT_NEAR(std::sqrt(norm), 1.0, 1e-5);
    }
    for (std::size_t i = 0; i < out.size(); ++i) EXPECT_NEAR(out[i], oracle[i], 1e-5);
  }
}

TEST(Project, HeadsDiffer) {
  ModelParams p = init_params(EncoderConfig{}, 1);
  Tensor x(Shape{1, 32}, 0.5f);
  Graph g;
  EXPECT_NE(g.value(project(g, g.input(x), Head::appearance, p)).values,
            g.value(project(g, g.input(x), Head::speed, p)).values);
}

TEST(Project, WrongWidthRejected) {
  ModelParams p = init_params(EncoderConfig{}, 1);
  Graph g;
  EXPECT_THROW(project(g, g.input(Tensor(Shape{1, 31})), Head::speed, p), ShapeError);
  EXPECT_THROW(predict(g, g.input(Tensor(Shape{1, 32})), Head::speed, p), ShapeError);
  EXPECT_THROW(speed_logits(g, g.input(Tensor(Shape{1, 256})), p), ShapeError);
}

TEST(Project, ZeroOutputIsDegenerate) {
  ModelParams p = init_params(EncoderConfig{}, 1);
  std::fill(p.proj_speed.weight.values.begin(), p.proj_speed.weight.values.end(), 0.0f);
  Graph g;
  EXPECT_THROW(project(g, g.input(Tensor(Shape{1, 32}, 1.0f)), Head::speed, p), DegenerateFeatureError);
}

TEST(Predict, IdentityInitializedIsIdentity) {
  ModelParams p = init_params(EncoderConfig{}, 1);
  for (Head h : {Head::appearance, Head::speed}) {
    Linear& l = p.predictor(h);
    std::fill(l.weight.values.begin(), l.weight.values.end(), 0.0f);
    for (std::size_t i = 0; i < 256; ++i) l.weight.values[i * 256 + i] = 1.0f;
    Graph g;
    const Var v = project(g, g.input(Tensor(Shape{2, 32}, 0.25f)), h, p);
    const auto in = g.value(v).values;
    const auto out = g.value(predict(g, v, h, p)).values;
    for (std::size_t i = 0; i < in.size(); ++i) EXPECT_NEAR(out[i], in[i], 1e-6f);
  }
}

TEST(Predict, DetachedTargetMatchesFrozenTargetFiniteDifferences) {
  for (int seed = 0; seed < 20; ++seed) {
    ModelParams64 p = fd_params(gradcheck::small_encoder(), 40 + seed);
    std::mt19937_64 rng(seed);
    const std::size_t b = 2;
    const Tensor64 clips = gradcheck::random_clips(p.config, 2 * b, rng);
    Tensor64 a_j;
    {
      Graph64 g;
      a_j = g.value(appearance_branch(g, p, clips, true, false).a_j);
    }
    expect_detached_grad(
        p, [&](Graph64& g) { return appearance_branch(g, p, clips, true, false).l_a; },
        [&](Graph64& g) {
          const Var x = encode(g, g.input(clips), p);
          const Var a_i = project(g, g.slice_rows(x, 0, b), Head::appearance, p);
          return acp_loss(g, predict(g, a_i, Head::appearance, p), g.input(a_j));
        },
        "seed " + std::to_string(seed));
  }
}

EncoderConfig four_speeds() {
  EncoderConfig c;
  c.num_speeds = 4;
  return c;
}

TEST(SpeedLogits, ZeroWeightsGiveZeroLogitsAndShape) {
  ModelParams p = init_params(four_speeds(), 1);
  std::fill(p.speed_classifier.weight.values.begin(), p.speed_classifier.weight.values.end(), 0.0f);
  Graph g;
  const Var l = speed_logits(g, g.input(Tensor(Shape{3, 32}, 1.0f)), p);
  EXPECT_EQ(g.shape(l), (Shape{3, 4}));
  for (float v : g.value(l).values) EXPECT_EQ(v, 0.0f);
}

TEST(SpeedLogits, MatchesMatmulOracle) {
  ModelParams p = init_params(four_speeds(), 7);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<float> bias(-1, 1);
  for (float& v : p.speed_classifier.bias.values) v = bias(rng);
  Tensor x(Shape{4, 32});
  for (float& v : x.values) v = bias(rng);
  Graph g;
  const auto out = g.value(speed_logits(g, g.input(x), p)).values;
  for (std::size_t r = 0; r < 4; ++r)
    for (std::size_t m = 0; m < 4; ++m) {
      double acc = p.speed_classifier.bias.values[m];
      for (std::size_t i = 0; i < 32; ++i) acc += double(x.values[r * 32 + i]) * p.speed_classifier.weight.values[i * 4 + m];
      EXPECT_NEAR(out[r * 4 + m], acc, 1e-5);
    }
}

TEST(FullModel, ConsistencyLossGradientMatchesFiniteDifferences) {
  const std::size_t b = 2;
  for (bool symmetric : {false, true})
    for (int seed = 0; seed < 20; ++seed) {
      ModelParams64 p = fd_params(gradcheck::small_encoder(), 100 + seed);
      std::mt19937_64 rng(seed);
      const Tensor64 clips_ij = gradcheck::random_clips(p.config, 2 * b, rng), clips_k = gradcheck::random_clips(p.config, b, rng);
      Tensor64 a_i, a_j, m_i, m_k;
      {
        Graph64 g;
        const AppearanceBranch app = appearance_branch(g, p, clips_ij, true, symmetric);
        a_i = g.value(app.a_i);
        a_j = g.value(app.a_j);
        m_i = g.value(project(g, app.x_i, Head::speed, p));
        m_k = g.value(project(g, encode(g, g.input(clips_k), p), Head::speed, p));
      }
      // Targets enter as constants; each online branch is rebuilt from params.
      auto frozen = [&](Graph64& g) {
        const Var x = encode(g, g.input(clips_ij), p);
        const Var x_i = g.slice_rows(x, 0, b);
        auto term = [&](Var online, Head h, const Tensor64& target) {
          return acp_loss(g, predict(g, project(g, online, h, p), h, p), g.input(target));
        };
        Var l_a = term(x_i, Head::appearance, a_j);
        Var l_m = term(x_i, Head::speed, m_k);
        if (symmetric) {
          const Var x_k = encode(g, g.input(clips_k), p);
          l_a = g.scale(g.add(l_a, term(g.slice_rows(x, b, 2 * b), Head::appearance, a_i)), 0.5);
          l_m = g.scale(g.add(l_m, term(x_k, Head::speed, m_i)), 0.5);
        }
        return combined_loss(g, l_a, l_m, 0.5);
      };
      expect_detached_grad(
          p,
          [&](Graph64& g) {
            const AppearanceBranch app = appearance_branch(g, p, clips_ij, true, symmetric);
            const Var l_m = speed_consistency_branch(g, p, app.x_i, clips_k, true, symmetric);
            return combined_loss(g, app.l_a, l_m, 0.5);
          },
          frozen, "symmetric " + std::to_string(symmetric) + " seed " + std::to_string(seed));
    }
}

TEST(FullModel, NoStopGradientGradientMatchesFiniteDifferences) {
  for (int seed = 0; seed < 20; ++seed) {
    ModelParams64 p = fd_params(gradcheck::small_encoder(), 200 + seed);
    std::mt19937_64 rng(seed);
    const Tensor64 clips_ij = gradcheck::random_clips(p.config, 4, rng), clips_k = gradcheck::random_clips(p.config, 2, rng);
    const auto r = gradcheck::check(all_tensors(p), [&](Graph64& g) {
      const AppearanceBranch app = appearance_branch(g, p, clips_ij, false, false);
      const Var l_m = speed_consistency_branch(g, p, app.x_i, clips_k, false, false);
      return combined_loss(g, app.l_a, l_m, 0.3);
    });
    EXPECT_TRUE(r.ok()) << "seed " << seed << ": " << r.describe();
  }
}

TEST(FullModel, SpeedPredictionGradientMatchesFiniteDifferences) {
  for (int seed = 0; seed < 20; ++seed) {
    ModelParams64 p = fd_params(gradcheck::small_encoder(4), 300 + seed);
    std::mt19937_64 rng(seed);
    const Tensor64 clips_ij = gradcheck::random_clips(p.config, 6, rng);
    const auto r = gradcheck::check(all_tensors(p), [&](Graph64& g) {
      const AppearanceBranch app = appearance_branch(g, p, clips_ij, false, false);
      const Var sp = sp_loss(g, speed_logits(g, app.x_i, p), {0, 3, 1});
      return combined_loss(g, app.l_a, sp, 0.5);
    });
    EXPECT_TRUE(r.ok()) << "seed " << seed << ": " << r.describe();
  }
}

TEST(FullModel, FloatGradientsTrackDouble) {
  ModelParams pf = init_params(gradcheck::small_encoder(), 9);
  ModelParams64 pd = params_cast<double>(pf);
  std::mt19937_64 rng(1);
  const Tensor64 clips_ij = gradcheck::random_clips(pf.config, 4, rng), clips_k = gradcheck::random_clips(pf.config, 2, rng);
  pf.zero_grad();
  pd.zero_grad();
  pd.set_requires_grad(true);
  {
    Graph g;
    const AppearanceBranch app = appearance_branch(g, pf, tensor_cast<float>(clips_ij), true, false);
    g.backward(combined_loss(g, app.l_a,
                             speed_consistency_branch(g, pf, app.x_i, tensor_cast<float>(clips_k), true, false), 0.5f));
  }
  {
    Graph64 g;
    const AppearanceBranch app = appearance_branch(g, pd, clips_ij, true, false);
    g.backward(combined_loss(g, app.l_a, speed_consistency_branch(g, pd, app.x_i, clips_k, true, false), 0.5));
  }
  const auto nf = pf.named();
  const auto nd = pd.named();
  for (std::size_t i = 0; i < nf.size(); ++i) {
    nf[i].second->ensure_grad();
    nd[i].second->ensure_grad();
    ASSERT_EQ(nf[i].second->grad.size(), nf[i].second->size());
    double scale = 1e-6;
    for (double v : nd[i].second->grad) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < nd[i].second->grad.size(); ++k)
      EXPECT_NEAR(nf[i].second->grad[k], nd[i].second->grad[k], 1e-3 * scale) << nf[i].first;
  }
}

TEST(FullModel, LossTermsBounded) {
  ModelParams p = init_params(EncoderConfig{}, 3);
  Graph g;
  const Tensor clips = random_clips(p.config, 4, 5);
  const AppearanceBranch app = appearance_branch(g, p, clips, true, false);
  const Var l_m = speed_consistency_branch(g, p, app.x_i, random_clips(p.config, 2, 6), true, false);
  for (Var v : {app.l_a, l_m}) {
    EXPECT_GE(g.value(v)[0], 0.0f);
    EXPECT_LE(g.value(v)[0], 4.0f);
  }
}

TEST(ModelCheckpoint, RoundTripAndShapeValidation) {
  const ModelParams p = init_params(EncoderConfig{}, 12);
  Checkpoint ck;
  ck.config = to_json(p.config);
  append_model(ck, p);
  const Checkpoint back = Checkpoint::deserialize(ck.serialize());
  const ModelParams q = model_from_checkpoint(back, p.config);
  const auto np = p.named(), nq = q.named();
  for (std::size_t i = 0; i < np.size(); ++i) {
    EXPECT_EQ(np[i].second->shape, nq[i].second->shape);
    EXPECT_EQ(np[i].second->values, nq[i].second->values) << np[i].first;
  }
  EncoderConfig other;
  other.projection_dim = 128;
  EXPECT_THROW(model_from_checkpoint(back, other), ConfigError);
}

TEST(ModelCheckpoint, CorruptBytesRejected) {
  Checkpoint ck;
  ck.config = {{"a", 1}};
  append_model(ck, init_params(gradcheck::small_encoder(), 0));
  auto bytes = ck.serialize();
  bytes[0] = 'X';
  EXPECT_THROW(Checkpoint::deserialize(bytes), IoError);
  bytes = ck.serialize();
  bytes.resize(bytes.size() - 3);
  EXPECT_THROW(Checkpoint::deserialize(bytes), IoError);
}

TEST(EncoderConfigJson, RoundTrip) {
  EncoderConfig c = gradcheck::small_encoder(3);
  const EncoderConfig back = encoder_config_from_json(nlohmann::json::parse(to_json(c).dump()));
  EXPECT_EQ(to_json(back), to_json(c));
}
