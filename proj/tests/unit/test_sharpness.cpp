// Copyright 2026 The flatnoise Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "flatnoise/data.hpp"
#include "flatnoise/objective.hpp"
#include "flatnoise/optim.hpp"
#include "flatnoise/sharpness.hpp"
#include "helpers.hpp"

namespace flatnoise {
namespace {

QuadraticObjective square() { return QuadraticObjective::diagonal(std::vector<double>{2.0}, {0.0}); }

struct TinyNet {
  ModelSpec model{3, {6, 4}, Activation::Tanh, 3};
  Batch batch;
  ParamSet params;
};

TinyNet tiny_net(std::uint64_t seed) {
  TinyNet t;
  RngStream rng(seed, StreamId::Init);
  t.params = init_params(t.model, rng);
  for (double& v : t.params.theta) v += 0.2 * rng.standard_normal();
  t.batch = testing::random_batch(40, 3, 3, rng);
  return t;
}

TEST(MSharpness, ZeroMagnitudeIsZero) {
  const auto loss = square();
  const std::vector<const Objective*> batches{&loss};
  RngStream rng(1, StreamId::NoiseEval);
  for (DirectionKind k : {DirectionKind::Ascent, DirectionKind::Average}) {
    SharpnessProbe probe{k, 0.0, 1, 4, NoiseSpec::gaussian(0.0, false)};
    EXPECT_EQ(m_sharpness(batches, ParamSet::single_filter({1.0}), probe, rng), 0.0);
  }
}

TEST(MSharpness, AscentQuadraticExample) {
  const auto loss = square();
  const std::vector<const Objective*> batches{&loss};
  RngStream rng(2, StreamId::NoiseEval);
  const SharpnessProbe probe{DirectionKind::Ascent, 0.1, 1, 1, {}};
  EXPECT_NEAR(m_sharpness(batches, ParamSet::single_filter({1.0}), probe, rng), 0.21, 1e-14);
}

TEST(MSharpness, AverageQuadraticMatchesSigmaSquared) {
  const auto loss = square();
  const std::vector<const Objective*> batches{&loss};
  RngStream rng(3, StreamId::NoiseEval);
  const SharpnessProbe probe{DirectionKind::Average, 0.1, 1, 100000, NoiseSpec::gaussian(0.0, false)};
  EXPECT_NEAR(m_sharpness(batches, ParamSet::single_filter({1.0}), probe, rng) / 0.01, 1.0, 0.05);
}

TEST(MSharpness, AscentOnDiagonalQuadraticHasClosedForm) {
  // L = 1/2 sum a_i w_i^2, eps = rho g / |g|: L(w+eps) - L(w) = rho |g| + rho^2/2 * sum a_i g_i^2 / |g|^2.
  const std::vector<double> a{1.0, 2.0, 5.0};
  const auto loss = QuadraticObjective::diagonal(a, {0.0, 0.0, 0.0});
  const std::vector<double> w{0.3, -0.7, 0.2};
  const std::vector<const Objective*> batches{&loss};
  RngStream rng(4, StreamId::NoiseEval);
  const double rho = 0.05;
  double gn2 = 0.0;
  double curv = 0.0;
  for (std::size_t i = 0; i < 3; ++i) {
    const double g = a[i] * w[i];
    gn2 += g * g;
    curv += a[i] * g * g;
  }
  const double oracle = rho * std::sqrt(gn2) + rho * rho / 2.0 * curv / gn2;
  const SharpnessProbe probe{DirectionKind::Ascent, rho, 1, 1, {}};
  const double s = m_sharpness(batches, ParamSet::single_filter(w), probe, rng);
  EXPECT_NEAR(s, oracle, 1e-13);
  EXPECT_GE(s, rho * std::sqrt(gn2));
}

TEST(MSharpness, AveragesOverMinibatches) {
  const TinyNet t = tiny_net(5);
  Dataset ds;
  ds.inputs = t.batch.inputs;
  ds.labels = t.batch.labels;
  ds.num_classes = 3;
  RngStream rng(5, StreamId::NoiseEval);
  const SharpnessProbe probe{DirectionKind::Ascent, 0.05, 16, 1, {}};
  const double s = m_sharpness(t.model, t.params, ds, probe, 0.0, rng);
  double oracle = 0.0;
  const auto parts = ds.batches(16);
  ASSERT_EQ(parts.size(), 3u);
  for (const Batch& b : parts) {
    const auto g = grad(t.model, t.params.theta, b, 0.0);
    const auto eps = sam_ascent(g, 0.05);
    oracle += forward_loss(t.model, add(t.params.theta, eps), b, 0.0) - forward_loss(t.model, t.params.theta, b, 0.0);
  }
  EXPECT_NEAR(s, oracle / 3.0, 1e-14);
  EXPECT_THROW(m_sharpness(t.model, t.params, Dataset{}, probe, 0.0, rng), DomainError);
}

TEST(GradCosine, Examples) {
  const auto loss = square();
  RngStream rng(6, StreamId::NoiseEval);
  const SharpnessProbe zero{DirectionKind::Average, 0.0, 1, 1, NoiseSpec::gaussian(0.0, false)};
  EXPECT_DOUBLE_EQ(*grad_cosine(loss, ParamSet::single_filter({1.0}), zero, rng), 1.0);
  const SharpnessProbe small{DirectionKind::Average, 0.1, 1, 1, NoiseSpec::gaussian(0.0, false)};
  EXPECT_DOUBLE_EQ(*grad_cosine(loss, ParamSet::single_filter({1.0}), small, rng), 1.0);
  EXPECT_FALSE(grad_cosine(loss, ParamSet::single_filter({0.0}), zero, rng).has_value());
}

TEST(GradCosine, MatchesDotProductOracle) {
  const TinyNet t = tiny_net(7);
  const ModelObjective obj(t.model, t.batch, 0.0);
  const SharpnessProbe probe{DirectionKind::Average, 0.3, 1, 1, NoiseSpec::gaussian(0.0)};
  RngStream r1(7, StreamId::NoiseEval);
  const double c = *grad_cosine(obj, t.params, probe, r1);
  RngStream r2(7, StreamId::NoiseEval);
  const auto eps = sample_noise(t.params, NoiseSpec::gaussian(0.3), r2);
  const auto g0 = grad(t.model, t.params.theta, t.batch, 0.0);
  const auto g1 = grad(t.model, add(t.params.theta, eps), t.batch, 0.0);
  long double d = 0.0L;
  long double n0 = 0.0L;
  long double n1 = 0.0L;
  for (std::size_t i = 0; i < g0.size(); ++i) {
    d += static_cast<long double>(g0[i]) * g1[i];
    n0 += static_cast<long double>(g0[i]) * g0[i];
    n1 += static_cast<long double>(g1[i]) * g1[i];
  }
  EXPECT_NEAR(c, static_cast<double>(d / std::sqrt(n0 * n1)), 1e-12);
  EXPECT_GE(c, -1.0);
  EXPECT_LE(c, 1.0);
}

TEST(PathDistance, Examples) {
  const ParamSet a = ParamSet::single_filter({1.0, 2.0, 0.0});
  const ParamSet b = ParamSet::single_filter({4.0, 6.0, 0.0});
  const std::vector<ParamSet> same{a, a, a};
  EXPECT_EQ(path_distance(same), 0.0);
  const std::vector<ParamSet> two{a, b};
  EXPECT_DOUBLE_EQ(path_distance(two), 5.0);
  const std::vector<ParamSet> one{a};
  EXPECT_THROW(path_distance(one), DomainError);
  const std::vector<ParamSet> bad{a, ParamSet::single_filter({1.0})};
  EXPECT_THROW(path_distance(bad), DomainError);
}

TEST(PathDistance, MatchesSummationOracle) {
  RngStream rng(8, StreamId::Init);
  std::vector<ParamSet> ckpts;
  for (int i = 0; i < 10; ++i) ckpts.push_back(ParamSet::single_filter(testing::random_vector(30, rng)));
  long double oracle = 0.0L;
  for (std::size_t i = 1; i < ckpts.size(); ++i) {
    long double ss = 0.0L;
    for (std::size_t j = 0; j < 30; ++j) {
      const long double d = static_cast<long double>(ckpts[i].theta[j]) - ckpts[i - 1].theta[j];
      ss += d * d;
    }
    oracle += std::sqrt(ss);
  }
  EXPECT_NEAR(path_distance(ckpts), static_cast<double>(oracle), 1e-12);
}

TEST(HessianTrace, DiagonalQuadratic) {
  const auto loss = QuadraticObjective::diagonal(std::vector<double>{1.0, 2.0, 3.0}, {0.5, -0.5, 1.0});
  RngStream rng(9, StreamId::NoiseEval);
  const std::vector<double> w{0.1, 0.2, 0.3};
  EXPECT_NEAR(hessian_trace(loss, w, 1000, rng) / 6.0, 1.0, 0.02);
  EXPECT_NEAR(hessian_trace_dense(loss, w), 6.0, 1e-6);
  EXPECT_THROW(hessian_trace(loss, w, 0, rng), DomainError);
}

TEST(HessianTrace, LinearLossIsZero) {
  const testing::LinearObjective loss({0.5, -1.0, 2.0, 3.0}, 1.0);
  RngStream rng(10, StreamId::NoiseEval);
  const std::vector<double> w{1.0, 2.0, 3.0, 4.0};
  EXPECT_NEAR(hessian_trace(loss, w, 50, rng), 0.0, 1e-9);
  EXPECT_NEAR(hessian_trace_dense(loss, w), 0.0, 1e-9);
}

TEST(HessianTrace, HutchinsonMatchesDenseOnTrainedTinyMlp) {
  const ModelSpec model{2, {6, 4}, Activation::Tanh, 3};
  ASSERT_LE(model.param_count(), 150u);
  RngStream data_rng(3, StreamId::DataShuffle, 1);
  const Dataset spirals = gen_spirals(3, 40, 0.05, data_rng);
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 40;
  cfg.lr0 = 0.1;
  cfg.seed = 1;
  const ParamSet w = train(model, spirals, {}, cfg, {}).final_params;
  const Batch all = spirals.as_batch();
  const ModelObjective obj(model, all, 0.0);
  const double dense = hessian_trace_dense(obj, w.theta);
  ASSERT_GT(dense, 1.0);
  RngStream rng(11, StreamId::NoiseEval);
  EXPECT_NEAR(hessian_trace(obj, w.theta, 4000, rng) / dense, 1.0, 0.05);
}

TEST(HessianTrace, DenseMatchesAnalyticOnGeneralQuadratic) {
  const std::vector<double> h{4.0, 1.0, 0.5, 1.0, 3.0, -0.2, 0.5, -0.2, 2.0};
  const QuadraticObjective loss(h, {0.0, 0.0, 0.0});
  EXPECT_NEAR(hessian_trace_dense(loss, std::vector<double>{1.0, -1.0, 0.5}), 9.0, 1e-6);
  EXPECT_NEAR(loss.trace(), 9.0, 1e-15);
}

TEST(HessianTrace, LinearInTheObjective) {
  const TinyNet t = tiny_net(12);
  const ModelObjective a(t.model, t.batch, 0.0);
  const auto b = QuadraticObjective::diagonal(std::vector<double>(t.model.param_count(), 0.7),
                                              std::vector<double>(t.model.param_count(), 0.1));
  const testing::SumObjective sum(a, b);
  RngStream r1(12, StreamId::NoiseEval);
  RngStream r2(12, StreamId::NoiseEval);
  RngStream r3(12, StreamId::NoiseEval);
  const double ta = hessian_trace(a, t.params.theta, 20, r1);
  const double tb = hessian_trace(b, t.params.theta, 20, r2);
  const double ts = hessian_trace(sum, t.params.theta, 20, r3);
  EXPECT_NEAR(ts, ta + tb, 1e-10 * std::max(1.0, std::abs(ts)));
}

TEST(FilterNormalizedDirection, SliceNormsMatchWeights) {
  const TinyNet t = tiny_net(13);
  RngStream rng(13, StreamId::NoiseEval);
  const auto d = filter_normalized_direction(t.params, rng);
  for (const FilterSlice& f : t.params.partition) {
    const auto ws = std::span<const double>(t.params.theta).subspan(f.offset, f.length);
    const auto ds = std::span<const double>(d).subspan(f.offset, f.length);
    EXPECT_NEAR(l2_norm(ds), l2_norm(ws), 1e-12);
  }
}

TEST(LossSlice, CenterAndGrid) {
  const TinyNet t = tiny_net(14);
  const ModelObjective obj(t.model, t.batch, 0.1);
  RngStream rng(14, StreamId::NoiseEval);
  const LossSlice s = loss_slice(obj, t.params, {2, 11, 0.5, true}, rng);
  ASSERT_EQ(s.alphas.size(), 11u);
  ASSERT_EQ(s.betas.size(), 11u);
  ASSERT_EQ(s.values.size(), 121u);
  EXPECT_EQ(s.alphas[5], 0.0);
  EXPECT_EQ(s.alphas.front(), -0.5);
  EXPECT_EQ(s.alphas.back(), 0.5);
  EXPECT_EQ(s.at(5, 5), obj.value(t.params.theta));
}

TEST(LossSlice, SymmetricOnEvenLoss) {
  const TinyNet t = tiny_net(15);
  const auto even = QuadraticObjective::diagonal(std::vector<double>(t.model.param_count(), 1.3), t.params.theta);
  RngStream rng(15, StreamId::NoiseEval);
  const LossSlice s = loss_slice(even, t.params, {1, 21, 1.0, true}, rng);
  ASSERT_EQ(s.betas.size(), 1u);
  for (std::size_t i = 0; i < 21; ++i) EXPECT_NEAR(s.at(i, 0), s.at(20 - i, 0), 1e-10);
  EXPECT_EQ(s.at(10, 0), 0.0);
}

TEST(LossSlice, ValidationAndCsv) {
  const TinyNet t = tiny_net(16);
  const ModelObjective obj(t.model, t.batch, 0.0);
  RngStream rng(16, StreamId::NoiseEval);
  EXPECT_THROW(loss_slice(obj, t.params, {1, 4, 1.0, true}, rng), DomainError);
  EXPECT_THROW(loss_slice(obj, t.params, {3, 5, 1.0, true}, rng), DomainError);
  const LossSlice s = loss_slice(obj, t.params, {1, 5, 1.0, false}, rng);
  const auto dir = testing::scratch_dir("slice");
  write_slice_csv(dir / "s.csv", s, "abc");
  std::ifstream in(dir / "s.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# config_hash=abc");
  std::getline(in, line);
  EXPECT_EQ(line, "alpha,beta,loss");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 5);
}

}  // namespace
}  // namespace flatnoise
