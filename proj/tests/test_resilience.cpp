#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rhpc/error.hpp"
#include "rhpc/resilience.hpp"

using namespace rhpc;

namespace {

ScaleFeatures feed(const std::vector<IncrementState> &xs, const AttentionParams &p) {
  ScaleFeatures f;
  for (const auto &x : xs)
    f = update_features(std::move(f), x, p);
  return f;
}

PredictorState history_of(const std::vector<double> &xs) {
  PredictorState p;
  long t = 0;
  for (double x : xs)
    p.push({x, -x}, t++);
  return p;
}

} // namespace

TEST(Features, FirstSampleInitializesAllScales) {
  const ScaleFeatures f = feed({{0.3, -0.2}}, {});
  EXPECT_EQ(f.r1, (IncrementState{0.3, -0.2}));
  EXPECT_EQ(f.r2, f.r1);
  EXPECT_EQ(f.r3, f.r1);
}

TEST(Features, TwoPointWindowMean) {
  AttentionParams p;
  p.window = 2;
  const ScaleFeatures f = feed({{0.0, 0.0}, {4.0, 4.0}}, p);
  EXPECT_DOUBLE_EQ(f.r2.x1, 2.0);
  EXPECT_DOUBLE_EQ(f.r1.x1, 4.0);
}

TEST(Features, ConstantStreamFixedPoint) {
  const ScaleFeatures f = feed(std::vector<IncrementState>(30, {0.5, 0.25}), {});
  EXPECT_EQ(f.r1, (IncrementState{0.5, 0.25}));
  EXPECT_DOUBLE_EQ(f.r2.x1, 0.5);
  EXPECT_DOUBLE_EQ(f.r3.x1, 0.5);
}

TEST(Features, EwmaShrinksByOneMinusGamma) {
  AttentionParams p;
  ScaleFeatures f = feed({{0.0, 0.0}}, p);
  double prev_gap = 1.0;
  for (int k = 0; k < 20; ++k) {
    f = update_features(std::move(f), {1.0, 1.0}, p);
    const double gap = 1.0 - f.r3.x1;
    EXPECT_NEAR(gap, prev_gap * (1.0 - p.gamma), 1e-15);
    prev_gap = gap;
  }
}

TEST(Features, WindowMeanMatchesStoredWindowProperty) {
  AttentionParams p;
  p.window = 7;
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  ScaleFeatures f;
  IncrementState r3;
  for (int k = 0; k < 500; ++k) {
    const IncrementState x{u(rng), u(rng)};
    r3 = k == 0 ? x : (1.0 - p.gamma) * r3 + p.gamma * x;
    f = update_features(std::move(f), x, p);
    IncrementState sum;
    for (const auto &w : f.window)
      sum += w;
    ASSERT_LE(f.window.size(), 7u);
    ASSERT_NEAR(f.r2.x1, sum.x1 / f.window.size(), 1e-14);
    ASSERT_NEAR(f.r3.x2, r3.x2, 1e-14);
  }
}

TEST(Attention, IdenticalFeaturesGiveUniform) {
  const AttentionParams p;
  const ScaleFeatures own = feed({{0.1, 0.2}, {0.2, 0.1}}, p);
  const std::vector<const ScaleFeatures *> n = {&own, &own, &own, &own};
  for (double w : attention_weights(own, n, p))
    EXPECT_DOUBLE_EQ(w, 0.25);
}

TEST(Attention, ClosedFormTwoNeighbors) {
  AttentionParams p;
  p.sigmas = {1.0, 0.0, 0.0};
  const ScaleFeatures own = feed({{0.0, 0.0}}, p);
  const ScaleFeatures far = feed({{3.0, 0.0}}, p);
  const std::vector<const ScaleFeatures *> n = {&own, &far};
  const auto w = attention_weights(own, n, p);
  const double e = std::exp(-3.0);
  EXPECT_NEAR(w[0], 1.0 / (1.0 + e), 1e-15);
  EXPECT_NEAR(w[1], e / (1.0 + e), 1e-15);
  EXPECT_NEAR(w[0], 0.9526, 5e-5);
}

TEST(Attention, GrowingOffsetDrivesWeightToZero) {
  AttentionParams p;
  p.sigmas = {1.0, 0.0, 0.0};
  const ScaleFeatures own = feed({{0.0, 0.0}}, p);
  const ScaleFeatures honest = feed({{0.01, 0.0}}, p);
  double prev = 1.0;
  for (double offset : {10.0, 100.0, 1000.0}) {
    const ScaleFeatures bad = feed({{offset, offset}}, p);
    const std::vector<const ScaleFeatures *> n = {&honest, &bad};
    const auto w = attention_weights(own, n, p);
    EXPECT_LT(w[1], prev);
    EXPECT_GT(w[1], 0.0);
    prev = w[1];
  }
  EXPECT_LT(prev, 1e-300);
}

TEST(Attention, SimplexAndMonotonicityProperty) {
  const AttentionParams p;
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 2000; ++t) {
    const ScaleFeatures own = feed({{u(rng), u(rng)}, {u(rng), u(rng)}}, p);
    std::vector<ScaleFeatures> feats;
    for (int j = 0; j < 4; ++j)
      feats.push_back(feed({{u(rng), u(rng)}, {u(rng), u(rng)}}, p));
    std::vector<const ScaleFeatures *> ptrs;
    for (auto &f : feats)
      ptrs.push_back(&f);
    const auto w = attention_weights(own, ptrs, p);
    double sum = 0.0;
    for (double x : w) {
      ASSERT_GT(x, 0.0);
      ASSERT_LT(x, 1.0);
      sum += x;
    }
    ASSERT_NEAR(sum, 1.0, 1e-12);

    // Push neighbor 0 further away on the instantaneous scale only.
    ScaleFeatures moved = feats[0];
    const IncrementState dir = moved.r1 - own.r1;
    const double len = dir.norm();
    if (len < 1e-6)
      continue;
    moved.r1 += (0.5 / len) * dir;
    std::vector<const ScaleFeatures *> ptrs2 = ptrs;
    ptrs2[0] = &moved;
    const auto w2 = attention_weights(own, ptrs2, p);
    ASSERT_LT(w2[0], w[0]);
    for (std::size_t j = 1; j < w.size(); ++j)
      ASSERT_GT(w2[j], w[j]);
  }
}

TEST(Attention, FloorKeepsWeightsPositive) {
  const std::vector<double> logits = {0.0, -1e6};
  const auto w = softmax_floored(logits);
  EXPECT_GT(w[1], 0.0);
  EXPECT_NEAR(w[0] + w[1], 1.0, 1e-15);
}

TEST(Attention, Deterministic) {
  const AttentionParams p;
  const ScaleFeatures own = feed({{0.1, 0.2}, {0.3, 0.1}}, p);
  const ScaleFeatures a = feed({{0.5, 0.2}}, p), b = feed({{-0.1, 0.4}}, p);
  const std::vector<const ScaleFeatures *> n = {&a, &b};
  EXPECT_EQ(attention_weights(own, n, p), attention_weights(own, n, p));
}

TEST(AttentionParams, Validation) {
  AttentionParams p;
  p.window = 0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.gamma = 0.0;
  EXPECT_THROW(p.validate(), ValidationError);
  p = {};
  p.sigmas[1] = -1.0;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(Predictor, HoldLast) {
  EXPECT_EQ(predict_missing(history_of({0.1, 0.4, 0.7}), HoldLast{}, 3).x1, 0.7);
}

TEST(Predictor, LinearArOneOnLinearTrend) {
  // Normal-equation oracle for x_t = a + b x_{t-1} on (0.1 -> 0.2), (0.2 -> 0.3).
  const double xs[] = {0.1, 0.2, 0.3};
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int t = 1; t < 3; ++t) {
    sx += xs[t - 1];
    sy += xs[t];
    sxx += xs[t - 1] * xs[t - 1];
    sxy += xs[t - 1] * xs[t];
  }
  const double b = (2 * sxy - sx * sy) / (2 * sxx - sx * sx);
  const double a = (sy - b * sx) / 2;
  const double oracle = a + b * 0.3;
  const IncrementState p = predict_missing(history_of({0.1, 0.2, 0.3}), LinearAR{1}, 3);
  EXPECT_NEAR(p.x1, oracle, 1e-12);
  EXPECT_NEAR(p.x1, 0.4, 1e-12);
  EXPECT_NEAR(p.x2, -0.4, 1e-12);
}

TEST(Predictor, ConstantHistoryGivesConstantForEveryKind) {
  for (int len : {1, 2, 3, 8}) {
    const PredictorState h = history_of(std::vector<double>(len, 0.42));
    for (const PredictorKind &kind : {PredictorKind{HoldLast{}}, PredictorKind{LinearAR{1}},
                                      PredictorKind{LinearAR{2}}, PredictorKind{LinearAR{4}}}) {
      const IncrementState p = predict_missing(h, kind, len);
      EXPECT_NEAR(p.x1, 0.42, 1e-12);
      EXPECT_NEAR(p.x2, -0.42, 1e-12);
    }
  }
}

TEST(Predictor, FiniteOnRandomHistoriesProperty) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 2000; ++t) {
    std::vector<double> xs(1 + t % 8);
    for (double &x : xs)
      x = u(rng);
    ASSERT_TRUE(predict_missing(history_of(xs), LinearAR{2}, 10).finite());
  }
}

TEST(Predictor, EmptyHistoryIsError) {
  EXPECT_THROW(predict_missing(PredictorState{}, HoldLast{}, 0), std::logic_error);
}

TEST(Predictor, CapacityBoundsHistory) {
  PredictorState p;
  p.capacity = 3;
  for (long t = 0; t < 10; ++t)
    p.push({static_cast<double>(t), 0.0}, t);
  ASSERT_EQ(p.history.size(), 3u);
  EXPECT_EQ(p.history.front().t, 7);
}
