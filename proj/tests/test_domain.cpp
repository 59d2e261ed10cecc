#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "rhpc/error.hpp"

using namespace rhpc;
using rhpc::testing::gfl;
using rhpc::testing::gfm;

TEST(FeasibleBox, Dg2ActiveLimitsMapToQuarter) {
  const FeasibleBox box = feasible_box_from_spec(gfl(2, 0.4, 0.3, {0.3, 0.5}, {0.0, 0.35}));
  EXPECT_DOUBLE_EQ(box.x1.lo, -0.25);
  EXPECT_DOUBLE_EQ(box.x1.hi, 0.25);
  EXPECT_DOUBLE_EQ(box.x2.lo, -1.0);
  EXPECT_NEAR(box.x2.hi, 0.05 / 0.3, 1e-15);
}

TEST(FeasibleBox, GfmIsWholePlane) {
  const FeasibleBox box = feasible_box_from_spec(gfm(1, 0.8, 0.6, 1.0));
  EXPECT_TRUE(box.x1.is_unbounded());
  EXPECT_TRUE(box.x2.is_unbounded());
}

TEST(FeasibleBox, ZeroWidthIntervalIsAccepted) {
  const DGSpec s = gfl(7, 0.4, 0.3, {0.4, 0.4}, {0.0, 0.6});
  EXPECT_NO_THROW(validate_spec(s));
  const FeasibleBox box = feasible_box_from_spec(s);
  EXPECT_EQ(box.x1.lo, 0.0);
  EXPECT_EQ(box.x1.hi, 0.0);
}

TEST(FeasibleBox, ZeroSetpointRejected) {
  DGSpec s = gfl(2, 0.0, 0.3, {0.0, 0.5}, {0.0, 0.35});
  EXPECT_THROW(feasible_box_from_spec(s), ValidationError);
  try {
    validate_spec(s);
    FAIL();
  } catch (const ValidationError &e) {
    EXPECT_EQ(e.rule(), "dg_setpoint");
  }
}

TEST(DGSpecRules, GfmWithLimitsAndPinnedGflRejected) {
  DGSpec a = gfm(1, 0.8, 0.6, 1.0);
  a.p_limits = {0.0, 1.0};
  EXPECT_THROW(validate_spec(a), ValidationError);
  DGSpec b = gfl(2, 0.4, 0.3, {0.3, 0.5}, {0.0, 0.35});
  b.pin_gain = 1.0;
  EXPECT_THROW(validate_spec(b), ValidationError);
  DGSpec c = gfl(2, 0.4, 0.3, {0.3, 0.5}, Interval::unbounded());
  EXPECT_THROW(validate_spec(c), ValidationError);
}

TEST(DGSpecRules, InfeasibleSetpointWarns) {
  const auto w = validate_spec(gfl(2, 0.4, 3.0, {0.3, 0.5}, {0.0, 0.35}));
  ASSERT_EQ(w.size(), 1u);
  EXPECT_NE(w[0].find("reactive"), std::string::npos);
  EXPECT_TRUE(validate_spec(gfl(2, 0.4, 0.3, {0.3, 0.5}, {0.0, 0.35})).empty());
}

TEST(Standardize, Examples) {
  const DGSpec s = gfl(2, 0.4, 0.3, {0.3, 0.5}, {0.0, 0.35});
  EXPECT_DOUBLE_EQ(standardize(0.1, 0.0, s).x1, 0.25);
  EXPECT_EQ(standardize(0.0, 0.0, s), (IncrementState{0.0, 0.0}));
  DGSpec ess = gfm(9, -0.8, 0.5);
  EXPECT_DOUBLE_EQ(standardize(-0.2, 0.0, ess).x1, -0.25);
}

TEST(Destandardize, Examples) {
  const DGSpec s = gfl(2, 0.4, 0.3, {0.3, 0.5}, {0.0, 0.35});
  EXPECT_DOUBLE_EQ(destandardize({0.25, 0.0}, s).p, 0.5);
  const PowerOutput z = destandardize({0.0, 0.0}, s);
  EXPECT_EQ(z.p, 0.4);
  EXPECT_EQ(z.q, 0.3);
}

TEST(Standardize, RoundTripProperty) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> set(-2.0, 2.0), inc(-5.0, 5.0);
  for (int t = 0; t < 10000; ++t) {
    double p = set(rng), q = set(rng);
    if (std::abs(p) < 1e-3 || std::abs(q) < 1e-3)
      continue;
    const DGSpec s = gfm(1, p, q);
    const double dp = inc(rng), dq = inc(rng);
    const PowerOutput out = destandardize(standardize(dp, dq, s), s);
    EXPECT_NEAR(out.p, p + dp, 1e-12 * std::max(1.0, std::abs(p + dp)));
    EXPECT_NEAR(out.q, q + dq, 1e-12 * std::max(1.0, std::abs(q + dq)));
  }
}

TEST(FeasibleBox, ContainsZeroWhenSetpointFeasibleProperty) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.05, 2.0), w(0.0, 1.0);
  for (int t = 0; t < 2000; ++t) {
    const double p = u(rng), q = u(rng);
    const DGSpec s = gfl(1, p, q, {p - w(rng), p + w(rng)}, {q - w(rng), q + w(rng)});
    EXPECT_TRUE(feasible_box_from_spec(s).contains({0.0, 0.0}));
  }
}

TEST(LoadProfile, ConstantOk) {
  std::vector<LoadSample> s(50, LoadSample{0.3, 0.1});
  EXPECT_FALSE(validate_load_profile(s, 0.01, 0.01).has_value());
}

TEST(LoadProfile, InclusiveBound) {
  std::vector<LoadSample> s;
  for (int k = 0; k < 20; ++k)
    s.push_back({0.05 * k, 0.0});
  EXPECT_FALSE(validate_load_profile(s, 0.05, 0.05).has_value());
}

TEST(LoadProfile, DoubleStepReportsIndex) {
  std::vector<LoadSample> s(10, LoadSample{});
  for (std::size_t k = 6; k < s.size(); ++k)
    s[k].dp = 0.1;
  const auto v = validate_load_profile(s, 0.05, 0.05);
  ASSERT_TRUE(v.has_value());
  EXPECT_EQ(v->index, 6u);
  EXPECT_EQ(v->axis, 0);
  EXPECT_DOUBLE_EQ(v->step, 0.1);
}

TEST(LoadProfile, EmptyOrBadRateIsError) {
  std::vector<LoadSample> empty;
  EXPECT_THROW(validate_load_profile(empty, 0.1, 0.1), ValidationError);
  std::vector<LoadSample> one(1);
  EXPECT_THROW(validate_load_profile(one, 0.0, 0.1), ValidationError);
}
