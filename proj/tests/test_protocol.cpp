#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "rhpc/error.hpp"

using namespace rhpc;

namespace {

const FeasibleBox kDg2Box{{-0.25, 0.25}, {-1.0, 0.05 / 0.3}};

NeighborInput nb(IncrementState x, double w, ActivationMatrix a = {}) { return {x, a, w}; }

} // namespace

TEST(Project, InteriorIsIdentity) {
  const IncrementState p{0.1, -0.3};
  EXPECT_EQ(project(p, kDg2Box), p);
}

TEST(Project, ClampExample) {
  const FeasibleBox box{{-0.25, 0.25}, Interval::unbounded()};
  EXPECT_EQ(project({0.6, 0.0}, box), (IncrementState{0.25, 0.0}));
}

TEST(Project, NonExpansiveProperty) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-3.0, 3.0), half(0.0, 1.0);
  int checked = 0;
  for (int t = 0; t < 10000; ++t) {
    const double l1 = u(rng), l2 = u(rng);
    const FeasibleBox box{{l1, l1 + half(rng)}, {l2, l2 + half(rng)}};
    const IncrementState x{u(rng), u(rng)}, y{u(rng), u(rng)};
    const IncrementState px = project(x, box), py = project(y, box);
    ASSERT_LE((px - py).norm(), (x - y).norm());
    ASSERT_TRUE(box.contains(px));
    ++checked;
  }
  EXPECT_EQ(checked, 10000);
}

TEST(Activation, BoundaryInteriorAndUnbounded) {
  EXPECT_EQ(activation({0.25, 0.0}, kDg2Box, 1e-6).a1, 0);
  EXPECT_EQ(activation({0.25 - 5e-7, 0.0}, kDg2Box, 1e-6).a1, 0);
  EXPECT_EQ(activation({-0.25, 0.0}, kDg2Box, 1e-6).a1, 0);
  EXPECT_EQ(activation({0.1, 0.0}, kDg2Box, 1e-6), (ActivationMatrix{1, 1}));
  EXPECT_EQ(activation({0.0, -1.0}, kDg2Box, 1e-6), (ActivationMatrix{1, 0}));
  EXPECT_EQ(activation({1e9, -1e9}, FeasibleBox::whole_plane(), 1e-6), (ActivationMatrix{1, 1}));
}

TEST(GflUpdate, NoNeighborsEverHeardIsFixedPoint) {
  const ControlParams cp;
  std::vector<NeighborInput> ins = {{std::nullopt, {}, 0.5}, {std::nullopt, {}, 0.5}};
  const IncrementState x{0.1, -0.2};
  const IncrementState next = gfl_update(x, ins, cp, kDg2Box);
  EXPECT_NEAR(next.x1, x.x1, 1e-15);
  EXPECT_NEAR(next.x2, x.x2, 1e-15);
}

TEST(GflUpdate, Examples) {
  const ControlParams cp;
  std::vector<NeighborInput> ins = {nb({1.0, 0.0}, 1.0)};
  const FeasibleBox wide{{-5, 5}, {-5, 5}};
  EXPECT_DOUBLE_EQ(gfl_update({0.0, 0.0}, ins, cp, wide).x1, 0.2);
  const FeasibleBox tight{{-0.1, 0.1}, {-5, 5}};
  EXPECT_DOUBLE_EQ(gfl_update({0.0, 0.0}, ins, cp, tight).x1, 0.1);
}

TEST(GflUpdate, PostStateFeasibleProperty) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-2.0, 2.0), w(0.0, 1.0);
  const ControlParams cp;
  for (int t = 0; t < 5000; ++t) {
    IncrementState x = project({u(rng), u(rng)}, kDg2Box);
    std::vector<NeighborInput> ins;
    double total = 0.0;
    for (int j = 0; j < 3; ++j) {
      ins.push_back(nb({10 * u(rng), 10 * u(rng)}, w(rng) + 1e-3));
      total += ins.back().weight;
    }
    for (auto &in : ins)
      in.weight /= total;
    ASSERT_TRUE(kDg2Box.contains(gfl_update(x, ins, cp, kDg2Box)));
  }
}

TEST(GflUpdate, AntiWindUpAtBoundary) {
  const ControlParams cp;
  std::vector<NeighborInput> ins = {nb({3.0, 0.0}, 1.0)};
  IncrementState x{0.25, 0.0};
  for (int k = 0; k < 100; ++k) {
    const IncrementState next = gfl_update(x, ins, cp, kDg2Box);
    ASSERT_EQ(next.x1, 0.25);
    x = next;
  }
}

TEST(GfmUpdate, AllNeighborsSaturatedOnlyTrackingSurvives) {
  const ControlParams cp;
  std::vector<NeighborInput> ins = {nb({0.7, 0.9}, 0.5, {0, 0}), nb({-0.4, 3.0}, 0.5, {0, 0})};
  const IncrementState next = gfm_update({0.0, 0.0}, ins, {{1.0, 1.0}, true}, 1.0, cp);
  EXPECT_DOUBLE_EQ(next.x1, 0.2);
  EXPECT_DOUBLE_EQ(next.x2, 0.2);
}

TEST(GfmUpdate, ConsensusFixedPoint) {
  const ControlParams cp;
  const IncrementState x{0.37, -0.11};
  std::vector<NeighborInput> ins = {nb(x, 1.0)};
  const IncrementState next = gfm_update(x, ins, {{5.0, 5.0}, true}, 0.0, cp);
  EXPECT_NEAR(next.x1, x.x1, 1e-15);
  EXPECT_NEAR(next.x2, x.x2, 1e-15);
}

TEST(GfmUpdate, MixedGatingIsComponentwise) {
  const ControlParams cp;
  std::vector<NeighborInput> ins = {nb({1.0, 1.0}, 1.0, {0, 1})};
  const IncrementState next = gfm_update({0.0, 0.0}, ins, {}, 0.0, cp);
  EXPECT_DOUBLE_EQ(next.x1, 0.0);
  EXPECT_DOUBLE_EQ(next.x2, 0.2);
}

TEST(GfmUpdate, SaturatedNeighborPerturbationHasNoEffectProperty) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.01, 1.0);
  const ControlParams cp;
  for (int t = 0; t < 10000; ++t) {
    const IncrementState x{u(rng), u(rng)};
    std::vector<NeighborInput> ins;
    for (int j = 0; j < 3; ++j)
      ins.push_back(nb({u(rng), u(rng)}, w(rng), {1, 1}));
    const std::size_t m = t % 2;
    ins[0].activation[m] = 0;
    const ReferenceState ref{{u(rng), u(rng)}, true};
    const IncrementState base = gfm_update(x, ins, ref, 1.0, cp);
    for (double delta : {10.0, -10.0}) {
      auto moved = ins;
      (*moved[0].state)[m] += delta;
      const IncrementState next = gfm_update(x, moved, ref, 1.0, cp);
      ASSERT_EQ(next[m], base[m]);
    }
  }
}

TEST(GfmUpdate, ConvexHullWithoutPinningProperty) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0), w(0.01, 1.0);
  const ControlParams cp;
  for (int t = 0; t < 5000; ++t) {
    const IncrementState x{u(rng), u(rng)};
    std::vector<NeighborInput> ins;
    double total = 0.0;
    for (int j = 0; j < 3; ++j) {
      ins.push_back(nb({u(rng), u(rng)}, w(rng)));
      total += ins.back().weight;
    }
    for (auto &in : ins)
      in.weight /= total;
    const IncrementState next = gfm_update(x, ins, {}, 0.0, cp);
    for (std::size_t m = 0; m < 2; ++m) {
      double lo = x[m], hi = x[m];
      for (const auto &in : ins) {
        lo = std::min(lo, (*in.state)[m]);
        hi = std::max(hi, (*in.state)[m]);
      }
      ASSERT_GE(next[m], lo - 1e-15);
      ASSERT_LE(next[m], hi + 1e-15);
    }
  }
}

TEST(Reference, Examples) {
  const std::vector<IncrementState> pinned = {{0.2, 0.0}, {0.4, 0.0}};
  EXPECT_NEAR(scada_reference_update(pinned, {0.6, 0.0}, true, GridMode::GridConnected).ref.x1,
              0.4, 1e-15);
  const ReferenceState isl = scada_reference_update(pinned, {0.6, 0.0}, true, GridMode::Islanded);
  EXPECT_NEAR(isl.ref.x1, 0.2, 1e-15);
  EXPECT_FALSE(isl.pcc_active);
  const std::vector<IncrementState> zeros(2);
  EXPECT_EQ(scada_reference_update(zeros, {}, true, GridMode::GridConnected).ref,
            (IncrementState{}));
  EXPECT_THROW(scada_reference_update({}, {}, true, GridMode::GridConnected), ValidationError);
}

TEST(Reference, StationaryWhenAllEqual) {
  const IncrementState v{0.33, -0.7};
  const std::vector<IncrementState> pinned = {v, v, v};
  const IncrementState r = scada_reference_update(pinned, v, true, GridMode::GridConnected).ref;
  EXPECT_NEAR(r.x1, v.x1, 1e-15);
  EXPECT_NEAR(r.x2, v.x2, 1e-15);
}

TEST(PccIncrement, Examples) {
  EXPECT_EQ(compute_x_pcc(0.0, 0.3, {2.8, 2.1}).x1, 0.0);
  EXPECT_EQ(compute_x_pcc(2.8, 0.0, {2.8, 2.1}).x1, 1.0);
  EXPECT_DOUBLE_EQ(compute_x_pcc(0.7, 0.0, {2.8, 2.1}).x1, 0.25);
  EXPECT_THROW(compute_x_pcc(0.1, 0.1, {0.0, 1.0}), ValidationError);
}

TEST(ControlParams, StepSizeGate) {
  ControlParams cp;
  cp.step_c = 1.5;
  EXPECT_THROW(cp.validate(), ValidationError);
  cp.step_c = 0.0;
  EXPECT_THROW(cp.validate(), ValidationError);
  cp.step_c = 0.2;
  EXPECT_NO_THROW(cp.validate());
}
