#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "blendifs/hausdorff.hpp"
#include "test_systems.hpp"

namespace blendifs {
namespace {

using testing::kUnitBox;

TEST(HausdorffBrute, UnitDistance) {
  const std::vector<Point2> a{{0, 0}}, b{{1, 0}};
  const auto r = hausdorff_brute(a, b);
  EXPECT_EQ(r.directed_ab, 1.0);
  EXPECT_EQ(r.directed_ba, 1.0);
  EXPECT_EQ(r.symmetric, 1.0);
}

TEST(HausdorffBrute, DirectedIsAsymmetric) {
  const std::vector<Point2> a{{0, 0}}, b{{0, 0}, {3, 4}};
  const auto r = hausdorff_brute(a, b);
  EXPECT_EQ(r.directed_ab, 0.0);
  EXPECT_EQ(r.directed_ba, 5.0);
  EXPECT_EQ(r.symmetric, 5.0);
}

TEST(HausdorffBrute, EmptyInput) {
  const std::vector<Point2> a{{0, 0}};
  EXPECT_THROW(hausdorff_brute(a, std::span<const Point2>{}), Error);
}

TEST(Hausdorff, SinglePointsOnGrid) {
  const Grid g(kUnitBox, 4);
  const auto a = DiscreteSet::from_cells(g, std::vector<CellIndex>{{0, 0}});
  const auto b = DiscreteSet::from_cells(g, std::vector<CellIndex>{{4, 0}});
  EXPECT_EQ(hausdorff(a, b).symmetric, 1.0);
  const auto c = DiscreteSet::from_cells(g, std::vector<CellIndex>{{3, 4}});
  EXPECT_DOUBLE_EQ(hausdorff(a, c).symmetric, std::hypot(0.75, 1.0));
}

TEST(Hausdorff, EqualSetsAreAtZero) {
  const Grid g(kUnitBox, 50);
  std::mt19937_64 rng(3);
  const auto a = testing::random_set(g, 0.1, rng);
  EXPECT_EQ(hausdorff(a, a).symmetric, 0.0);
}

TEST(Hausdorff, AgreesWithBruteForce) {
  std::mt19937_64 rng(5);
  for (const Box& box : {kUnitBox, Box{-1, 2, 2, 2.5}}) {
    const Grid g(box, 40);
    for (int t = 0; t < 40; ++t) {
      const double fa = t % 4 == 0 ? 0.002 : 0.05;
      const auto a = testing::random_set(g, fa, rng);
      const auto b = testing::random_set(g, 0.02, rng);
      const auto fast = hausdorff(a, b);
      const auto slow = hausdorff_brute(a, b);
      EXPECT_NEAR(fast.directed_ab, slow.directed_ab, 1e-12);
      EXPECT_NEAR(fast.directed_ba, slow.directed_ba, 1e-12);
    }
  }
}

TEST(Hausdorff, DistanceFieldMatchesNearestMember) {
  const Grid g(Box{0, 0, 2, 1}, 30);
  std::mt19937_64 rng(7);
  const auto target = testing::random_set(g, 0.01, rng);
  const auto members = realize(target);
  const DistanceField field(target);
  for (int j = 0; j <= 30; ++j) {
    for (int i = 0; i <= 30; ++i) {
      double best = 1e300;
      const Point2 p = g.node({i, j});
      for (Point2 q : members) best = std::min(best, distance(p, q));
      ASSERT_NEAR(field.at({i, j}), best, 1e-12) << i << "," << j;
    }
  }
}

TEST(Hausdorff, MetricAxiomsOnRandomTriples) {
  const Grid g(kUnitBox, 64);
  std::mt19937_64 rng(11);
  for (int t = 0; t < 100; ++t) {
    const auto a = testing::random_set(g, 0.003, rng);
    const auto b = testing::random_set(g, 0.003, rng);
    const auto c = testing::random_set(g, 0.003, rng);
    const double ab = hausdorff(a, b).symmetric;
    EXPECT_EQ(ab, hausdorff(b, a).symmetric);
    EXPECT_EQ(ab == 0.0, a == b);
    EXPECT_LE(hausdorff(a, c).symmetric, ab + hausdorff(b, c).symmetric + 1e-12);
  }
}

TEST(Hausdorff, IdenticalAcrossThreadCounts) {
  const Grid g(kUnitBox, 333);
  std::mt19937_64 rng(13);
  const auto a = testing::random_set(g, 0.001, rng);
  const auto b = testing::random_set(g, 0.01, rng);
  const auto one = hausdorff(a, b, {1});
  for (unsigned t : {2U, 5U}) {
    const auto many = hausdorff(a, b, {t});
    EXPECT_EQ(many.directed_ab, one.directed_ab);
    EXPECT_EQ(many.directed_ba, one.directed_ba);
  }
  const auto pa = realize(a), pb = realize(b);
  EXPECT_EQ(hausdorff_brute(pa, pb, {1}).symmetric, hausdorff_brute(pa, pb, {4}).symmetric);
}

TEST(Hausdorff, Errors) {
  const Grid g(kUnitBox, 8), h(kUnitBox, 9);
  EXPECT_THROW(hausdorff(DiscreteSet(g), DiscreteSet::full(g)), Error);
  try {
    hausdorff(DiscreteSet::full(g), DiscreteSet::full(h));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::GridMismatch);
  }
}

}  // namespace
}  // namespace blendifs
