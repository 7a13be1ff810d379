#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "blendifs/metrics.hpp"
#include "test_systems.hpp"

namespace blendifs {
namespace {

using testing::kUnitBox;

const std::vector<double> kTwo{0.5, 0.8};
const std::vector<double> kThree{0.5, 0.8, 0.5435};

TEST(BetaDefinition, HandEvaluatedExample) {
  // gamma = (1, 0.5, 0.4); only k = 2 carries a symbol other than 1.
  const auto b = beta_definition(BlendingSequence({1, 2, 1}), kTwo, 1);
  EXPECT_DOUBLE_EQ(b.lower, 1.5);
  EXPECT_DOUBLE_EQ(b.tail_bound, 0.5 * 0.8 * 0.5 / 0.2);
  EXPECT_DOUBLE_EQ(b.upper, b.lower + b.tail_bound);
}

TEST(BetaDefinition, ConstantSequenceIsOne) {
  for (int i : {1, 2}) {
    const auto b = beta_definition(BlendingSequence::constant(i, 30), kTwo, i);
    EXPECT_EQ(b.lower, 1.0);
  }
}

TEST(BetaDefinition, BoundedByGeometricSeries) {
  std::mt19937_64 rng(1);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto theta = generate_theta(seed, 1 + static_cast<std::int64_t>(seed % 60), 3);
    for (int i = 1; i <= 3; ++i) {
      const auto b = beta_definition(theta, kThree, i);
      EXPECT_GE(b.lower, 1.0);
      EXPECT_LE(b.upper, 1.0 / (1.0 - 0.8) + 1e-12);
    }
  }
}

TEST(BetaDefinition, ReplacingASymbolByIDoesNotIncreaseLower) {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    auto syms = generate_theta(seed, 15, 2).symbols();
    const auto before = beta_definition(BlendingSequence(syms), kTwo, 1).lower;
    for (std::size_t k = 1; k < syms.size(); ++k) {
      if (syms[k] != 1) {
        syms[k] = 1;
        break;
      }
    }
    EXPECT_LE(beta_definition(BlendingSequence(syms), kTwo, 1).lower, before);
  }
}

TEST(BetaDefinition, Errors) {
  EXPECT_THROW(beta_definition(BlendingSequence({1, 3}), kTwo, 1), Error);
  EXPECT_THROW(beta_definition(BlendingSequence({1}), kTwo, 0), Error);
  EXPECT_THROW(beta_definition(BlendingSequence({1}), kTwo, 3), Error);
  const std::vector<double> bad{0.5, 1.0};
  EXPECT_THROW(beta_definition(BlendingSequence({1}), bad, 1), Error);
}

TEST(BetaExamples, TenDecimalValues) {
  const auto theta = parse_theta("1,2,2,2,2,2,2,2,1,2,1,2,2,1,1,1,1,1,1,1");
  EXPECT_NEAR(beta_examples(theta, kTwo, 1), 2.6527116288, 1e-10);
  EXPECT_NEAR(beta_examples(theta, kTwo, 2), 1.5867172352, 1e-10);
}

TEST(BetaExamples, FirstTwoSystemBlend) {
  const auto theta = parse_theta("1,1,2,1,2,1,1,2,2,1,1,2,2,2,2,1,1,1,1,1");
  EXPECT_NEAR(beta_examples(theta, kTwo, 1), 1.31635712, 1e-12);
}

TEST(BetaExamples, NearlyConstantThreeSystemBlend) {
  const auto theta = parse_theta("1,1,1,1,1,2,1,2,2,1,1,3,2,3,3,2,3,1,3,3");
  EXPECT_NEAR(beta_examples(theta, kThree, 1), 1.0460, 5e-4);
}

TEST(BetaExamples, OneExactlyWhenConstant) {
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto theta = generate_theta(seed, 1 + static_cast<std::int64_t>(seed % 6), 2);
    for (int i : {1, 2}) {
      const bool constant = theta.max_symbol() == i &&
                            std::all_of(theta.symbols().begin(), theta.symbols().end(), [&](int s) { return s == i; });
      EXPECT_EQ(beta_examples(theta, kTwo, i) == 1.0, constant);
    }
  }
}

TEST(BetaReport, OneEntryPerSystem) {
  const auto theta = parse_theta("1,2,1");
  const auto r = beta_report(theta, kTwo);
  ASSERT_EQ(r.entries.size(), 2U);
  EXPECT_EQ(r.entries[1].system, 2);
  EXPECT_DOUBLE_EQ(r.entries[0].beta_def_lower, 1.5);
  EXPECT_DOUBLE_EQ(r.entries[0].beta_examples, beta_examples(theta, kTwo, 1));
  EXPECT_DOUBLE_EQ(r.tail_bound, 0.2 / 0.2);
}

TEST(CoveringRadii, SelfmaxThreeSystems) {
  const auto r = covering_radii_selfmax(kThree, 1.0);
  EXPECT_EQ(r.variant, RadiusVariant::selfmax);
  EXPECT_NEAR(r.radii[0], 2.5, 1e-12);
  EXPECT_NEAR(r.radii[1], 4.0, 1e-12);
  EXPECT_NEAR(r.radii[2], 2.7175, 1e-12);
  // Printed to two decimals by cutting: 2.5 * 0.41 = 1.025 appears as 1.02.
  const auto s = covering_radii_selfmax(kThree, 0.41);
  const double printed[] = {1.02, 1.64, 1.11};
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_GE(s.radii[i], printed[i] - 1e-12);
    EXPECT_LT(s.radii[i], printed[i] + 0.01);
  }
}

TEST(CoveringRadii, SelfmaxZeroAndEqualLambdas) {
  for (double r : covering_radii_selfmax(kThree, 0.0).radii) EXPECT_EQ(r, 0.0);
  const std::vector<double> same{0.6, 0.6, 0.6};
  for (double r : covering_radii_selfmax(same, 2.0).radii) EXPECT_NEAR(r, 0.6 * 2.0 / 0.4, 1e-12);
}

TEST(CoveringRadii, ExcludingSelfClosedForm) {
  const auto r = covering_radii_thm31(kThree, 1.0);
  EXPECT_EQ(r.variant, RadiusVariant::theorem31);
  const double denom = 1 - 0.5435 * 0.8;
  EXPECT_NEAR(r.radii[0], 0.5 * 1.8 / denom, 1e-12);
  EXPECT_NEAR(r.radii[1], 0.8 * 1.5435 / denom, 1e-12);
  EXPECT_NEAR(r.radii[2], 0.5435 * 1.8 / denom, 1e-12);
  EXPECT_NEAR(r.radii[0], 1.592357, 1e-6);
  EXPECT_NEAR(r.radii[1], 2.184713, 1e-6);
  EXPECT_NEAR(r.radii[2], 1.730892, 1e-6);
}

TEST(CoveringRadii, ExcludingSelfSolvesItsFixedPointEquation) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> lam(2 + static_cast<std::size_t>(t % 4));
    for (auto& l : lam) l = u(rng);
    const double m = 0.7;
    const auto r = covering_radii_thm31(lam, m).radii;
    for (std::size_t i = 0; i < lam.size(); ++i) {
      double other = 0;
      for (std::size_t j = 0; j < lam.size(); ++j) {
        if (j != i) other = std::max(other, r[j]);
      }
      EXPECT_NEAR(r[i], lam[i] * (m + other), 1e-9);
    }
  }
}

TEST(CoveringRadii, ExcludingSelfEqualPair) {
  const std::vector<double> pair{0.3, 0.3};
  const auto r = covering_radii_thm31(pair, 1.0).radii;
  EXPECT_NEAR(r[0], 0.3 / 0.7, 1e-12);
  EXPECT_NEAR(r[1], 0.3 / 0.7, 1e-12);
}

TEST(CoveringRadii, ExcludingSelfFollowsLambdaOrder) {
  const std::vector<double> lam{0.7, 0.2, 0.5, 0.4};
  const auto r = covering_radii_thm31(lam, 1.0).radii;
  EXPECT_LT(r[1], r[3]);
  EXPECT_LT(r[3], r[2]);
  EXPECT_LT(r[2], r[0]);
}

TEST(CoveringRadii, Errors) {
  const std::vector<double> one{0.5};
  try {
    covering_radii_thm31(one, 1.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NeedTwoSystems);
  }
  const std::vector<double> bad{0.5, 1.2};
  EXPECT_THROW(covering_radii_selfmax(bad, 1.0), Error);
  EXPECT_THROW(covering_radii_thm31(bad, 1.0), Error);
}

TEST(SelfDissimilarity, SingleSystemFamilyIsTiny) {
  const BlendSystem single(kUnitBox, {testing::sierpinski()});
  const Grid g(kUnitBox, 256);
  const auto attractors = compute_attractors(single, g, 20);
  EXPECT_LE(delta_self_dissimilarity(single, g, 1, attractors), 2 * g.epsilon() + 1e-12);
}

TEST(SelfDissimilarity, PositiveAndStableAcrossResolutions) {
  const auto sys = testing::two_systems();
  double previous = -1;
  for (int m : {256, 512}) {
    const Grid g(kUnitBox, m);
    const auto attractors = compute_attractors(sys, g, 30);
    const double d = delta_self_dissimilarity(sys, g, 1, attractors);
    EXPECT_GT(d, 0.1);
    if (previous >= 0) {
      EXPECT_NEAR(d, previous, Grid(kUnitBox, 256).cell_diagonal());
    }
    previous = d;
  }
}

TEST(BoundCheck, ConstantSequenceIsTheAttractor) {
  const auto sys = testing::two_systems();
  const Grid g(kUnitBox, 128);
  const auto r = bound_check(sys, g, BlendingSequence::constant(2, 20), 2);
  EXPECT_LE(r.measured, 2 * r.error_bound_worst);
  EXPECT_TRUE(r.slack_ok);
}

TEST(BoundCheck, RandomSequencesAtModestResolution) {
  const auto sys = testing::two_systems();
  const Grid g(kUnitBox, 128);
  const auto attractors = compute_attractors(sys, g, 20);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto theta = generate_theta(seed, 20, 2);
    for (int i0 : {1, 2}) {
      const auto r = bound_check(sys, g, theta, i0, attractors[static_cast<std::size_t>(i0 - 1)]);
      EXPECT_TRUE(r.slack_ok) << "seed " << seed << " i0 " << i0 << ": " << r.measured << " > " << r.bound;
    }
  }
}

TEST(Envelope, SomeAttractorCoversEachBlend) {
  const auto sys = testing::three_systems();
  const Grid g(kUnitBox, 128);
  const auto attractors = compute_attractors(sys, g, 25);
  const auto radii = covering_radii_selfmax(system_lambdas(sys), attractor_spread(attractors)).radii;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const auto blend = blend_approx(sys, g, generate_theta(seed, 25, 3));
    bool covered = false;
    for (std::size_t j = 0; j < 3; ++j) {
      const double d = hausdorff(blend.output, attractors[j]).symmetric;
      covered = covered || d - 2 * blend.error_bound_worst <= radii[j];
    }
    EXPECT_TRUE(covered) << seed;
  }
}

}  // namespace
}  // namespace blendifs
