#include <gtest/gtest.h>

#include <cbce/scenarios.hpp>

#include <cmath>
#include <random>

using namespace cbce;

TEST(LeaLoss, Examples) {
  EXPECT_NEAR(lea_loss(0.8, true, 0.5, 0.0), 0.3, 1e-15);
  EXPECT_EQ(lea_loss(1.7, false, 0.5, 0.0), 1.0);
  EXPECT_EQ(lea_loss(0.2, true, 0.5, 0.0), 0.0);
  EXPECT_EQ(lea_loss(-0.3, false, 0.5, 0.0), 0.3);
}

TEST(NormalizeLoss, Examples) {
  EXPECT_EQ(normalize_loss(5.0, 0.2), 1.0);
  EXPECT_EQ(normalize_loss(0.0, 0.2), 0.0);
  EXPECT_DOUBLE_EQ(normalize_loss(2.5, 0.2), 0.5);
  EXPECT_THROW(normalize_loss(1.0, 0.0), std::invalid_argument);
}

TEST(Segments, StandardLayout) {
  const auto s = LEAScenario::standard(0);
  ASSERT_EQ(s.segments.size(), 3u);
  EXPECT_EQ(s.segments[1].span, Interval(301, 600));
  EXPECT_EQ(s.favored_at(1), 0u);
  EXPECT_EQ(s.favored_at(301), 1u);
  EXPECT_EQ(s.favored_at(900), 2u);
  EXPECT_THROW(s.favored_at(901), std::out_of_range);
}

TEST(GenLea, DeterministicAndBounded) {
  const auto s = LEAScenario::standard(42);
  const auto a = gen_lea_losses(s, 17), b = gen_lea_losses(s, 17);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, gen_lea_losses(s, 18));
  EXPECT_NE(a, gen_lea_losses(LEAScenario::standard(43), 17));
  for (double l : a) {
    EXPECT_GE(l, 0.0);
    EXPECT_LE(l, 1.0);
  }
}

TEST(GenLea, FavoredExpertIsBestOnAverage) {
  // E|N(0, 1/4)| = 0.5 sqrt(2/pi) ~ 0.399; the favored mean is about 0.08.
  auto s = LEAScenario::standard(1);
  s.n_experts = 50;
  s.segments = even_segments(s.horizon, s.n_experts);
  std::vector<double> mean(3, 0.0);
  double others = 0.0;
  for (Time t = 301; t <= 600; ++t) {
    const auto l = gen_lea_losses(s, t);
    for (std::size_t i = 0; i < 3; ++i) mean[i] += l[i] / 300.0;
    others += l[10] / 300.0;
  }
  EXPECT_LT(mean[1], 0.15);
  EXPECT_NEAR(mean[0], 0.399, 0.06);
  EXPECT_NEAR(others, 0.399, 0.06);
}

TEST(Quadratic, ValueAndGradient) {
  const QuadraticLoss f{{0.0}, 4.0};
  EXPECT_EQ(f.value(std::vector<double>{0.0}), 0.0);
  EXPECT_EQ(f.gradient(std::vector<double>{0.0}), (std::vector<double>{0.0}));
  EXPECT_DOUBLE_EQ(f.value(std::vector<double>{1.0}), 0.25);
  EXPECT_DOUBLE_EQ(f.gradient(std::vector<double>{1.0})[0], 0.5);
  EXPECT_EQ(f.value(std::vector<double>{3.0}), 1.0);
  EXPECT_EQ(f.gradient(std::vector<double>{3.0})[0], 0.0);
}

TEST(Quadratic, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int c = 0; c < 200; ++c) {
    const QuadraticLoss f{{0.5 * u(rng), 0.5 * u(rng), 0.5 * u(rng)}, 9.0};
    std::vector<double> x{u(rng), u(rng), u(rng)};
    const auto g = f.gradient(x);
    for (std::size_t i = 0; i < 3; ++i) {
      auto hi = x, lo = x;
      hi[i] += 1e-5;
      lo[i] -= 1e-5;
      EXPECT_NEAR(g[i], (f.value(hi) - f.value(lo)) / 2e-5, 1e-6);
    }
  }
}

TEST(Oco, DefaultScaleNeverClips) {
  auto sc = OCOScenario::standard(3, 300, 2);
  sc.jitter = 0.7;
  sc.validate();
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (Time t = 1; t <= sc.horizon; ++t) {
    const auto f = gen_oco_loss(sc, t);
    std::vector<double> x{u(rng), u(rng)};
    project_ball(x, sc.diameter / 2.0);
    EXPECT_LT(f.value(x), 1.0);
    EXPECT_LE(norm2(f.gradient(x)), sc.lipschitz() + 1e-12);
  }
}

TEST(Oco, JitterMovesCentersBySign) {
  auto sc = OCOScenario::standard(5);
  EXPECT_EQ(gen_oco_loss(sc, 1).center, (std::vector<double>{0.8}));
  EXPECT_EQ(gen_oco_loss(sc, 301).center, (std::vector<double>{-0.8}));
  sc.jitter = 0.5;
  const double c = gen_oco_loss(sc, 10).center[0];
  EXPECT_TRUE(std::abs(c - 1.3) < 1e-15 || std::abs(c - 0.3) < 1e-15);
  EXPECT_DOUBLE_EQ(sc.loss_scale(), 2.5 * 2.5);
}
