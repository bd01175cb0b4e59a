#include <gtest/gtest.h>

#include <cbce/blackbox.hpp>

#include <cmath>
#include <random>

using namespace cbce;

TEST(CbLea, FirstStepIsPrior) {
  CbLea uniform(4, AN{});
  EXPECT_EQ(uniform.predict(), (Decision{0.25, 0.25, 0.25, 0.25}));
  CbLea warm(2, AN{}, std::vector<double>{0.9, 0.1});
  EXPECT_EQ(warm.predict(), (Decision{0.9, 0.1}));
  EXPECT_THROW(CbLea(3, AN{}, std::vector<double>{0.5, 0.5}), std::invalid_argument);
}

TEST(CbLea, StepMovesTowardsBetterExpert) {
  CbLea cb(2, KT{});
  const Decision p = cb.step(std::vector<double>{0.0, 1.0});
  EXPECT_EQ(p, (Decision{1.0, 0.0}));
}

TEST(Ogd, ZeroGradientKeepsPoint) {
  Ogd ogd({2.0, 1.0, 1.0, 2}, std::vector<double>{0.3, -0.2});
  EXPECT_EQ(ogd.step(std::vector<double>{0.0, 0.0}), (Decision{0.3, -0.2}));
}

TEST(Ogd, FirstStepIsProjected) {
  Ogd ogd({2.0, 1.0, 1.0, 1});
  EXPECT_EQ(ogd.predict(), (Decision{0.0}));
  EXPECT_EQ(ogd.step(std::vector<double>{1.0}), (Decision{-1.0}));
  // Second step: eta = 2 / sqrt 2.
  EXPECT_NEAR(ogd.step(std::vector<double>{-0.5})[0], -1.0 + std::sqrt(2.0) * 0.5, 1e-15);
}

TEST(Ogd, WarmStartIsClippedIntoBall) {
  Ogd ogd({2.0, 1.0, 1.0, 2}, std::vector<double>{3.0, 4.0});
  EXPECT_NEAR(ogd.predict()[0], 0.6, 1e-15);
  EXPECT_NEAR(ogd.predict()[1], 0.8, 1e-15);
}

TEST(Ogd, RejectsGradientAboveLipschitz) {
  Ogd ogd({2.0, 1.0, 1.0, 1});
  EXPECT_THROW(ogd.step(std::vector<double>{1.5}), std::domain_error);
  EXPECT_THROW(Ogd({0.0, 1.0, 1.0, 1}), std::invalid_argument);
}

TEST(Ogd, StaticRegretWithinClassicalBound) {
  // Losses G |x - c_t|; the comparator is checked at every kink and on a
  // fine grid of the domain.
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int c = 0; c < 20; ++c) {
    const double B = 2.0, G = 1.0, T = 512;
    Ogd ogd({B, G, G, 1});
    std::vector<double> centers;
    double algo = 0.0;
    for (int t = 0; t < T; ++t) {
      const double ct = std::clamp(0.5 * u(rng) + (t < T / 2 ? 0.4 : -0.4), -1.0, 1.0);
      centers.push_back(ct);
      const double x = ogd.predict()[0];
      algo += G * std::abs(x - ct);
      ogd.step(std::vector<double>{G * (x > ct ? 1.0 : x < ct ? -1.0 : 0.0)});
    }
    auto total = [&](double x) {
      double s = 0.0;
      for (double ct : centers) s += G * std::abs(x - ct);
      return s;
    };
    double best = total(-1.0);
    for (int k = 0; k <= 2000; ++k) best = std::min(best, total(-1.0 + k / 1000.0));
    for (double ct : centers) best = std::min(best, total(ct));
    EXPECT_LE(algo - best, 1.5 * B * G * std::sqrt(T));
  }
}

TEST(Ftrl, NoHistoryIsCenter) {
  Ftrl f({2.0, 1.0, 1.0, 2});
  EXPECT_EQ(f.predict(), (Decision{0.0, 0.0}));
  Ftrl warm({2.0, 1.0, 1.0, 1}, std::vector<double>{0.5});
  EXPECT_EQ(warm.predict(), (Decision{0.5}));
}

TEST(Ftrl, ClosedFormPoint) {
  Ftrl f({2.0, 1.0, 1.0, 1});
  EXPECT_NEAR(f.step(std::vector<double>{0.5})[0], -0.5 / std::sqrt(1.25), 1e-15);
  EXPECT_NEAR(f.step(std::vector<double>{0.5})[0], -1.0 / std::sqrt(1.5), 1e-15);
  EXPECT_EQ(f.step(std::vector<double>{4.0})[0], -1.0);  // projected
}

TEST(Helpers, ProjectionAndNorm) {
  std::vector<double> x{3.0, 4.0};
  EXPECT_DOUBLE_EQ(norm2(x), 5.0);
  project_ball(x, 1.0);
  EXPECT_NEAR(norm2(x), 1.0, 1e-15);
  std::vector<double> inside{0.1, 0.2};
  project_ball(inside, 1.0);
  EXPECT_EQ(inside, (std::vector<double>{0.1, 0.2}));
  const std::vector<double> l{0.2, 0.6};
  EXPECT_DOUBLE_EQ(LinearLoss{l}.value(std::vector<double>{0.5, 0.5}), 0.4);
}
