#include <gtest/gtest.h>

#include <cbce/baselines.hpp>
#include <cbce/experiment.hpp>

#include <cmath>

using namespace cbce;

TEST(FixedShare, ExponentialStep) {
  FixedShare fs(2, std::log(2.0), 0.0);
  const auto& p = fs.step(std::vector<double>{0.0, 1.0});
  EXPECT_NEAR(p[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p[1], 1.0 / 3.0, 1e-15);
}

TEST(FixedShare, FullSharingIsUniform) {
  FixedShare fs(4, 3.0, 1.0);
  for (double p : fs.step(std::vector<double>{0.0, 1.0, 0.3, 0.9})) EXPECT_DOUBLE_EQ(p, 0.25);
}

TEST(FixedShare, HalfSharing) {
  FixedShare fs(2, std::log(2.0), 0.5);
  const auto& p = fs.step(std::vector<double>{0.0, 1.0});
  EXPECT_NEAR(p[0], 0.25 + 0.5 * 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(p[1], 0.25 + 0.5 / 3.0, 1e-15);
}

TEST(FixedShare, TunedParameters) {
  const auto fs = FixedShare::tuned(1000, 900, 2);
  EXPECT_DOUBLE_EQ(fs.alpha(), 2.0 / 899.0);
  EXPECT_DOUBLE_EQ(fs.eta(), std::sqrt(8.0 * (2.0 * std::log(1000.0) + 3.0) / 900.0));
  EXPECT_THROW(FixedShare(2, 0.0, 0.1), std::invalid_argument);
  EXPECT_THROW(FixedShare(2, 1.0, 1.1), std::invalid_argument);
}

TEST(FixedShare, LargeEtaDoesNotUnderflow) {
  FixedShare fs(2, 5000.0, 0.0);
  const auto& p = fs.step(std::vector<double>{0.9, 1.0});
  EXPECT_NEAR(p[0], 1.0, 1e-12);
  EXPECT_TRUE(std::isfinite(p[1]));
}

TEST(Atv, FreshRestartWeight) {
  EXPECT_NEAR(atv_weight(0.0, 0.0), 0.5 * (std::exp(1.0 / 3.0) - 1.0), 1e-15);
  EXPECT_NEAR(atv_weight(0.0, 0.0), 0.1978, 1e-4);
  EXPECT_EQ(atv_potential(5.0, 0.0), 1.0);
  EXPECT_EQ(atv_potential(-2.0, 3.0), 1.0);
}

TEST(Atv, FallsBackToPriorWhenAllWeightsVanish) {
  AtvPolicy policy{PriorKind::BarPi};
  auto s = policy.spawn({2, 3});
  s.regret = -5.0;
  s.abs_regret = 5.0;
  EXPECT_EQ(policy.score(s), 0.0);
  EXPECT_DOUBLE_EQ(policy.fallback(s), 0.125);
}

TEST(Saol, SpawnAndUpdate) {
  SaolPolicy policy;
  auto s = policy.spawn({1, 16});
  EXPECT_DOUBLE_EQ(s.eta, 0.25);
  EXPECT_DOUBLE_EQ(s.weight, 0.25);
  policy.update(s, 0.5, 0.1);
  EXPECT_DOUBLE_EQ(s.weight, 0.25 * (1.0 + 0.25 * 0.4));
  EXPECT_DOUBLE_EQ(policy.spawn({3, 3}).eta, 0.5);
}

TEST(Baselines, SingleActiveRestartGetsWeightOne) {
  Saol<CbLea> saol(ScheduleKind::gc(), cb_lea_factory(2, AN{}), SaolPolicy{}, true);
  EXPECT_EQ(saol.predict(1).run_weights, (std::vector<double>{1.0}));
  Atv<CbLea> atv(ScheduleKind::gc(), cb_lea_factory(2, AN{}), AtvPolicy{}, true);
  EXPECT_EQ(atv.predict(1).run_weights, (std::vector<double>{1.0}));
}
