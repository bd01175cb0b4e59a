#include <gtest/gtest.h>

#include <cbce/checks.hpp>
#include <cbce/meta.hpp>

#include <cmath>
#include <map>
#include <random>

using namespace cbce;

TEST(Prior, BarPiWeights) {
  EXPECT_DOUBLE_EQ(prior_weight(PriorKind::BarPi, 1), 1.0);
  EXPECT_DOUBLE_EQ(prior_weight(PriorKind::BarPi, 2), 0.125);
  EXPECT_DOUBLE_EQ(prior_weight(PriorKind::BarPi, 4), 1.0 / 48.0);
  EXPECT_EQ(prior_weight(PriorKind::Uniform, 77), 1.0);
  EXPECT_THROW(parse_prior("flat"), std::invalid_argument);
}

TEST(Bounds, FrozenValues) {
  EXPECT_NEAR(meta_regret_bound({5, 8}), std::sqrt(4.0 * (7.0 * std::log(8.0) + 5.0)), 1e-12);
  EXPECT_NEAR(meta_regret_bound({5, 8}), 8.8444, 1e-4);
  EXPECT_NEAR(meta_regret_bound({1, 1}), std::sqrt(5.0), 1e-15);
  EXPECT_NEAR(sa_regret_bound({1, 16}, 0.5, 1.0), 196.7, 0.05);
  EXPECT_THROW(sa_regret_bound({1, 16}, 1.0, 1.0), std::invalid_argument);
}

namespace {

Cbce<CbLea> make(std::size_t n, ScheduleKind sched, PotentialKind kind, PriorKind prior, bool warm) {
  return Cbce<CbLea>(sched, cb_lea_factory(n, AN{}), CbcePolicy{kind, prior}, warm);
}

}  // namespace

TEST(Cbce, FirstStepUsesTheOnlyRun) {
  auto meta = make(3, ScheduleKind::ds(2), AN{}, PriorKind::Uniform, true);
  const auto& d = meta.predict(1);
  ASSERT_EQ(d.runs.size(), 1u);
  EXPECT_EQ(d.run_weights[0], 1.0);
  EXPECT_EQ(d.point, (Decision{1.0 / 3, 1.0 / 3, 1.0 / 3}));
}

TEST(Cbce, SecondStepFallsBackToPriorOverLiveRuns) {
  auto meta = make(2, ScheduleKind::gc(), KT{}, PriorKind::Uniform, false);
  meta.predict(1);
  meta.observe(1, LinearLoss{std::vector<double>{0.2, 0.7}});
  const auto& d = meta.predict(2);
  EXPECT_EQ(d.runs, (std::vector<Interval>{{2, 2}, {2, 3}}));
  EXPECT_TRUE(d.used_prior_fallback);
  EXPECT_EQ(d.run_weights, (std::vector<double>{0.5, 0.5}));
}

TEST(Cbce, FallbackUsesBarPiPrior) {
  auto meta = make(2, ScheduleKind::gc(), KT{}, PriorKind::BarPi, false);
  const std::vector<double> l{0.3, 0.3};
  for (Time t = 1; t <= 3; ++t) {
    meta.predict(t);
    meta.observe(t, LinearLoss{l});
  }
  // Runs [4..4], [4..5], [4..7]: identical priors, and no wager yet.
  const auto& d = meta.predict(4);
  ASSERT_EQ(d.runs.size(), 3u);
  EXPECT_TRUE(d.used_prior_fallback);
  for (double w : d.run_weights) EXPECT_DOUBLE_EQ(w, 1.0 / 3.0);
}

TEST(CbcePolicy, FlipRule) {
  CbcePolicy policy{KT{}};
  CbcePolicy::RunState s;
  s.bettor.pending_wager = 0.0;
  policy.update(s, 0.4, 0.7);
  EXPECT_EQ(s.bettor.sum_z, 0.0);

  CbcePolicy::RunState pos;
  pos.bettor.pending_wager = 0.2;
  policy.update(pos, 0.4, 0.1);
  EXPECT_NEAR(pos.bettor.sum_z, 0.3, 1e-15);
  EXPECT_NEAR(pos.bettor.wealth, 1.06, 1e-15);

  CbcePolicy::RunState neg;
  neg.bettor.pending_wager = 0.2;
  policy.update(neg, 0.4, 0.7);
  EXPECT_NEAR(neg.bettor.sum_z, -0.3, 1e-15);
}

TEST(Cbce, IdenticalRunsHaveNoMetaRegret) {
  // Without warm start every run starts uniform and sees the same losses
  // from its start, so runs that started together agree; a single run
  // matches the meta decision exactly.
  auto meta = make(2, ScheduleKind::ds(2), AN{}, PriorKind::Uniform, false);
  meta.predict(1);
  const MetaStep step = meta.observe(1, LinearLoss{std::vector<double>{0.1, 0.9}});
  ASSERT_EQ(step.runs.size(), 1u);
  EXPECT_EQ(step.meta_loss, step.runs[0].loss);
  EXPECT_EQ(step.meta_loss, step.mixture_loss);
}

TEST(Cbce, EnforcesStepOrder) {
  auto meta = make(2, ScheduleKind::gc(), AN{}, PriorKind::Uniform, true);
  EXPECT_THROW(meta.predict(2), std::logic_error);
  meta.predict(1);
  EXPECT_THROW(meta.predict(2), std::logic_error);
  EXPECT_THROW(meta.observe(2, LinearLoss{std::vector<double>{0.0, 0.0}}), std::logic_error);
}

TEST(Cbce, RejectsLossOutsideUnitInterval) {
  auto meta = make(2, ScheduleKind::gc(), AN{}, PriorKind::Uniform, true);
  meta.predict(1);
  EXPECT_THROW(meta.observe(1, LinearLoss{std::vector<double>{1.5, 1.5}}), std::domain_error);
}

TEST(Cbce, WarmStartHintIsPreviousDecision) {
  std::vector<std::pair<Time, std::optional<Decision>>> seen;
  LearnerFactory<CbLea> factory = [&](const Interval& iv, const std::optional<Decision>& hint) {
    seen.emplace_back(iv.start, hint);
    return CbLea(2, AN{}, hint);
  };
  Cbce<CbLea> meta(ScheduleKind::ds(1), factory, CbcePolicy{}, true);
  Decision previous;
  for (Time t = 1; t <= 4; ++t) {
    previous = meta.predict(t).point;
    meta.observe(t, LinearLoss{std::vector<double>{0.0, 1.0}});
  }
  ASSERT_EQ(seen.size(), 4u);
  EXPECT_FALSE(seen[0].second.has_value());
  for (std::size_t k = 1; k < seen.size(); ++k) EXPECT_TRUE(seen[k].second.has_value());
  EXPECT_EQ(*seen.back().second, meta.last_decision().point);
}

TEST(Cbce, RetiresExpiredRuns) {
  auto meta = make(2, ScheduleKind::gc(), AN{}, PriorKind::Uniform, false);
  for (Time t = 1; t <= 64; ++t) {
    meta.predict(t);
    EXPECT_EQ(meta.live_runs(), floor_log2(t) + 1u);
    meta.observe(t, LinearLoss{std::vector<double>{0.5, 0.5}});
  }
}

TEST(Cbce, MetaRegretWithinRunBound) {
  std::mt19937_64 rng(13);
  for (int c = 0; c < 20; ++c) {
    const std::size_t n = 2 + rng() % 7;
    const auto inst = detail::random_lea_instance(rng, n, 256, false);
    Cbce<CbLea> meta(ScheduleKind::gc(), cb_lea_factory(n, KT{}), CbcePolicy{KT{}, PriorKind::BarPi}, false);
    std::map<Interval, double> regret;
    for (Time t = 1; t <= inst.horizon; ++t) {
      meta.predict(t);
      const auto step = meta.observe(t, LinearLoss{inst.row(t)});
      for (const auto& r : step.runs) regret[r.interval] += step.meta_loss - r.loss;
    }
    for (const auto& [iv, r] : regret) EXPECT_LE(r, meta_regret_bound({iv.start, std::min(iv.end, inst.horizon)})) << iv;
  }
}
