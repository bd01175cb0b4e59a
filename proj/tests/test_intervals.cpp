#include <gtest/gtest.h>

#include <cbce/intervals.hpp>

#include <random>

#include "oracles.hpp"

using namespace cbce;

namespace {

std::vector<oracle::Span> spans(const std::vector<Interval>& v) {
  std::vector<oracle::Span> out;
  for (const auto& iv : v) out.push_back({iv.start, iv.end});
  return out;
}

using IV = std::vector<Interval>;

}  // namespace

TEST(Interval, Validates) {
  EXPECT_THROW(Interval(0, 3), std::invalid_argument);
  EXPECT_THROW(Interval(5, 4), std::invalid_argument);
  EXPECT_EQ(Interval(3, 7).length(), 5u);
  EXPECT_TRUE(Interval(3, 7).contains(7));
  EXPECT_EQ(to_string(Interval(3, 7)), "[3..7]");
}

TEST(Schedule, StartsAt) {
  EXPECT_EQ(starts_at(ScheduleKind::gc(), 6), (IV{{6, 6}, {6, 7}}));
  EXPECT_EQ(starts_at(ScheduleKind::ds(1), 12), (IV{{12, 15}}));
  EXPECT_EQ(starts_at(ScheduleKind::ds(2), 1), (IV{{1, 2}}));
  EXPECT_THROW(starts_at(ScheduleKind::gc(), 0), std::invalid_argument);
}

TEST(Schedule, ActiveExamples) {
  EXPECT_EQ(active(ScheduleKind::gc(), 1), (IV{{1, 1}}));
  EXPECT_EQ(active(ScheduleKind::gc(), 6), (IV{{4, 7}, {6, 6}, {6, 7}}));
  EXPECT_EQ(active(ScheduleKind::ds(1), 7), (IV{{4, 7}, {6, 7}, {7, 7}}));
}

TEST(Schedule, ActiveMatchesBruteForceScan) {
  for (Time t = 1; t <= 700; ++t) {
    ASSERT_EQ(spans(active(ScheduleKind::gc(), t)), oracle::active_scan(true, 1, t)) << "GC t=" << t;
    for (Time g : {1, 2, 3, 5})
      ASSERT_EQ(spans(active(ScheduleKind::ds(g), t)), oracle::active_scan(false, g, t)) << "DS g=" << g << " t=" << t;
  }
}

TEST(Schedule, GcActiveCardinality) {
  for (Time t = 1; t <= 5000; ++t) {
    unsigned k = 0;
    while ((Time{2} << k) <= t) ++k;
    ASSERT_EQ(active(ScheduleKind::gc(), t).size(), k + 1u) << t;
  }
}

TEST(Schedule, DsActiveSetIsLogarithmic) {
  for (Time t = 1; t <= 4096; ++t) EXPECT_LE(active(ScheduleKind::ds(2), t).size(), 2 * (floor_log2(t) + 1));
}

TEST(Partition, GcExamples) {
  EXPECT_EQ(partition_gc({1, 1}), (IV{{1, 1}}));
  EXPECT_EQ(partition_gc({5, 12}), (IV{{5, 5}, {6, 7}, {8, 11}, {12, 12}}));
  EXPECT_EQ(partition_gc({4, 7}), (IV{{4, 7}}));
}

TEST(Partition, DsExamples) {
  EXPECT_EQ(partition_ds({3, 6}, 1), (IV{{3, 3}, {4, 6}}));
  EXPECT_EQ(partition_ds({8, 15}, 1), (IV{{8, 15}}));
  EXPECT_EQ(partition_ds({3, 10}, 1), (IV{{3, 3}, {4, 7}, {8, 10}}));
  // Blocks have length 2^u(p) for every g, so the >= 2 ratio holds.
  EXPECT_EQ(partition_ds({1, 3}, 2), (IV{{1, 1}, {2, 3}}));
}

TEST(Partition, BlocksAreScheduleMembers) {
  std::mt19937_64 rng(9);
  for (int c = 0; c < 300; ++c) {
    const Time a = 1 + rng() % 3000, b = 1 + rng() % 3000;
    const Interval target(std::min(a, b), std::max(a, b));
    Time next = target.start;
    for (const auto& iv : partition_gc(target)) {
      EXPECT_EQ(iv.start, next);
      next = iv.end + 1;
      const auto members = oracle::active_scan(true, 1, iv.start);
      EXPECT_NE(std::find(members.begin(), members.end(), oracle::Span{iv.start, iv.end}), members.end()) << iv;
    }
    EXPECT_EQ(next, target.end + 1);
    next = target.start;
    for (const auto& iv : partition_ds(target, 3)) {
      EXPECT_EQ(iv.start, next);
      next = iv.end + 1;
      EXPECT_LE(iv.end, ds_interval(iv.start, 3).end) << iv;
    }
    EXPECT_EQ(next, target.end + 1);
  }
}

TEST(Helpers, TwoAdicAndLog) {
  EXPECT_EQ(two_adic(12), 2u);
  EXPECT_EQ(two_adic(1), 0u);
  EXPECT_EQ(floor_log2(1), 0u);
  EXPECT_EQ(floor_log2(65536), 16u);
  EXPECT_EQ(ds_interval(12, 2), Interval(12, 19));
  EXPECT_THROW(ScheduleKind::ds(0), std::invalid_argument);
}
