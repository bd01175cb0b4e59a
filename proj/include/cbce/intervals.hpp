#pragma once

#include <algorithm>
#include <bit>
#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace cbce {

using Time = std::uint64_t;

/// Closed, 1-indexed time range [start..end].
struct Interval {
  Time start = 1;
  Time end = 1;

  Interval() = default;
  Interval(Time s, Time e) : start(s), end(e) {
    if (s < 1) throw std::invalid_argument("interval start must be >= 1");
    if (e < s) throw std::invalid_argument("interval end precedes start");
  }

  Time length() const { return end - start + 1; }
  bool contains(Time t) const { return start <= t && t <= end; }
  bool operator==(const Interval&) const = default;
  auto operator<=>(const Interval&) const = default;
};

inline std::ostream& operator<<(std::ostream& os, const Interval& iv) {
  return os << '[' << iv.start << ".." << iv.end << ']';
}

inline std::string to_string(const Interval& iv) {
  return "[" + std::to_string(iv.start) + ".." + std::to_string(iv.end) + "]";
}

/// Exponent of the largest power of two dividing t (t >= 1).
inline unsigned two_adic(Time t) { return static_cast<unsigned>(std::countr_zero(t)); }

/// floor(log2 t) for t >= 1.
inline unsigned floor_log2(Time t) { return static_cast<unsigned>(std::bit_width(t) - 1); }

/// Restart schedule: geometric covering (GC) or data streaming (DS) with
/// multiplier g.
struct ScheduleKind {
  enum class Family { GC, DS };
  Family family = Family::DS;
  Time g = 2;

  static ScheduleKind gc() { return {Family::GC, 1}; }
  static ScheduleKind ds(Time g) {
    if (g < 1) throw std::invalid_argument("data streaming multiplier g must be >= 1");
    return {Family::DS, g};
  }
  bool is_gc() const { return family == Family::GC; }
  std::string name() const { return is_gc() ? "GC" : "DS(g=" + std::to_string(g) + ")"; }
};

/// Data streaming interval starting at t: [t .. t + g 2^u(t) - 1].
inline Interval ds_interval(Time t, Time g) { return {t, t + (g << two_adic(t)) - 1}; }

/// Schedule intervals whose first step is t, shortest first.
inline std::vector<Interval> starts_at(const ScheduleKind& kind, Time t) {
  if (t == 0) throw std::invalid_argument("time is 1-indexed");
  if (!kind.is_gc()) return {ds_interval(t, kind.g)};
  std::vector<Interval> out;
  for (unsigned k = 0; k <= two_adic(t); ++k) out.emplace_back(t, t + (Time{1} << k) - 1);
  return out;
}

/// All schedule intervals containing t, sorted by (start, end).
inline std::vector<Interval> active(const ScheduleKind& kind, Time t) {
  if (t == 0) throw std::invalid_argument("time is 1-indexed");
  std::vector<Interval> out;
  const unsigned top = floor_log2(t);
  if (kind.is_gc()) {
    for (unsigned k = 0; k <= top; ++k) {
      const Time start = (t >> k) << k;
      out.emplace_back(start, start + (Time{1} << k) - 1);
    }
  } else {
    // A start s with u(s) = k covers t iff t - g 2^k < s <= t; such s are
    // odd multiples of 2^k, and 2^k <= s <= t bounds k by floor(log2 t).
    for (unsigned k = 0; k <= top; ++k) {
      const Time len = kind.g << k;
      const Time lo = t >= len ? t - len + 1 : 1;
      const Time step = Time{1} << k;
      for (Time s = ((lo + step - 1) >> k) << k; s <= t; s += step)
        if (s >= 1 && two_adic(s) == k) out.emplace_back(s, s + len - 1);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

/// Partition of `target` into consecutive geometric covering intervals.
///
/// Greedy from the left: at each position take the longest GC member that
/// starts there and still fits. Lengths strictly double up to the peak
/// block and at least halve after it.
inline std::vector<Interval> partition_gc(const Interval& target) {
  std::vector<Interval> out;
  Time pos = target.start;
  while (pos <= target.end) {
    unsigned k = two_adic(pos);
    while ((Time{1} << k) > target.end - pos + 1) --k;
    out.emplace_back(pos, pos + (Time{1} << k) - 1);
    pos += Time{1} << k;
  }
  return out;
}

/// Partition of `target` into prefixes of data streaming intervals.
///
/// Each block starting at p has length 2^u(p) (the g = 1 interval at p,
/// itself a prefix of the DS(g) interval at p); the last block is cut at
/// target.end. Lengths at least double between blocks except possibly into
/// the truncated final block.
inline std::vector<Interval> partition_ds(const Interval& target, Time g) {
  if (g < 1) throw std::invalid_argument("data streaming multiplier g must be >= 1");
  std::vector<Interval> out;
  Time pos = target.start;
  while (pos <= target.end) {
    const Time len = Time{1} << two_adic(pos);
    const Time end = std::min(target.end, pos + len - 1);
    out.emplace_back(pos, end);
    pos = end + 1;
  }
  return out;
}

}  // namespace cbce
