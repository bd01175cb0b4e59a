#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "blackbox.hpp"
#include "intervals.hpp"

namespace cbce {

/// min{1, max{0, raw * scale}}.
inline double normalize_loss(double raw, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("loss scale must be > 0");
  return std::clamp(raw * scale, 0.0, 1.0);
}

namespace detail {

// One generator per (seed, t): streams are reproducible step by step and
// independent of how many steps were drawn before.
inline std::mt19937_64 step_rng(std::uint64_t seed, Time t, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

}  // namespace detail

struct Segment {
  Interval span;
  std::size_t favored = 0;  // 0-based comparator index
};

/// `count` consecutive segments of length ceil(T / count) covering [1..T];
/// segment k favors expert k mod n.
inline std::vector<Segment> even_segments(Time horizon, std::size_t n, std::size_t count = 3) {
  if (horizon == 0 || n == 0 || count == 0) throw std::invalid_argument("segments need T, N, count >= 1");
  const Time len = (horizon + count - 1) / count;
  std::vector<Segment> out;
  for (Time s = 1, k = 0; s <= horizon; s += len, ++k)
    out.push_back({Interval(s, std::min(horizon, s + len - 1)), static_cast<std::size_t>(k % n)});
  return out;
}

inline void validate_segments(std::span<const Segment> segments, Time horizon, std::size_t n) {
  Time next = 1;
  for (const Segment& s : segments) {
    if (s.span.start != next) throw std::invalid_argument("segments must be consecutive from t = 1");
    if (s.favored >= n) throw std::invalid_argument("favored index out of range");
    next = s.span.end + 1;
  }
  if (next != horizon + 1) throw std::invalid_argument("segments must cover [1..T]");
}

inline std::size_t segment_at(std::span<const Segment> segments, Time t) {
  for (std::size_t k = 0; k < segments.size(); ++k)
    if (segments[k].span.contains(t)) return k;
  throw std::out_of_range("time outside scenario horizon");
}

/// Shifting-expert environment: every loss is |N(0, sigma^2)| (plus an
/// optional offset), the segment's favored expert has `favored_bonus`
/// subtracted, and everything is clipped to [0, 1].
struct LEAScenario {
  std::size_t n_experts = 1000;
  Time horizon = 900;
  std::vector<Segment> segments;
  double noise_sigma = 0.5;
  double favored_bonus = 0.5;
  double offset = 0.0;
  std::uint64_t seed = 0;

  static LEAScenario standard(std::uint64_t seed) {
    LEAScenario s;
    s.seed = seed;
    s.segments = even_segments(s.horizon, s.n_experts);
    return s;
  }

  void validate() const {
    if (n_experts == 0 || horizon == 0) throw std::invalid_argument("scenario needs N, T >= 1");
    if (!(noise_sigma >= 0.0)) throw std::invalid_argument("noise sigma must be >= 0");
    validate_segments(segments, horizon, n_experts);
  }

  std::size_t favored_at(Time t) const { return segments[segment_at(segments, t)].favored; }
};

/// Loss of one expert from its raw Gaussian draw.
inline double lea_loss(double raw, bool favored, double bonus, double offset) {
  double l = std::abs(raw) + offset;
  if (favored) l = std::max(l - bonus, 0.0);
  return std::min(l, 1.0);
}

inline std::vector<double> gen_lea_losses(const LEAScenario& sc, Time t) {
  if (t < 1 || t > sc.horizon) throw std::out_of_range("time outside scenario horizon");
  auto rng = detail::step_rng(sc.seed, t, 0);
  std::normal_distribution<double> normal(0.0, sc.noise_sigma);
  const std::size_t fav = sc.favored_at(t);
  std::vector<double> out(sc.n_experts);
  for (std::size_t i = 0; i < sc.n_experts; ++i) out[i] = lea_loss(normal(rng), i == fav, sc.favored_bonus, sc.offset);
  return out;
}

/// f(x) = min{1, ||x - center||^2 / scale}; gradient zero where clipped.
struct QuadraticLoss {
  std::vector<double> center;
  double scale = 1.0;

  double value(std::span<const double> x) const { return std::min(1.0, sq_dist(x) / scale); }

  std::vector<double> gradient(std::span<const double> x) const {
    std::vector<double> g(x.size(), 0.0);
    if (sq_dist(x) > scale) return g;
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * (x[i] - center[i]) / scale;
    return g;
  }

 private:
  double sq_dist(std::span<const double> x) const {
    if (x.size() != center.size()) throw std::invalid_argument("point dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - center[i]) * (x[i] - center[i]);
    return s;
  }
};

struct OCOSegment {
  Interval span;
  std::vector<double> center;
};

/// Shifting quadratic environment on the ball of diameter B. The step
/// center is the segment center moved by +-jitter per coordinate (random
/// signs); it may leave the ball. With scale <= 0 the scale defaults to
/// (B + jitter sqrt(d))^2, the squared largest distance from the ball to
/// any step center, so no loss is ever clipped and every f_t is convex and
/// smooth on the ball. The segment center stays the best fixed point.
struct OCOScenario {
  std::size_t dimension = 1;
  double diameter = 2.0;
  Time horizon = 900;
  std::vector<OCOSegment> segments;
  double jitter = 0.0;
  double scale = 0.0;
  std::uint64_t seed = 0;

  double loss_scale() const {
    if (scale > 0.0) return scale;
    const double reach = diameter + jitter * std::sqrt(static_cast<double>(dimension));
    return reach * reach;
  }
  /// Gradient norm bound on the ball: 2 * (largest distance) / scale.
  double lipschitz() const {
    return 2.0 * (diameter + jitter * std::sqrt(static_cast<double>(dimension))) / loss_scale();
  }

  OCOConfig domain() const { return {diameter, lipschitz(), 2.0 / loss_scale(), dimension}; }

  /// Three segments alternating between +0.8 and -0.8 of the radius along
  /// the first axis.
  static OCOScenario standard(std::uint64_t seed, Time horizon = 900, std::size_t dimension = 1) {
    OCOScenario s;
    s.seed = seed;
    s.horizon = horizon;
    s.dimension = dimension;
    std::size_t k = 0;
    for (const Segment& seg : even_segments(horizon, 1)) {
      std::vector<double> c(dimension, 0.0);
      c[0] = (k++ % 2 == 0 ? 0.8 : -0.8) * s.diameter / 2.0;
      s.segments.push_back({seg.span, std::move(c)});
    }
    return s;
  }

  void validate() const {
    if (dimension == 0 || horizon == 0 || !(diameter > 0.0) || !(jitter >= 0.0)) throw std::invalid_argument("invalid OCO scenario");
    Time next = 1;
    for (const auto& s : segments) {
      if (s.span.start != next || s.center.size() != dimension) throw std::invalid_argument("invalid OCO segments");
      if (norm2(s.center) > diameter / 2.0 + 1e-12) throw std::invalid_argument("segment center outside domain");
      next = s.span.end + 1;
    }
    if (next != horizon + 1) throw std::invalid_argument("OCO segments must cover [1..T]");
  }

  const std::vector<double>& segment_center(Time t) const {
    for (const auto& s : segments)
      if (s.span.contains(t)) return s.center;
    throw std::out_of_range("time outside scenario horizon");
  }
};

inline QuadraticLoss gen_oco_loss(const OCOScenario& sc, Time t) {
  QuadraticLoss f{sc.segment_center(t), sc.loss_scale()};
  if (sc.jitter > 0.0) {
    auto rng = detail::step_rng(sc.seed, t, 1);
    std::bernoulli_distribution coin(0.5);
    for (double& c : f.center) c += coin(rng) ? sc.jitter : -sc.jitter;
  }
  return f;
}

}  // namespace cbce
