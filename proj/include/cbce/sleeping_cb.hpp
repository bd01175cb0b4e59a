#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "potentials.hpp"

namespace cbce {

struct ExpertPrediction {
  std::vector<double> weights;
  std::vector<bool> awake_mask;
  std::vector<double> wagers;  // w_{t,i}; 0 for sleeping experts
  bool used_prior_fallback = false;
};

/// What update() did at one step; enough to audit the flips after the fact.
struct SleepingCBStep {
  double h = 0.0;                 // <loss, p> over awake experts
  std::vector<double> flips;      // z_{t,i}
  std::vector<double> wagers;     // w_{t,i}
};

inline std::vector<double> uniform_prior(std::size_t n) {
  if (n == 0) throw std::invalid_argument("prior needs at least one expert");
  return std::vector<double>(n, 1.0 / static_cast<double>(n));
}

/// Coin-betting aggregation over N sleeping experts.
///
/// Each expert keeps its own bettor; the prediction puts mass on awake
/// experts in proportion to prior * [wager]_+. When every clipped wager is
/// zero the prior restricted (and renormalized) to the awake set is used.
class SleepingCB {
 public:
  SleepingCB(std::vector<double> prior, PotentialKind kind) : kind_(kind) { set_prior(std::move(prior)); }
  SleepingCB(std::size_t n, PotentialKind kind) : SleepingCB(uniform_prior(n), kind) {}

  std::size_t size() const { return prior_.size(); }
  const PotentialKind& kind() const { return kind_; }
  std::span<const double> prior() const { return prior_; }
  std::span<const BettorState> bettors() const { return bettors_; }

  /// Replaces the prior; bettor histories are reset when the size changes.
  void set_prior(std::vector<double> prior) {
    if (prior.empty()) throw std::invalid_argument("prior needs at least one expert");
    double total = 0.0;
    for (double p : prior) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw std::invalid_argument("prior entries must be finite and >= 0");
      total += p;
    }
    if (!(std::abs(total - 1.0) <= 1e-9)) throw std::invalid_argument("prior must sum to 1");
    if (prior.size() != bettors_.size()) bettors_.assign(prior.size(), BettorState{});
    prior_ = std::move(prior);
  }

  /// Test hook: swap the two branches of the flip truncation rule.
  void inject_truncation_fault(bool on) { fault_ = on; }

  ExpertPrediction predict(const std::vector<bool>& awake) const {
    if (awake.size() != size()) throw std::invalid_argument("awake mask size mismatch");
    ExpertPrediction out;
    out.awake_mask = awake;
    out.weights.assign(size(), 0.0);
    out.wagers.assign(size(), 0.0);

    double mass = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
      if (!awake[i]) continue;
      out.wagers[i] = wager(bettors_[i], kind_);
      const double p = prior_[i] * std::max(out.wagers[i], 0.0);
      out.weights[i] = p;
      mass += p;
    }
    if (mass > 0.0) {
      for (double& p : out.weights) p /= mass;
      return out;
    }

    out.used_prior_fallback = true;
    double prior_mass = 0.0;
    for (std::size_t i = 0; i < size(); ++i)
      if (awake[i]) prior_mass += prior_[i];
    if (!(prior_mass > 0.0)) {
      bool any = false;
      for (bool a : awake) any = any || a;
      if (!any) throw std::domain_error("no expert is awake");
      throw std::domain_error("prior puts no mass on the awake experts");
    }
    for (std::size_t i = 0; i < size(); ++i)
      out.weights[i] = awake[i] ? prior_[i] / prior_mass : 0.0;
    return out;
  }

  ExpertPrediction predict() const { return predict(std::vector<bool>(size(), true)); }

  SleepingCBStep update(const ExpertPrediction& pred, std::span<const double> losses) {
    if (losses.size() != size() || pred.weights.size() != size())
      throw std::invalid_argument("loss vector size mismatch");
    for (double l : losses)
      if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("expert loss outside [0, 1]");

    SleepingCBStep step;
    for (std::size_t i = 0; i < size(); ++i)
      if (pred.awake_mask[i]) step.h += pred.weights[i] * losses[i];

    step.flips.assign(size(), 0.0);
    step.wagers = pred.wagers;
    for (std::size_t i = 0; i < size(); ++i) {
      if (!pred.awake_mask[i]) continue;
      const double r = step.h - losses[i];
      const double w = pred.wagers[i];
      const bool full = fault_ ? w <= 0.0 : w > 0.0;
      const double g = full ? r : std::max(r, 0.0);
      step.flips[i] = std::clamp(g, -1.0, 1.0);
      detail::settle(bettors_[i], step.flips[i], w, kind_);
    }
    return step;
  }

 private:
  std::vector<double> prior_;
  std::vector<BettorState> bettors_;
  PotentialKind kind_;
  bool fault_ = false;
};

/// Regret bound against expert j for u = e_j.
///
/// KT (delta = 0): sqrt(2 S (ln(1/prior_j) + ln(T)/2 + 2)).
/// AN (xi = 1):    sqrt(2 W (ln(1/prior_j) + ln(W)/2)), W = 1 + abs flip sum of j.
inline double regret_bound_kt(double prior_j, std::uint64_t awake_steps, std::uint64_t horizon) {
  const double S = static_cast<double>(awake_steps);
  return std::sqrt(2.0 * S * (std::log(1.0 / prior_j) + 0.5 * std::log(static_cast<double>(horizon)) + 2.0));
}

inline double regret_bound_an(double prior_j, double abs_flip_sum) {
  const double W = 1.0 + abs_flip_sum;
  return std::sqrt(2.0 * W * (std::log(1.0 / prior_j) + 0.5 * std::log(W)));
}

inline double regret_bound(const PotentialKind& kind, double prior_j, std::uint64_t awake_steps,
                           std::uint64_t horizon, double abs_flip_sum) {
  return kind.is_kt() ? regret_bound_kt(prior_j, awake_steps, horizon) : regret_bound_an(prior_j, abs_flip_sum);
}

}  // namespace cbce
