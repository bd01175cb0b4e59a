#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "meta.hpp"

namespace cbce {

// SAOL: multiplicative weights per interval, w <- w (1 + eta_I r), with
// eta_I = min(1/2, 1/sqrt|I|) and the weight started at eta_I.
struct SaolPolicy {
  struct RunState {
    double weight = 0.0;
    double eta = 0.0;
  };

  RunState spawn(const Interval& iv) const {
    const double eta = std::min(0.5, 1.0 / std::sqrt(static_cast<double>(iv.length())));
    return {eta, eta};
  }
  double score(RunState& s) const { return std::max(s.weight, 0.0); }
  double fallback(const RunState&) const { return 1.0; }
  void update(RunState& s, double meta_loss, double run_loss) const {
    const double r = std::clamp(meta_loss - run_loss, -1.0, 1.0);
    s.weight *= 1.0 + s.eta * r;
  }
};

template <class Learner>
using Saol = MetaLearner<SaolPolicy, Learner>;

/// AdaNormalHedge potential Phi(R, C) = exp([R]_+^2 / (3C)), Phi(R, 0) = 1.
inline double atv_potential(double r, double c) {
  if (c <= 0.0) return 1.0;
  const double rp = std::max(r, 0.0);
  return std::exp(rp * rp / (3.0 * c));
}

/// AdaNormalHedge weight (Phi(R+1, C+1) - Phi(R-1, C+1)) / 2.
inline double atv_weight(double r, double c) {
  return 0.5 * (atv_potential(r + 1.0, c + 1.0) - atv_potential(r - 1.0, c + 1.0));
}

// AdaNormalHedge.TV over runs: each run accumulates its instantaneous regret
// R and absolute regret C; weight is prior * atv_weight(R, C).
struct AtvPolicy {
  struct RunState {
    double regret = 0.0;
    double abs_regret = 0.0;
    double prior = 1.0;
  };

  PriorKind prior = PriorKind::Uniform;

  RunState spawn(const Interval& iv) const { return {0.0, 0.0, prior_weight(prior, iv.start)}; }
  double score(RunState& s) const { return s.prior * atv_weight(s.regret, s.abs_regret); }
  double fallback(const RunState& s) const { return s.prior; }
  void update(RunState& s, double meta_loss, double run_loss) const {
    const double r = meta_loss - run_loss;
    s.regret += r;
    s.abs_regret += std::abs(r);
  }
};

template <class Learner>
using Atv = MetaLearner<AtvPolicy, Learner>;

/// Fixed Share over N experts: exponential weights followed by mixing a
/// fraction alpha of the mass uniformly.
class FixedShare {
 public:
  FixedShare(std::size_t n, double eta, double alpha) : eta_(eta), alpha_(alpha), p_(uniform_prior(n)) {
    if (!(eta > 0.0)) throw std::invalid_argument("fixed share eta must be > 0");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("fixed share alpha must lie in [0, 1]");
  }

  /// Parameters for a known horizon T and shift count m:
  /// alpha = m / (T - 1), eta = sqrt(8 (m ln N + m + 1) / T).
  static FixedShare tuned(std::size_t n, std::uint64_t horizon, std::uint64_t shifts) {
    const double T = static_cast<double>(horizon);
    const double m = static_cast<double>(shifts);
    const double alpha = horizon > 1 ? std::min(1.0, m / (T - 1.0)) : 0.0;
    const double eta = std::sqrt(8.0 * (m * std::log(static_cast<double>(n)) + m + 1.0) / T);
    return FixedShare(n, eta, alpha);
  }

  double eta() const { return eta_; }
  double alpha() const { return alpha_; }
  const std::vector<double>& weights() const { return p_; }

  void set_weights(std::vector<double> p) {
    if (p.size() != p_.size()) throw std::invalid_argument("weight size mismatch");
    p_ = std::move(p);
  }

  const std::vector<double>& step(std::span<const double> losses) {
    if (losses.size() != p_.size()) throw std::invalid_argument("loss vector size mismatch");
    // Shift exponents by the smallest loss so large eta cannot underflow everything.
    const double lmin = *std::min_element(losses.begin(), losses.end());
    double total = 0.0;
    for (std::size_t i = 0; i < p_.size(); ++i) total += p_[i] *= std::exp(-eta_ * (losses[i] - lmin));
    const double share = alpha_ / static_cast<double>(p_.size());
    for (double& p : p_) p = share + (1.0 - alpha_) * (p / total);
    return p_;
  }

 private:
  double eta_;
  double alpha_;
  std::vector<double> p_;
};

}  // namespace cbce
