#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "intervals.hpp"

namespace cbce {

/// Per-step losses of an algorithm and of a finite comparator set.
class RegretLedger {
 public:
  explicit RegretLedger(std::size_t comparators) : n_(comparators) {
    if (n_ == 0) throw std::invalid_argument("ledger needs at least one comparator");
  }

  std::size_t comparators() const { return n_; }
  std::size_t horizon() const { return algo_.size(); }

  void append(double algo_loss, std::span<const double> comparator_losses) {
    if (comparator_losses.size() != n_) throw std::invalid_argument("comparator count mismatch");
    check(algo_loss);
    for (double l : comparator_losses) check(l);
    algo_.push_back(algo_loss);
    experts_.insert(experts_.end(), comparator_losses.begin(), comparator_losses.end());
  }

  double algo(Time t) const { return algo_.at(t - 1); }
  double expert(Time t, std::size_t i) const { return experts_.at((t - 1) * n_ + i); }
  std::span<const double> experts_at(Time t) const { return {experts_.data() + (t - 1) * n_, n_}; }

  double algo_total(const Interval& iv) const {
    in_range(iv);
    double s = 0.0;
    for (Time t = iv.start; t <= iv.end; ++t) s += algo(t);
    return s;
  }

  std::vector<double> expert_totals(const Interval& iv) const {
    in_range(iv);
    std::vector<double> s(n_, 0.0);
    for (Time t = iv.start; t <= iv.end; ++t)
      for (std::size_t i = 0; i < n_; ++i) s[i] += expert(t, i);
    return s;
  }

 private:
  static void check(double l) {
    if (!(l >= 0.0 && l <= 1.0)) throw std::invalid_argument("ledger losses must lie in [0, 1]");
  }
  void in_range(const Interval& iv) const {
    if (iv.end > horizon()) throw std::out_of_range("interval beyond ledger horizon");
  }

  std::size_t n_;
  std::vector<double> algo_;
  std::vector<double> experts_;  // row-major, horizon x n_
};

/// Algorithm loss on I minus the best single comparator's loss on I.
inline double sa_regret(const RegretLedger& ledger, const Interval& iv) {
  const auto totals = ledger.expert_totals(iv);
  return ledger.algo_total(iv) - *std::min_element(totals.begin(), totals.end());
}

inline double static_regret(const RegretLedger& ledger) {
  if (ledger.horizon() == 0) return 0.0;
  return sa_regret(ledger, Interval(1, ledger.horizon()));
}

/// Minimum total loss of a comparator sequence that switches at most m times.
///
/// best[k][i] is the cheapest path ending at comparator i after k switches;
/// switching into i costs the minimum over all paths with one fewer switch.
inline double m_shift_optimum(const RegretLedger& ledger, std::size_t m) {
  const std::size_t n = ledger.comparators();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> best(m + 1, std::vector<double>(n, inf));
  if (ledger.horizon() == 0) return 0.0;
  for (std::size_t i = 0; i < n; ++i) best[0][i] = ledger.expert(1, i);
  for (Time t = 2; t <= ledger.horizon(); ++t) {
    for (std::size_t k = m + 1; k-- > 0;) {
      const double enter = k > 0 ? *std::min_element(best[k - 1].begin(), best[k - 1].end()) : inf;
      for (std::size_t i = 0; i < n; ++i) best[k][i] = std::min(best[k][i], enter) + ledger.expert(t, i);
    }
  }
  double out = inf;
  for (const auto& row : best) out = std::min(out, *std::min_element(row.begin(), row.end()));
  return out;
}

inline double m_shift_regret(const RegretLedger& ledger, std::size_t m) {
  if (ledger.horizon() == 0) return 0.0;
  return ledger.algo_total(Interval(1, ledger.horizon())) - m_shift_optimum(ledger, m);
}

/// Bound implied by an interval bound c sqrt(|I| ln I2): c sqrt((m+1) T ln T).
inline double conversion_bound(double c, std::size_t m, Time horizon) {
  if (horizon < 2) throw std::invalid_argument("conversion bound needs T >= 2");
  const double T = static_cast<double>(horizon);
  return c * std::sqrt((static_cast<double>(m) + 1.0) * T * std::log(T));
}

}  // namespace cbce
