#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>

namespace cbce {

/// Krichevsky-Trofimov potential with time shift `delta`.
struct KT {
  double delta = 0.0;
};

/// AdaptiveNormal potential with offset `xi`.
struct AN {
  double xi = 1.0;
};

class PotentialKind {
 public:
  PotentialKind() = default;
  PotentialKind(KT kt) : v_(kt) {
    if (!(kt.delta >= 0.0)) throw std::invalid_argument("KT delta must be >= 0");
  }
  PotentialKind(AN an) : v_(an) {
    if (!(an.xi > 0.0)) throw std::invalid_argument("AN xi must be > 0");
  }

  bool is_kt() const { return std::holds_alternative<KT>(v_); }
  bool is_an() const { return std::holds_alternative<AN>(v_); }
  double delta() const { return std::get<KT>(v_).delta; }
  double xi() const { return std::get<AN>(v_).xi; }

  std::string name() const { return is_kt() ? "KT" : "AN"; }

  static PotentialKind parse(const std::string& s) {
    if (s == "kt" || s == "KT") return KT{};
    if (s == "an" || s == "AN") return AN{};
    throw std::invalid_argument("unknown potential '" + s + "'");
  }

 private:
  std::variant<KT, AN> v_ = KT{};
};

/// Coin-betting state of one expert (or one black-box run).
///
/// All fields reflect the flip history z_1..z_t of this bettor; sleeping
/// steps contribute nothing. `an_penalty` is the running sum
/// sum_s |z_s| / (2 (xi + abs_sum_z_{s-1} + 1)) used by the AN potential; it
/// is accumulated with the xi of the potential that drives the bettor.
struct BettorState {
  double sum_z = 0.0;
  double abs_sum_z = 0.0;
  std::uint64_t awake_count = 0;
  double wealth = 1.0;
  double pending_wager = 0.0;
  double an_penalty = 0.0;
};

/// Betting fraction for the next awake step, given the history in `s`.
///
/// For KT the denominator uses the awake count including that step,
/// S = s.awake_count + 1, so beta = sum_z / (S + delta). For AN,
/// beta = 2 sigmoid(2 sum_z / (xi + abs_sum_z + 1)) - 1, evaluated as tanh.
inline double betting_fraction(const BettorState& s, const PotentialKind& kind) {
  if (kind.is_kt()) {
    const double S = static_cast<double>(s.awake_count + 1);
    return s.sum_z / (S + kind.delta());
  }
  return std::tanh(s.sum_z / (kind.xi() + s.abs_sum_z + 1.0));
}

/// Amount wagered at the next awake step: beta * wealth.
inline double wager(const BettorState& s, const PotentialKind& kind) {
  return betting_fraction(s, kind) * s.wealth;
}

/// log F_t of the recorded history.
inline double log_potential_value(const BettorState& s, const PotentialKind& kind) {
  if (kind.is_kt()) {
    const double d = kind.delta();
    const double S = static_cast<double>(s.awake_count);
    const double half = (S + d + 1.0) / 2.0;
    return S * std::log(2.0) + std::lgamma(d + 1.0) + std::lgamma(half + s.sum_z / 2.0) +
           std::lgamma(half - s.sum_z / 2.0) - 2.0 * std::lgamma((d + 1.0) / 2.0) -
           std::lgamma(S + d + 1.0);
  }
  return s.sum_z * s.sum_z / (2.0 * (kind.xi() + s.abs_sum_z)) - s.an_penalty;
}

/// F_t of the recorded history. Throws std::overflow_error when the value
/// is not representable; use log_potential_value() in that case.
inline double potential_value(const BettorState& s, const PotentialKind& kind) {
  const double lf = log_potential_value(s, kind);
  if (lf > std::log(std::numeric_limits<double>::max()))
    throw std::overflow_error("potential exceeds double range (log value " + std::to_string(lf) + ")");
  return std::exp(lf);
}

namespace detail {

// Records an awake step whose wager `w` was fixed before `z` was revealed.
inline void settle(BettorState& s, double z, double w, const PotentialKind& kind) {
  if (kind.is_an()) s.an_penalty += std::abs(z) / (2.0 * (kind.xi() + s.abs_sum_z + 1.0));
  s.pending_wager = w;
  s.wealth += z * w;
  s.sum_z += z;
  s.abs_sum_z += std::abs(z);
  ++s.awake_count;
}

}  // namespace detail

/// Advances a bettor by one time step.
///
/// Awake: wagers w = beta * wealth, then wealth += z * w. Asleep: the state
/// is returned unchanged and z must be 0.
inline BettorState bettor_step(BettorState s, bool awake, double z, const PotentialKind& kind) {
  if (!(std::abs(z) <= 1.0)) throw std::invalid_argument("coin flip outside [-1, 1]");
  if (!awake) {
    if (z != 0.0) throw std::invalid_argument("sleeping bettor received a nonzero flip");
    return s;
  }
  detail::settle(s, z, wager(s, kind), kind);
  return s;
}

}  // namespace cbce
