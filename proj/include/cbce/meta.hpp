#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "blackbox.hpp"
#include "intervals.hpp"
#include "potentials.hpp"

namespace cbce {

enum class PriorKind { Uniform, BarPi };

inline PriorKind parse_prior(const std::string& s) {
  if (s == "uniform") return PriorKind::Uniform;
  if (s == "barpi") return PriorKind::BarPi;
  throw std::invalid_argument("unknown prior '" + s + "'");
}

/// Unnormalized prior weight of a run starting at J1; the normalizer cancels
/// in the aggregation. BarPi: 1 / (J1^2 (1 + floor(log2 J1))).
inline double prior_weight(PriorKind kind, Time j1) {
  if (j1 < 1) throw std::invalid_argument("run start must be >= 1");
  if (kind == PriorKind::Uniform) return 1.0;
  const double s = static_cast<double>(j1);
  return 1.0 / (s * s * (1.0 + floor_log2(j1)));
}

struct MetaDecision {
  Decision point;
  std::vector<Interval> runs;       // live runs, all containing t
  std::vector<double> run_weights;  // p_t over `runs`
  bool used_prior_fallback = false;
};

struct RunRecord {
  Interval interval;
  double weight = 0.0;
  double loss = 0.0;
};

/// Per-step log of a meta learner: its loss, the weighted average of the
/// run losses, and each live run's weight and loss.
struct MetaStep {
  Time t = 0;
  double meta_loss = 0.0;
  double mixture_loss = 0.0;
  std::vector<RunRecord> runs;
};

/// Builds the black box for a new run. The hint is the meta learner's
/// previous decision when warm starting, otherwise empty.
template <class Learner>
using LearnerFactory = std::function<Learner(const Interval&, const std::optional<Decision>&)>;

/// Aggregation rule of a meta learner, applied per live run.
template <class P>
concept MetaPolicy = requires(const P& cp, typename P::RunState& s, const Interval& iv, double x) {
  { cp.spawn(iv) } -> std::same_as<typename P::RunState>;
  { cp.score(s) } -> std::convertible_to<double>;
  { cp.fallback(s) } -> std::convertible_to<double>;
  cp.update(s, x, x);
};

/// Meta learner over black-box runs spawned on a restart schedule.
///
/// At step t the runs of every schedule interval starting at t are spawned,
/// runs whose interval ended are dropped, and the decision is the weighted
/// average of the live runs' decisions. Steps must be driven in order
/// t = 1, 2, ... with predict(t) followed by observe(t, f).
template <MetaPolicy Policy, class Learner>
class MetaLearner {
 public:
  MetaLearner(ScheduleKind schedule, LearnerFactory<Learner> factory, Policy policy, bool warm_start)
      : schedule_(schedule), factory_(std::move(factory)), policy_(std::move(policy)), warm_start_(warm_start) {}

  const Policy& policy() const { return policy_; }
  std::size_t live_runs() const { return runs_.size(); }
  const MetaDecision& last_decision() const { return decision_; }

  const MetaDecision& predict(Time t) {
    if (t != last_t_ + 1 || pending_) throw std::logic_error("meta learner steps must run in order");
    pending_ = true;
    last_t_ = t;

    std::erase_if(runs_, [t](const Run& r) { return r.interval.end < t; });
    for (const Interval& iv : starts_at(schedule_, t)) {
      std::optional<Decision> hint;
      if (warm_start_ && t >= 2) hint = decision_.point;
      runs_.push_back(Run{iv, factory_(iv, hint), policy_.spawn(iv), {}});
    }

    decision_.runs.clear();
    decision_.run_weights.assign(runs_.size(), 0.0);
    double mass = 0.0;
    for (std::size_t k = 0; k < runs_.size(); ++k) {
      Run& r = runs_[k];
      r.decision = r.learner.predict();
      decision_.runs.push_back(r.interval);
      const double s = policy_.score(r.state);
      decision_.run_weights[k] = s;
      mass += s;
    }
    decision_.used_prior_fallback = !(mass > 0.0);
    if (decision_.used_prior_fallback) {
      mass = 0.0;
      for (std::size_t k = 0; k < runs_.size(); ++k) mass += decision_.run_weights[k] = policy_.fallback(runs_[k].state);
    }
    for (double& p : decision_.run_weights) p /= mass;

    decision_.point.assign(runs_.front().decision.size(), 0.0);
    for (std::size_t k = 0; k < runs_.size(); ++k) {
      const double p = decision_.run_weights[k];
      if (p == 0.0) continue;
      const Decision& x = runs_[k].decision;
      for (std::size_t i = 0; i < x.size(); ++i) decision_.point[i] += p * x[i];
    }
    return decision_;
  }

  template <LossFunction F>
  MetaStep observe(Time t, const F& f) {
    if (t != last_t_ || !pending_) throw std::logic_error("observe must follow predict for the same step");
    pending_ = false;

    MetaStep step;
    step.t = t;
    step.meta_loss = checked_loss(f.value(decision_.point));
    step.runs.reserve(runs_.size());
    for (std::size_t k = 0; k < runs_.size(); ++k) {
      const double l = checked_loss(f.value(runs_[k].decision));
      step.mixture_loss += decision_.run_weights[k] * l;
      step.runs.push_back({runs_[k].interval, decision_.run_weights[k], l});
    }
    for (std::size_t k = 0; k < runs_.size(); ++k) {
      policy_.update(runs_[k].state, step.meta_loss, step.runs[k].loss);
      runs_[k].learner.observe(f);
    }
    return step;
  }

 private:
  static double checked_loss(double v) {
    if (!(v >= -1e-12 && v <= 1.0 + 1e-12)) throw std::domain_error("loss outside [0, 1]: " + std::to_string(v));
    return std::clamp(v, 0.0, 1.0);
  }

  struct Run {
    Interval interval;
    Learner learner;
    typename Policy::RunState state;
    Decision decision;
  };

  ScheduleKind schedule_;
  LearnerFactory<Learner> factory_;
  Policy policy_;
  bool warm_start_;
  std::vector<Run> runs_;
  MetaDecision decision_;
  Time last_t_ = 0;
  bool pending_ = false;
};

/// Coin-betting weighting of runs: each run is a sleeping expert with its
/// own bettor, awake exactly on its interval.
struct CbcePolicy {
  struct RunState {
    BettorState bettor;
    double prior = 1.0;
  };

  PotentialKind potential = AN{};
  PriorKind prior = PriorKind::Uniform;
  double prior_scale = 1.0;
  bool flip_truncation = false;  // fault injection for negative controls

  RunState spawn(const Interval& iv) const { return {BettorState{}, prior_scale * prior_weight(prior, iv.start)}; }

  double score(RunState& s) const {
    s.bettor.pending_wager = wager(s.bettor, potential);
    return s.prior * std::max(s.bettor.pending_wager, 0.0);
  }

  double fallback(const RunState& s) const { return s.prior; }

  void update(RunState& s, double meta_loss, double run_loss) const {
    const double r = meta_loss - run_loss;
    const double w = s.bettor.pending_wager;
    const bool full = flip_truncation ? w <= 0.0 : w > 0.0;
    const double z = std::clamp(full ? r : std::max(r, 0.0), -1.0, 1.0);
    detail::settle(s.bettor, z, w, potential);
  }
};

struct CBCEConfig {
  ScheduleKind schedule = ScheduleKind::ds(2);
  PotentialKind potential = AN{};
  PriorKind prior = PriorKind::Uniform;
  bool warm_start = true;
};

template <class Learner>
using Cbce = MetaLearner<CbcePolicy, Learner>;

template <class Learner>
Cbce<Learner> make_cbce(const CBCEConfig& cfg, LearnerFactory<Learner> factory) {
  return Cbce<Learner>(cfg.schedule, std::move(factory), CbcePolicy{cfg.potential, cfg.prior}, cfg.warm_start);
}

/// Meta regret bound of CBCE (KT, prior BarPi) on a schedule interval J:
/// sqrt(|J| (7 ln J2 + 5)).
inline double meta_regret_bound(const Interval& j) {
  return std::sqrt(static_cast<double>(j.length()) * (7.0 * std::log(static_cast<double>(j.end)) + 5.0));
}

/// Interval regret bound of CBCE (KT, prior BarPi, GC schedule) with a black
/// box whose anytime regret is at most a1 * t^alpha:
/// 4 / (2^alpha - 1) a1 |I|^alpha + 8 sqrt(|I| (7 ln I2 + 5)).
inline double sa_regret_bound(const Interval& i, double alpha, double a1) {
  if (!(alpha > 0.0 && alpha < 1.0) || !(a1 > 0.0)) throw std::invalid_argument("need alpha in (0,1), A1 > 0");
  const double len = static_cast<double>(i.length());
  return 4.0 / (std::pow(2.0, alpha) - 1.0) * a1 * std::pow(len, alpha) + 8.0 * meta_regret_bound(i);
}

}  // namespace cbce
