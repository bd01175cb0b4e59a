#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "baselines.hpp"
#include "blackbox.hpp"
#include "meta.hpp"
#include "regret.hpp"
#include "scenarios.hpp"

namespace cbce {

enum class MetaKind { Cbce, Saol, Atv, FixedShare };

inline MetaKind parse_meta(const std::string& s) {
  if (s == "cbce") return MetaKind::Cbce;
  if (s == "saol") return MetaKind::Saol;
  if (s == "atv") return MetaKind::Atv;
  if (s == "fixedshare") return MetaKind::FixedShare;
  throw std::invalid_argument("unknown meta algorithm '" + s + "'");
}

enum class OcoLearner { Ogd, Ftrl };

inline OcoLearner parse_oco_learner(const std::string& s) {
  if (s == "ogd") return OcoLearner::Ogd;
  if (s == "ftrl") return OcoLearner::Ftrl;
  throw std::invalid_argument("unknown OCO black box '" + s + "'");
}

/// One configured algorithm. `potential` is the meta potential and only
/// matters for CBCE.
struct AlgorithmSpec {
  MetaKind meta = MetaKind::Cbce;
  PotentialKind potential = AN{};

  std::string label() const {
    switch (meta) {
      case MetaKind::Cbce: return "CBCE(" + potential.name() + ")";
      case MetaKind::Saol: return "SAOL";
      case MetaKind::Atv: return "ATV";
      case MetaKind::FixedShare: return "FixedShare";
    }
    return "?";
  }
};

/// Everything needed to run an experiment from the command line or a
/// key=value config file.
struct RunConfig {
  std::vector<AlgorithmSpec> algorithms{AlgorithmSpec{}};
  ScheduleKind schedule = ScheduleKind::ds(2);
  PriorKind prior = PriorKind::Uniform;
  bool warm_start = true;
  double warm_floor = 1e-6;
  PotentialKind blackbox_potential = AN{};
  std::vector<std::uint64_t> seeds{0};
  unsigned threads = 0;  // 0: hardware concurrency

  // LEA scenario
  std::size_t n_experts = 1000;
  Time horizon = 900;
  std::size_t segments = 3;
  double noise_sigma = 0.5;
  double favored_bonus = 0.5;
  double offset = 0.0;
  std::size_t shifts = 0;  // Fixed Share's m; 0 means segments - 1

  // OCO scenario
  OcoLearner oco_learner = OcoLearner::Ftrl;
  std::size_t dimension = 1;
  double diameter = 2.0;
  double jitter = 0.0;
  double oco_scale = 0.0;  // <= 0: no-clip default

  LEAScenario lea_scenario(std::uint64_t seed) const {
    LEAScenario s;
    s.n_experts = n_experts;
    s.horizon = horizon;
    s.noise_sigma = noise_sigma;
    s.favored_bonus = favored_bonus;
    s.offset = offset;
    s.seed = seed;
    s.segments = even_segments(horizon, n_experts, segments);
    s.validate();
    return s;
  }

  OCOScenario oco_scenario(std::uint64_t seed) const {
    OCOScenario s = OCOScenario::standard(seed, horizon, dimension);
    s.diameter = diameter;
    for (auto& seg : s.segments) seg.center[0] = (seg.center[0] > 0 ? 0.8 : -0.8) * diameter / 2.0;
    s.jitter = jitter;
    s.scale = oco_scale;
    s.validate();
    return s;
  }

  std::size_t fixed_share_shifts() const { return shifts > 0 ? shifts : segments - 1; }
};

/// T x N loss matrix of an LEA scenario, generated once per seed.
struct LossMatrix {
  std::size_t n = 0;
  std::vector<double> data;
  std::span<const double> row(Time t) const { return {data.data() + (t - 1) * n, n}; }
  Time horizon() const { return n ? data.size() / n : 0; }
};

inline LossMatrix materialize(const LEAScenario& sc) {
  LossMatrix m;
  m.n = sc.n_experts;
  m.data.reserve(sc.n_experts * sc.horizon);
  for (Time t = 1; t <= sc.horizon; ++t) {
    const auto row = gen_lea_losses(sc, t);
    m.data.insert(m.data.end(), row.begin(), row.end());
  }
  return m;
}

namespace detail {

template <class Meta>
std::vector<double> drive_lea(Meta& meta, const LossMatrix& losses) {
  std::vector<double> out;
  out.reserve(losses.horizon());
  for (Time t = 1; t <= losses.horizon(); ++t) {
    meta.predict(t);
    out.push_back(meta.observe(t, LinearLoss{losses.row(t)}).meta_loss);
  }
  return out;
}

template <class Meta, class Scenario>
std::vector<double> drive_oco(Meta& meta, const Scenario& sc) {
  std::vector<double> out;
  out.reserve(sc.horizon);
  for (Time t = 1; t <= sc.horizon; ++t) {
    meta.predict(t);
    out.push_back(meta.observe(t, gen_oco_loss(sc, t)).meta_loss);
  }
  return out;
}

}  // namespace detail

/// Coin-betting LEA runs. A warm-start hint becomes the run's prior after
/// mixing in `floor` of the uniform distribution; the meta decision puts
/// exactly zero mass on experts with non-positive wagers, and a zero prior
/// entry would keep that expert out of the run forever.
inline LearnerFactory<CbLea> cb_lea_factory(std::size_t n, PotentialKind kind, double floor = 0.0) {
  if (!(floor >= 0.0 && floor <= 1.0)) throw std::invalid_argument("warm-start floor must lie in [0, 1]");
  return [n, kind, floor](const Interval&, const std::optional<Decision>& hint) {
    if (!hint) return CbLea(n, kind);
    Decision prior = *hint;
    for (double& p : prior) p = (1.0 - floor) * p + floor / static_cast<double>(n);
    return CbLea(n, kind, std::move(prior));
  };
}

/// Per-step losses of one algorithm on an LEA loss matrix.
inline std::vector<double> simulate_lea(const AlgorithmSpec& algo, const RunConfig& cfg, const LossMatrix& losses) {
  const auto factory = cb_lea_factory(losses.n, cfg.blackbox_potential, cfg.warm_floor);
  switch (algo.meta) {
    case MetaKind::Cbce: {
      Cbce<CbLea> m(cfg.schedule, factory, CbcePolicy{algo.potential, cfg.prior}, cfg.warm_start);
      return detail::drive_lea(m, losses);
    }
    case MetaKind::Saol: {
      Saol<CbLea> m(cfg.schedule, factory, SaolPolicy{}, cfg.warm_start);
      return detail::drive_lea(m, losses);
    }
    case MetaKind::Atv: {
      Atv<CbLea> m(cfg.schedule, factory, AtvPolicy{cfg.prior}, cfg.warm_start);
      return detail::drive_lea(m, losses);
    }
    case MetaKind::FixedShare: {
      auto fs = FixedShare::tuned(losses.n, losses.horizon(), cfg.fixed_share_shifts());
      std::vector<double> out;
      for (Time t = 1; t <= losses.horizon(); ++t) {
        const auto row = losses.row(t);
        out.push_back(LinearLoss{row}.value(fs.weights()));
        fs.step(row);
      }
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

/// Per-step losses of one algorithm on an OCO scenario.
inline std::vector<double> simulate_oco(const AlgorithmSpec& algo, const RunConfig& cfg, const OCOScenario& sc) {
  auto run = [&](auto factory) -> std::vector<double> {
    using L = typename decltype(factory)::result_type;
    switch (algo.meta) {
      case MetaKind::Cbce: {
        Cbce<L> m(cfg.schedule, factory, CbcePolicy{algo.potential, cfg.prior}, cfg.warm_start);
        return detail::drive_oco(m, sc);
      }
      case MetaKind::Saol: {
        Saol<L> m(cfg.schedule, factory, SaolPolicy{}, cfg.warm_start);
        return detail::drive_oco(m, sc);
      }
      case MetaKind::Atv: {
        Atv<L> m(cfg.schedule, factory, AtvPolicy{cfg.prior}, cfg.warm_start);
        return detail::drive_oco(m, sc);
      }
      case MetaKind::FixedShare: break;
    }
    throw std::invalid_argument("fixedshare is an expert-advice algorithm; it has no OCO variant");
  };
  const OCOConfig dom = sc.domain();
  if (cfg.oco_learner == OcoLearner::Ogd)
    return run(LearnerFactory<Ogd>([dom](const Interval&, const std::optional<Decision>& h) { return Ogd(dom, h); }));
  return run(LearnerFactory<Ftrl>([dom](const Interval&, const std::optional<Decision>& h) { return Ftrl(dom, h); }));
}

struct SeedResult {
  std::uint64_t seed = 0;
  std::vector<std::vector<double>> losses;  // per configured algorithm
};

/// Runs `work(seed_index)` over all seeds on a small worker pool; results
/// land at their seed index, so output order never depends on scheduling.
template <class Result>
std::vector<Result> parallel_over_seeds(std::size_t count, unsigned threads, const std::function<Result(std::size_t)>& work) {
  std::vector<Result> out(count);
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t k = 0; k < count; ++k) out[k] = work(k);
    return out;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        try {
          for (std::size_t k = w; k < count; k += workers) out[k] = work(k);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline std::vector<SeedResult> run_lea(const RunConfig& cfg) {
  return parallel_over_seeds<SeedResult>(cfg.seeds.size(), cfg.threads, [&](std::size_t k) {
    SeedResult r{cfg.seeds[k], {}};
    const LossMatrix losses = materialize(cfg.lea_scenario(r.seed));
    for (const auto& a : cfg.algorithms) r.losses.push_back(simulate_lea(a, cfg, losses));
    return r;
  });
}

inline std::vector<SeedResult> run_oco(const RunConfig& cfg) {
  return parallel_over_seeds<SeedResult>(cfg.seeds.size(), cfg.threads, [&](std::size_t k) {
    SeedResult r{cfg.seeds[k], {}};
    const OCOScenario sc = cfg.oco_scenario(r.seed);
    for (const auto& a : cfg.algorithms) r.losses.push_back(simulate_oco(a, cfg, sc));
    return r;
  });
}

/// Locale-independent decimal with 12 significant digits.
inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
  return std::string(buf, res.ptr);
}

inline constexpr const char* kCsvHeader = "seed,t,algorithm,instant_loss,cum_loss";

/// Rows ordered by (seed, algorithm, t).
inline void write_csv(std::ostream& os, const RunConfig& cfg, const std::vector<SeedResult>& results) {
  os << kCsvHeader << '\n';
  for (const auto& r : results) {
    for (std::size_t a = 0; a < cfg.algorithms.size(); ++a) {
      const std::string label = cfg.algorithms[a].label();
      double cum = 0.0;
      const auto& l = r.losses[a];
      for (std::size_t t = 0; t < l.size(); ++t) {
        cum += l[t];
        os << r.seed << ',' << (t + 1) << ',' << label << ',' << format_real(l[t]) << ',' << format_real(cum) << '\n';
      }
    }
  }
}

}  // namespace cbce
