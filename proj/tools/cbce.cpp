// Command-line front end: simulations to CSV, bound sweeps, partition dumps.

#include <CLI11.hpp>

#include <cbce/checks.hpp>
#include <cbce/experiment.hpp>
#include <cbce/intervals.hpp>

#include <chrono>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <vector>

namespace {

using namespace cbce;

// Raw flag values; turned into a RunConfig after parsing.
struct RunFlags {
  std::vector<std::string> meta{"cbce"};
  std::vector<std::string> potential{"an"};
  std::string schedule = "ds";
  Time g = 2;
  std::string prior = "uniform";
  bool warm_start = true;
  double warm_floor = 1e-6;
  std::string blackbox_potential = "an";
  std::size_t seeds = 1;
  std::vector<std::uint64_t> seed_list;
  unsigned threads = 0;
  std::string out = "-";
  std::string learner = "ftrl";
  RunConfig cfg;
};

void add_run_options(CLI::App* sub, RunFlags& f, bool oco) {
  sub->add_option("--config", "Flat key=value file of flags; command-line flags take precedence");
  sub->add_option("--meta", f.meta, "Meta algorithms: cbce, saol, atv" + std::string(oco ? "" : ", fixedshare"))
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--potential", f.potential, "CBCE meta potentials: kt, an (one CBCE run per potential)")
      ->delimiter(',')
      ->capture_default_str();
  sub->add_option("--schedule", f.schedule, "Restart schedule: gc or ds")->capture_default_str();
  sub->add_option("--g", f.g, "Data streaming multiplier")->capture_default_str();
  sub->add_option("--prior", f.prior, "Prior over runs: uniform or barpi")->capture_default_str();
  sub->add_flag("--warm-start,!--no-warm-start", f.warm_start, "Initialize new runs from the previous meta decision");
  sub->add_option("--seeds", f.seeds, "Number of seeds (0..n-1)")->capture_default_str();
  sub->add_option("--seed-list", f.seed_list, "Explicit seeds (overrides --seeds)")->delimiter(',');
  sub->add_option("--horizon", f.cfg.horizon, "Time horizon T")->capture_default_str();
  sub->add_option("--segments", f.cfg.segments, "Number of equal segments")->capture_default_str();
  sub->add_option("--threads", f.threads, "Worker threads (0: hardware concurrency)")->capture_default_str();
  sub->add_option("--out", f.out, "Output CSV path ('-' for stdout)")->capture_default_str();
  if (oco) {
    sub->add_option("--learner", f.learner, "Black box: ogd or ftrl")->capture_default_str();
    sub->add_option("--dimension", f.cfg.dimension, "Dimension d")->capture_default_str();
    sub->add_option("--diameter", f.cfg.diameter, "Ball diameter B")->capture_default_str();
    sub->add_option("--jitter", f.cfg.jitter, "Per-step center jump size")->capture_default_str();
    sub->add_option("--scale", f.cfg.oco_scale, "Loss scale s (<= 0: no-clip default)")->capture_default_str();
  } else {
    sub->add_option("--n-experts", f.cfg.n_experts, "Number of experts N")->capture_default_str();
    sub->add_option("--noise-sigma", f.cfg.noise_sigma, "Loss noise standard deviation")->capture_default_str();
    sub->add_option("--favored-bonus", f.cfg.favored_bonus, "Loss reduction of the favored expert")->capture_default_str();
    sub->add_option("--offset", f.cfg.offset, "Loss offset added to every expert")->capture_default_str();
    sub->add_option("--shifts", f.cfg.shifts, "Fixed Share shift count m (0: segments - 1)")->capture_default_str();
    sub->add_option("--warm-floor", f.warm_floor, "Uniform mass mixed into warm-start priors")->capture_default_str();
    sub->add_option("--blackbox-potential", f.blackbox_potential, "Potential of the CB black box")->capture_default_str();
  }
}

RunConfig build_config(RunFlags& f, bool oco) {
  RunConfig cfg = f.cfg;
  if (f.schedule == "gc")
    cfg.schedule = ScheduleKind::gc();
  else if (f.schedule == "ds")
    cfg.schedule = ScheduleKind::ds(f.g);
  else
    throw std::invalid_argument("unknown schedule '" + f.schedule + "'");
  cfg.prior = parse_prior(f.prior);
  cfg.warm_start = f.warm_start;
  cfg.warm_floor = f.warm_floor;
  cfg.blackbox_potential = PotentialKind::parse(f.blackbox_potential);
  cfg.threads = f.threads;
  cfg.oco_learner = parse_oco_learner(f.learner);

  cfg.seeds = f.seed_list;
  if (cfg.seeds.empty())
    for (std::uint64_t s = 0; s < f.seeds; ++s) cfg.seeds.push_back(s);
  if (cfg.seeds.empty()) throw std::invalid_argument("at least one seed is required");

  cfg.algorithms.clear();
  std::set<std::string> seen;
  for (const auto& m : f.meta) {
    const MetaKind kind = parse_meta(m);
    if (oco && kind == MetaKind::FixedShare) throw std::invalid_argument("fixedshare has no OCO variant");
    if (kind == MetaKind::Cbce) {
      for (const auto& p : f.potential) {
        AlgorithmSpec a{kind, PotentialKind::parse(p)};
        if (seen.insert(a.label()).second) cfg.algorithms.push_back(a);
      }
    } else {
      AlgorithmSpec a{kind, AN{}};
      if (seen.insert(a.label()).second) cfg.algorithms.push_back(a);
    }
  }
  if (cfg.algorithms.empty()) throw std::invalid_argument("no algorithm selected");
  return cfg;
}

void emit(const RunFlags& f, const RunConfig& cfg, const std::vector<SeedResult>& results) {
  if (f.out == "-") {
    write_csv(std::cout, cfg, results);
    return;
  }
  std::ofstream os(f.out, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open '" + f.out + "' for writing");
  write_csv(os, cfg, results);
  if (!os) throw std::runtime_error("write to '" + f.out + "' failed");
}

int run_checks(const std::vector<std::string>& names, const CheckOptions& opt) {
  const auto checks = all_checks();
  std::vector<NamedCheck> chosen;
  if (names.empty()) {
    for (const auto& c : checks)
      if (c.in_default) chosen.push_back(c);
  } else {
    for (const auto& n : names) {
      if (n == "all") {
        chosen = checks;
        break;
      }
      auto it = std::find_if(checks.begin(), checks.end(), [&](const NamedCheck& c) { return c.name == n; });
      if (it == checks.end()) throw std::invalid_argument("unknown check '" + n + "'");
      chosen.push_back(*it);
    }
  }
  bool ok = true;
  for (const auto& c : chosen) {
    const auto t0 = std::chrono::steady_clock::now();
    const CheckReport r = c.run(opt);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.cases << " cases, " << secs << " s): " << r.detail
              << '\n';
    if (!r.passed) std::cout << "  " << r.violations << " violation(s); first: " << r.first_violation << '\n';
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

std::string flag_key(std::string token) {
  token = token.substr(2, token.find('=') == std::string::npos ? std::string::npos : token.find('=') - 2);
  return token.rfind("no-", 0) == 0 ? token.substr(3) : token;
}

// Splices `--config FILE` into the argument list: each `key = value` line
// becomes `--key=value` right after the subcommand, unless the command line
// already sets that key. Blank lines and lines starting with '#' are skipped.
std::vector<std::string> expand_config(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  auto it = std::find_if(args.begin(), args.end(), [](const std::string& a) { return a == "--config" || a.rfind("--config=", 0) == 0; });
  if (it == args.end()) return args;
  std::string path;
  if (*it == "--config") {
    if (it + 1 == args.end()) throw std::invalid_argument("--config needs a file");
    path = *(it + 1);
    it = args.erase(it, it + 2);
  } else {
    path = it->substr(9);
    it = args.erase(it);
  }
  std::set<std::string> given;
  for (const auto& a : args)
    if (a.rfind("--", 0) == 0) given.insert(flag_key(a));

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config '" + path + "'");
  auto trim = [](std::string s) {
    const auto b = s.find_first_not_of(" \t\r"), e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  std::vector<std::string> extra;
  for (std::string line; std::getline(in, line);) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line without '=': " + line);
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (!given.count(key.rfind("no-", 0) == 0 ? key.substr(3) : key)) extra.push_back("--" + key + "=" + value);
  }
  const auto sub = std::find_if(args.begin() + 1, args.end(), [](const std::string& a) { return a.rfind("-", 0) != 0; });
  args.insert(sub == args.end() ? sub : sub + 1, extra.begin(), extra.end());
  return args;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Coin betting for changing environments: simulations and bound checks"};
  app.require_subcommand(1);

  RunFlags lea, oco;
  auto* run_lea_cmd = app.add_subcommand("run-lea", "Simulate the shifting-expert scenario and write per-step losses");
  add_run_options(run_lea_cmd, lea, false);
  auto* run_oco_cmd = app.add_subcommand("run-oco", "Simulate the shifting quadratic scenario and write per-step losses");
  add_run_options(run_oco_cmd, oco, true);

  CheckOptions check_opt;
  std::vector<std::string> check_names;
  auto* check_cmd = app.add_subcommand("check-bounds", "Run randomized bound and invariant sweeps");
  check_cmd->add_option("--config", "Flat key=value file of flags; command-line flags take precedence");
  check_cmd->add_option("--check", check_names, "Sweeps to run (default: all fast sweeps; 'all' adds experiment checks)")
      ->delimiter(',');
  check_cmd->add_option("--t-max", check_opt.t_max, "Largest t for active-cardinality")->capture_default_str();
  check_cmd->add_option("--seed", check_opt.seed, "Sweep seed")->capture_default_str();
  check_cmd->add_option("--experiment-seeds", check_opt.experiment_seeds, "Seeds for experiment checks")->capture_default_str();
  check_cmd->add_option("--threads", check_opt.threads, "Worker threads (0: hardware concurrency)")->capture_default_str();
  check_cmd->add_flag("--inject-fault", check_opt.inject_fault, "Swap the flip truncation branches (negative control)");

  std::string family = "gc";
  Time g = 2, start = 1, end = 1;
  auto* part_cmd = app.add_subcommand("partition", "Print the partition of [start..end] into schedule intervals");
  part_cmd->add_option("--schedule", family, "gc or ds")->capture_default_str();
  part_cmd->add_option("--g", g, "Data streaming multiplier")->capture_default_str();
  part_cmd->add_option("--start", start, "First step")->required();
  part_cmd->add_option("--end", end, "Last step")->required();

  std::vector<std::string> args;
  try {
    args = expand_config(argc, argv);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  std::vector<char*> cargs;
  for (auto& a : args) cargs.push_back(a.data());
  CLI11_PARSE(app, static_cast<int>(cargs.size()), cargs.data());

  try {
    if (*run_lea_cmd) {
      const RunConfig cfg = build_config(lea, false);
      emit(lea, cfg, run_lea(cfg));
    } else if (*run_oco_cmd) {
      const RunConfig cfg = build_config(oco, true);
      emit(oco, cfg, run_oco(cfg));
    } else if (*check_cmd) {
      return run_checks(check_names, check_opt);
    } else if (*part_cmd) {
      const Interval target(start, end);
      std::vector<Interval> parts;
      if (family == "gc")
        parts = partition_gc(target);
      else if (family == "ds")
        parts = partition_ds(target, g);
      else
        throw std::invalid_argument("unknown schedule '" + family + "'");
      for (const auto& iv : parts) std::cout << iv << ' ' << iv.length() << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
