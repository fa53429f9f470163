#include <chrono>
#include <filesystem>
#include <future>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lv/acceptance.hpp"
#include "lv/analyze.hpp"
#include "lv/config.hpp"
#include "lv/errors.hpp"
#include "lv/integrate.hpp"
#include "lv/periodic.hpp"
#include "lv/random_fields.hpp"
#include "lv/report.hpp"
#include "lv/spectral.hpp"
#include "lv/threshold.hpp"
#include "lv/version.hpp"

namespace {

namespace fs = std::filesystem;
using namespace lv;

constexpr double kInf = std::numeric_limits<double>::infinity();

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int ensemble = 0;
  std::string grid_spec;
  std::string horizon_spec;
  double lambda = -1.0;  // <0: take the config value
  double tol = -1.0;
  int threads = 1;
  std::string regime = "auto";
};

void apply_overrides(const CommonArgs& args, ParsedConfig& cfg) {
  if (!args.grid_spec.empty()) {
    std::array<int, 2> n{0, 1};
    const auto comma = args.grid_spec.find(',');
    n[0] = std::stoi(args.grid_spec.substr(0, comma));
    if (comma != std::string::npos)
      n[1] = std::stoi(args.grid_spec.substr(comma + 1));
    else
      n[1] = n[0];
    cfg.options.grid_n = n;
    cfg.options.grid_set = true;
  }
  if (!args.horizon_spec.empty()) {
    cfg.options.horizon = args.horizon_spec == "inf"
                              ? kInf
                              : std::stod(args.horizon_spec);
  }
  if (args.lambda >= 0.0) cfg.options.lambda = args.lambda;
  if (args.tol > 0.0) cfg.options.threshold_tol = args.tol;
}

GridPtr grid_of(const ParsedConfig& cfg) {
  std::array<int, 2> n = cfg.options.grid_n;
  if (cfg.spec.dim == 1) n[1] = 1;
  return cfg.spec.grid_for(n);
}

BoundRegime pick_regime(const std::string& flag, const ProblemSpec& spec) {
  if (flag == "interior") return BoundRegime::Interior;
  if (flag == "boundary") return BoundRegime::BoundaryCondition;
  if (flag == "scale_invariant") return BoundRegime::ScaleInvariant;
  return spec.bc == BoundaryKind::None ? BoundRegime::Interior
                                       : BoundRegime::BoundaryCondition;
}

void write_manifest(const CommonArgs& args, const ParsedConfig& cfg,
                    const std::string& command, double wall_ms) {
  Record m;
  m.add("tool_version", kToolVersion);
  m.add("command", command);
  m.add("config_hash", hex64(fnv1a64(cfg.raw)));
  m.add("seed", args.seed);
  m.add("threads", args.threads);
  m.add("wall_ms", wall_ms);
  write_ndjson((fs::path(args.out_dir) / "manifest.json").string(), {m});
}

Record outcome_record(int run, std::uint64_t seed, const SolveOutcome& out) {
  Record r;
  r.add("run", run);
  r.add("seed", seed);
  r.add("outcome", to_string(out.kind));
  r.add("t_end", out.t_end);
  r.add("peak_norm", out.peak_norm);
  r.add("steps", static_cast<std::int64_t>(out.steps));
  r.add("t_est", out.kind == OutcomeKind::BlowUp ? out.t_est : 0.0);
  r.add("fit_slope", out.fit_slope);
  r.add("fit_r2", out.fit_r2);
  r.add("fit_ok", out.fit_ok);
  if (!out.undecided_reason.empty()) r.add("undecided_reason", out.undecided_reason);
  return r;
}

State initial_state(const ParsedConfig& cfg, GridPtr grid) {
  const Field profile = make_profile(grid, cfg.options.profile);
  State s0(grid, 0.0);
  for (std::size_t k = 0; k < profile.v.size(); ++k) {
    s0.u.v[k] = cfg.options.amplitude * profile.v[k];
    s0.v.v[k] = cfg.options.v_scale * cfg.options.amplitude * profile.v[k];
  }
  return s0;
}

int cmd_simulate(const CommonArgs& args, bool with_rate) {
  ParsedConfig cfg = parse_config(args.config_path);
  apply_overrides(args, cfg);
  fs::create_directories(args.out_dir);
  const auto start = std::chrono::steady_clock::now();

  GridPtr grid = grid_of(cfg);
  const State s0 = initial_state(cfg, grid);
  const SolveOutcome out = evolve(cfg.spec, s0, cfg.options.horizon,
                                  cfg.options.controls);
  Record rec = outcome_record(0, args.seed, out);
  if (with_rate) {
    const RateFit fit = fit_blowup_rate(out.samples);
    rec.add("rate_ok", fit.ok);
    rec.add("rate_slope", fit.slope);
    rec.add("rate_r2", fit.r2);
    rec.add("rate_t_est", fit.t_est);
    rec.add("rate_window", static_cast<std::int64_t>(fit.window_size));
    if (!fit.ok) rec.add("rate_reason", fit.reason);
  }
  write_ndjson((fs::path(args.out_dir) / "runs.ndjson").string(), {rec});
  write_csv((fs::path(args.out_dir) / "summary.csv").string(), {rec});
  if (!out.snapshots.empty())
    write_checkpoint((fs::path(args.out_dir) / "final.lvb").string(),
                     out.snapshots.back(), cfg.spec.q, cfg.spec.r);
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  write_manifest(args, cfg, with_rate ? "rate" : "simulate", wall);
  std::cout << to_json_line(rec) << "\n";
  return 0;
}

int cmd_bound(const CommonArgs& args) {
  ParsedConfig cfg = parse_config(args.config_path);
  apply_overrides(args, cfg);
  fs::create_directories(args.out_dir);
  const auto start = std::chrono::steady_clock::now();
  const BoundRegime regime = pick_regime(args.regime, cfg.spec);

  const int members = std::max(args.ensemble, 1);
  const bool ensemble = args.ensemble > 0;

  auto run_one = [&](int idx) -> Record {
    ProblemSpec spec = cfg.spec;
    double alpha = cfg.options.amplitude;
    std::uint64_t seed = args.seed;
    if (ensemble) {
      EnsembleMember m = make_ensemble_member(cfg.spec, args.seed, idx);
      spec = m.spec;
      alpha = m.alpha;
      seed = m.seed;
    }
    GridPtr grid = spec.grid_for(cfg.options.grid_set
                                     ? cfg.options.grid_n
                                     : std::array<int, 2>{128, 1});
    const ValidationReport rep = validate_problem(spec, *grid);
    if (!rep.valid())
      throw ConfigError("generated member failed validation:\n" + rep.summary());
    const Field profile = make_profile(grid, cfg.options.profile);
    const SolveOutcome out = classify_run(spec, grid, alpha, profile,
                                          cfg.options.horizon, cfg.options.controls);
    const double T = out.kind == OutcomeKind::BlowUp && out.fit_ok ? out.t_est
                                                                   : out.horizon;
    const BoundReport br = universal_bound_statistic(out, T, regime);
    Record rec = outcome_record(idx, seed, out);
    rec.add("alpha", alpha);
    rec.add("regime", to_string(br.regime));
    rec.add("c_emp", br.c_emp);
    rec.add("argmax_t", br.argmax_t);
    rec.add("argmax_index", static_cast<std::int64_t>(br.argmax_index));
    rec.add("excluded_points", static_cast<std::int64_t>(br.excluded_points));
    return rec;
  };

  std::vector<Record> records(members);
  if (args.threads > 1 && members > 1) {
    std::vector<std::future<Record>> futs;
    futs.reserve(members);
    int next = 0;
    while (next < members) {
      const int batch = std::min(args.threads, members - next);
      futs.clear();
      for (int i = 0; i < batch; ++i)
        futs.push_back(std::async(std::launch::async, run_one, next + i));
      for (int i = 0; i < batch; ++i) records[next + i] = futs[i].get();
      next += batch;
    }
  } else {
    for (int i = 0; i < members; ++i) records[i] = run_one(i);
  }

  double c_emp = 0.0;
  for (const auto& r : records)
    for (const auto& [k, v] : r.items())
      if (k == "c_emp") c_emp = std::max(c_emp, std::get<double>(v));
  write_ndjson((fs::path(args.out_dir) / "runs.ndjson").string(), records);
  write_csv((fs::path(args.out_dir) / "summary.csv").string(), records);
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  write_manifest(args, cfg, "bound", wall);
  std::cout << "ensemble C_emp = " << fmt17(c_emp) << " over " << members
            << " run(s)\n";
  return 0;
}

int cmd_threshold(const CommonArgs& args) {
  ParsedConfig cfg = parse_config(args.config_path);
  apply_overrides(args, cfg);
  fs::create_directories(args.out_dir);
  const auto start = std::chrono::steady_clock::now();
  GridPtr grid = grid_of(cfg);
  double lo = cfg.options.threshold_alpha_lo;
  double hi = cfg.options.threshold_alpha_hi;
  const Field profile = make_profile(grid, cfg.options.profile);
  if (!(lo > 0.0) || !(hi > lo)) {
    // Automatic bracket: grow/shrink by factors of two around amplitude.
    double alpha = std::max(cfg.options.amplitude, 1e-3);
    lo = 0.0;
    hi = 0.0;
    for (int tries = 0; tries < 24 && (lo == 0.0 || hi == 0.0); ++tries) {
      const SolveOutcome out =
          classify_run(cfg.spec, grid, alpha, profile, cfg.options.horizon,
                       cfg.options.controls);
      if (out.kind == OutcomeKind::BlowUp) {
        hi = alpha;
        alpha *= 0.5;
      } else {
        lo = std::max(lo, alpha);
        alpha *= 2.0;
      }
    }
    if (lo == 0.0 || hi == 0.0) {
      std::cerr << "threshold: could not bracket a threshold automatically\n";
      return 1;
    }
  }
  const ThresholdResult res =
      bisect_threshold(cfg.spec, grid, lo, hi, cfg.options.threshold_tol,
                       cfg.options.horizon, cfg.options.controls,
                       cfg.options.profile);
  std::vector<Record> rows;
  for (std::size_t i = 0; i < res.history.size(); ++i) {
    const auto& e = res.history[i];
    Record r;
    r.add("iter", static_cast<std::int64_t>(i));
    r.add("alpha", e.alpha);
    r.add("outcome", to_string(e.outcome));
    r.add("t_est", e.t_est);
    r.add("horizon", e.horizon);
    r.add("forced_upper", e.forced_upper);
    rows.push_back(r);
  }
  write_csv((fs::path(args.out_dir) / "bisection.csv").string(), rows);
  Record summary;
  summary.add("alpha_lo", res.alpha_lo);
  summary.add("alpha_hi", res.alpha_hi);
  summary.add("undecided", res.undecided_count);
  summary.add("stat_c_emp", res.statistic_valid ? res.threshold_statistic.c_emp : 0.0);
  write_ndjson((fs::path(args.out_dir) / "threshold.ndjson").string(), {summary});
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  write_manifest(args, cfg, "threshold", wall);
  std::cout << to_json_line(summary) << "\n";
  return 0;
}

int cmd_eigen(const CommonArgs& args) {
  ParsedConfig cfg = parse_config(args.config_path);
  apply_overrides(args, cfg);
  fs::create_directories(args.out_dir);
  const auto start = std::chrono::steady_clock::now();
  GridPtr grid = grid_of(cfg);
  const EigenPair ep = principal_eigenvalue(grid);
  const double T = cfg.spec.period.value_or(1.0);
  const PeriodicEigenPair pep = adjoint_periodic_eigenpair(grid, T);
  Record r;
  r.add("lambda1", ep.value);
  r.add("residual", ep.residual);
  r.add("lambda1_T", pep.value);
  r.add("spacetime_residual", pep.residual);
  r.add("period", T);
  write_csv((fs::path(args.out_dir) / "eigen.csv").string(), {r});
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  write_manifest(args, cfg, "eigen", wall);
  std::cout << to_json_line(r) << "\n";
  return 0;
}

int write_orbit(const std::string& out_dir, const ProblemSpec& spec,
                const OrbitSearch& search) {
  std::vector<Record> rows;
  Record r;
  r.add("lambda", search.orbit.lambda);
  r.add("period", search.orbit.period);
  r.add("status", to_string(search.status));
  r.add("residual", search.orbit.residual);
  r.add("positivity_margin", search.orbit.positivity_margin);
  r.add("sup_norm", search.orbit.sup_norm);
  r.add("iterations", search.iterations);
  if (!search.note.empty()) r.add("note", search.note);
  rows.push_back(r);
  write_ndjson((fs::path(out_dir) / "orbit.ndjson").string(), rows);
  if (search.status == OrbitStatus::Converged) {
    const int phases = 8;
    const int nt = static_cast<int>(search.orbit.snapshots.size()) - 1;
    for (int p = 0; p <= phases; ++p) {
      const int j = (static_cast<long>(p) * nt) / phases;
      char name[32];
      std::snprintf(name, sizeof name, "orbit_phase_%02d.lvb", p);
      write_checkpoint((fs::path(out_dir) / name).string(),
                       search.orbit.snapshots[j], spec.q, spec.r);
    }
  }
  std::cout << to_json_line(rows.front()) << "\n";
  return search.status == OrbitStatus::Converged ? 0 : 1;
}

int cmd_periodic(const CommonArgs& args) {
  ParsedConfig cfg = parse_config(args.config_path);
  apply_overrides(args, cfg);
  fs::create_directories(args.out_dir);
  const auto start = std::chrono::steady_clock::now();
  GridPtr grid = grid_of(cfg);
  OrbitOptions opt;
  opt.map.dt_max = std::min(cfg.options.controls.dt_max, 5e-3);
  if (args.tol > 0.0) opt.tol = args.tol;
  const State guess = default_orbit_guess(cfg.spec, grid);
  const OrbitSearch search = find_periodic_orbit(
      cfg.spec, guess, cfg.options.lambda, OrbitMethod::NewtonKrylov, opt);
  const int code = write_orbit(args.out_dir, cfg.spec, search);
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  write_manifest(args, cfg, "periodic", wall);
  return code;
}

int cmd_sweep(const CommonArgs& args, const std::string& lambda_grid) {
  ParsedConfig cfg = parse_config(args.config_path);
  apply_overrides(args, cfg);
  fs::create_directories(args.out_dir);
  const auto start = std::chrono::steady_clock::now();
  GridPtr grid = grid_of(cfg);
  std::vector<double> lambdas;
  {
    std::string item;
    std::istringstream ss(lambda_grid);
    while (std::getline(ss, item, ',')) lambdas.push_back(std::stod(item));
  }
  OrbitOptions opt;
  opt.map.dt_max = std::min(cfg.options.controls.dt_max, 5e-3);
  const State seed_state = default_orbit_guess(cfg.spec, grid);
  const std::vector<SweepEntry> entries =
      homotopy_sweep(cfg.spec, seed_state, lambdas, opt);
  std::vector<Record> rows;
  for (const auto& e : entries) {
    Record r;
    r.add("lambda", e.lambda);
    r.add("status", to_string(e.status));
    r.add("residual", e.residual);
    r.add("sup_norm", e.sup_norm);
    r.add("positivity_margin", e.positivity_margin);
    rows.push_back(r);
    std::cout << to_json_line(r) << "\n";
  }
  write_csv((fs::path(args.out_dir) / "sweep.csv").string(), rows);
  write_ndjson((fs::path(args.out_dir) / "sweep.ndjson").string(), rows);
  const double wall =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();
  write_manifest(args, cfg, "sweep", wall);
  return 0;
}

int cmd_verify(const std::vector<int>& only) {
  const auto results = lv::accept::run_all(std::cout, only);
  return lv::accept::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification toolkit for cooperative "
               "reaction-diffusion Lotka-Volterra systems"};
  app.require_subcommand(1);

  CommonArgs args;
  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    auto* opt = sub->add_option("--config", args.config_path, "problem configuration JSON");
    if (needs_config) opt->required();
    sub->add_option("--out", args.out_dir, "output directory");
    sub->add_option("--seed", args.seed, "master seed");
    sub->add_option("--grid", args.grid_spec, "grid points per axis, N or N,N");
    sub->add_option("--horizon", args.horizon_spec, "time horizon (number or 'inf')");
    sub->add_option("--lambda", args.lambda, "homotopy parameter in [0, 1]");
    sub->add_option("--tol", args.tol, "tolerance override");
    sub->add_option("--threads", args.threads, "worker threads for ensembles");
  };

  auto* simulate = app.add_subcommand("simulate", "run one problem and classify it");
  add_common(simulate);
  auto* rate = app.add_subcommand("rate", "simulate and fit the blow-up rate");
  add_common(rate);
  auto* bound = app.add_subcommand("bound", "universal-bound statistic (single run or ensemble)");
  add_common(bound);
  bound->add_option("--ensemble", args.ensemble, "number of seeded ensemble members");
  bound->add_option("--regime", args.regime,
                    "auto|interior|boundary|scale_invariant");
  auto* threshold = app.add_subcommand("threshold", "bisect the blow-up threshold amplitude");
  add_common(threshold);
  auto* eigen = app.add_subcommand("eigen", "principal and periodic adjoint eigenpairs");
  add_common(eigen);
  auto* periodic = app.add_subcommand("periodic", "search for a positive periodic orbit");
  add_common(periodic);
  std::string lambda_grid = "1,0.9,0.8,0.7,0.6,0.5,0.4,0.3,0.2,0.1,0";
  auto* sweep = app.add_subcommand("sweep", "homotopy continuation over lambda");
  add_common(sweep);
  sweep->add_option("--lambda-grid", lambda_grid, "comma-separated lambda values");
  auto* verify = app.add_subcommand("verify", "run the acceptance criteria");
  std::vector<int> only;
  verify->add_option("--only", only, "criterion numbers to run");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) return cmd_simulate(args, false);
    if (rate->parsed()) return cmd_simulate(args, true);
    if (bound->parsed()) return cmd_bound(args);
    if (threshold->parsed()) return cmd_threshold(args);
    if (eigen->parsed()) return cmd_eigen(args);
    if (periodic->parsed()) return cmd_periodic(args);
    if (sweep->parsed()) return cmd_sweep(args, lambda_grid);
    if (verify->parsed()) return cmd_verify(only);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
