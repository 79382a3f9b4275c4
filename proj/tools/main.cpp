#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "common.hpp"
#include "spde/chafee.hpp"
#include "spde/csv.hpp"
#include "spde/linear.hpp"
#include "spde/pullback.hpp"
#include "spde/solver.hpp"
#include "verify_battery.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using cli::ConfigError;
using cli::ordered_json;
using namespace spde;

// ---------------------------------------------------------------------------
// Config file merge: flat JSON supplies defaults, command-line flags win.
// ---------------------------------------------------------------------------

std::string find_config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return {};
}

bool flag_present(const std::vector<std::string>& args, const std::string& flag) {
  for (const auto& a : args)
    if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
  return false;
}

std::vector<std::string> merge_config_args(const std::vector<std::string>& args,
                                           CLI::App& app) {
  const std::string config_path = find_config_path(args);
  if (config_path.empty()) return args;
  if (args.empty()) throw ConfigError("--config requires a subcommand");

  std::ifstream is(config_path);
  if (!is) throw ConfigError("cannot open config file " + config_path);
  ordered_json config;
  try {
    is >> config;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config file is not valid JSON: ") + e.what());
  }
  if (!config.is_object()) throw ConfigError("config file must hold a flat JSON object");

  CLI::App* sub = nullptr;
  for (const auto& a : args) {
    if (!a.empty() && a[0] != '-') {
      sub = app.get_subcommand_no_throw(a);
      break;
    }
  }
  if (sub == nullptr) throw ConfigError("--config requires a known subcommand");

  std::set<std::string> known;
  for (const CLI::Option* opt : sub->get_options())
    for (const auto& n : opt->get_lnames()) known.insert(n);

  std::vector<std::string> merged;
  merged.push_back(args.front() != sub->get_name() ? args.front() : sub->get_name());
  merged = {args.front()};
  std::vector<std::string> injected;
  for (const auto& [key, value] : config.items()) {
    if (key == "config") continue;
    if (known.find(key) == known.end())
      throw ConfigError("unknown config key '" + key + "' for subcommand '" +
                        sub->get_name() + "'");
    const std::string flag = "--" + key;
    if (flag_present(args, flag)) continue;  // flags win
    if (value.is_boolean()) {
      if (value.get<bool>()) injected.push_back(flag);
    } else if (value.is_string()) {
      injected.push_back(flag);
      injected.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      injected.push_back(flag);
      injected.push_back(value.dump());
    } else {
      throw ConfigError("config key '" + key + "' must be scalar");
    }
  }
  merged.insert(merged.end(), injected.begin(), injected.end());
  merged.insert(merged.end(), args.begin() + 1, args.end());
  return merged;
}

// ---------------------------------------------------------------------------
// Shared option bundles
// ---------------------------------------------------------------------------

struct CommonOpts {
  std::string config;
  std::string seed_text = "7";
  bool deterministic = false;
  std::string out = "out";
  int jobs = 1;
  double tol = 1e-4;
  int n_modes = 64;
  double dt = 1e-3;
};

void add_common(CLI::App* sub, CommonOpts& o) {
  sub->add_option("--config", o.config, "flat JSON config file (flags win)");
  sub->add_option("--seed", o.seed_text, "path seed, decimal or 0x-hex");
  sub->add_flag("--deterministic", o.deterministic, "use the zero noise path");
  sub->add_option("--out", o.out, "output directory");
  sub->add_option("--jobs", o.jobs, "worker pool size for sweeps");
  sub->add_option("--tol", o.tol, "pullback convergence tolerance");
  sub->add_option("--n-modes", o.n_modes, "sine modes N");
  sub->add_option("--dt", o.dt, "solver and path step");
}

WienerPath build_path(const CommonOpts& o, double t_lo, double t_hi) {
  const double lo = std::min(t_lo, -1.0);
  const double hi = std::max(t_hi, 1.0);
  const double a = std::floor(lo / o.dt) * o.dt;
  const double b = std::ceil(hi / o.dt) * o.dt;
  if (o.deterministic) return WienerPath::zero(a, b, o.dt);
  return WienerPath::sample(parse_seed(o.seed_text), a, b, o.dt);
}

ordered_json common_manifest(const std::string& command, const CommonOpts& o) {
  ordered_json m;
  m["command"] = command;
  m["version"] = kVersion;
  ordered_json cfg;
  cfg["seed"] = o.seed_text;
  cfg["deterministic"] = o.deterministic;
  cfg["n_modes"] = o.n_modes;
  cfg["dt"] = o.dt;
  cfg["tol"] = o.tol;
  m["config"] = cfg;
  return m;
}

ProblemSpec heat_spec(const CommonOpts& o, double alpha) {
  ProblemSpec p;
  p.alpha = alpha;
  p.n_modes = o.n_modes;
  p.dt = o.dt;
  Nonlinearity nl;
  nl.eval = [](double, double, double) { return 0.0; };
  nl.lipschitz = [](double, double, double, double) { return 0.0; };
  nl.beta = 0.25;
  nl.h = [](double, double) { return 0.0; };
  nl.h_sup = 0.0;
  nl.is_zero = true;
  p.nl = nl;
  p.forcing = zero_forcing(0.25);
  return p;
}

Field initial_field(const std::string& shape, double amp, int n_modes) {
  if (shape == "zero") return Field(n_modes);
  if (shape == "sinx") return single_mode(n_modes, 1, amp);
  if (shape == "sin2x") return single_mode(n_modes, 2, amp);
  if (shape == "flat") {
    Field f(n_modes);
    for (int n = 1; n <= n_modes; n += 2)
      f.mutable_coeffs()[static_cast<std::size_t>(n - 1)] =
          amp * 4.0 / (n * std::numbers::pi);
    return f;
  }
  throw ConfigError("unknown initial profile '" + shape + "'");
}

ChafeeSpec chafee_from(double nu, double gamma0, double gamma_period,
                       double gamma_amp, double alpha) {
  if (gamma_period > 0.0)
    return ChafeeSpec::periodic_gamma(nu, gamma0, gamma_amp, gamma_period, alpha);
  return ChafeeSpec::constant_gamma(nu, gamma0, alpha);
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

struct SimulateOpts {
  CommonOpts common;
  std::string model = "chafee";
  double nu = 1.5;
  double gamma0 = 1.0;
  double gamma_period = 0.0;
  double gamma_amp = 0.0;
  double alpha = 1.0;
  double tau = 0.0;
  double t_end = 1.0;
  std::string init = "sinx";
  double init_amp = 1.0;
  int record_stride = 100;
  double guard = 1e6;
  std::string path_file;       // import the driving path from CSV
  bool coeff_trajectory = false;
};

int run_simulate(const SimulateOpts& o) {
  cli::ensure_out_dir(o.common.out);
  ordered_json manifest = common_manifest("simulate", o.common);
  manifest["config"]["model"] = o.model;
  manifest["config"]["nu"] = o.nu;
  manifest["config"]["gamma0"] = o.gamma0;
  manifest["config"]["gamma_period"] = o.gamma_period;
  manifest["config"]["gamma_amp"] = o.gamma_amp;
  manifest["config"]["alpha"] = o.alpha;
  manifest["config"]["tau"] = o.tau;
  manifest["config"]["t_end"] = o.t_end;
  manifest["config"]["init"] = o.init;
  manifest["config"]["init_amp"] = o.init_amp;
  manifest["config"]["guard"] = o.guard;
  manifest["scheme"] = "exponential-midpoint";

  const std::string manifest_path = o.common.out + "/manifest.json";
  try {
    if (!(o.t_end > o.tau)) throw ConfigError("t-end must exceed tau");
    ProblemSpec spec;
    if (o.model == "heat") {
      spec = heat_spec(o.common, o.alpha);
    } else if (o.model == "chafee") {
      spec = make_problem(
          chafee_from(o.nu, o.gamma0, o.gamma_period, o.gamma_amp, o.alpha),
          o.common.n_modes, o.common.dt, o.guard);
    } else {
      throw ConfigError("unknown model '" + o.model + "'");
    }
    spec.guard = o.guard;

    const WienerPath path =
        o.path_file.empty()
            ? build_path(o.common, std::min(o.tau, 0.0) - 1.0, o.t_end + 1.0)
            : read_path_csv(o.path_file);
    const PathView omega(path);
    const Field u0 = initial_field(o.init, o.init_amp, o.common.n_modes);

    PathwiseSolver solver(spec, omega);
    const double z0 = conj_factor(omega, o.tau, spec.alpha);
    Trajectory traj =
        solver.solve(scale(u0, z0), o.tau, o.t_end, o.record_stride);
    // The recorded states are v; export the original variable u = z^{-1} v.
    for (auto& s : traj.samples)
      s.v = scale(s.v, 1.0 / conj_factor(omega, s.t, spec.alpha));

    write_trajectory_csv(o.common.out + "/trajectory.csv", traj);
    if (o.coeff_trajectory)
      write_trajectory_coeffs_csv(o.common.out + "/trajectory_coeffs.csv", traj);
    write_field_csv(o.common.out + "/final_field.csv", traj.samples.back().v);
    write_coeffs_csv(o.common.out + "/final_coeffs.csv", traj.samples.back().v);
    write_path_csv(o.common.out + "/path.csv", path);

    double max_sup = 0.0;
    for (const auto& s : traj.samples) max_sup = std::max(max_sup, sup_norm(s.v));
    manifest["norms"] = {{"final_sup", sup_norm(traj.samples.back().v)},
                         {"max_sup", max_sup}};
    manifest["guard_tripped"] = false;
    cli::write_json(manifest_path, manifest);
    return 0;
  } catch (const BlowupError& e) {
    manifest["guard_tripped"] = true;
    manifest["error"] = e.what();
    cli::write_json(manifest_path, manifest);
    std::cerr << "numeric guard: " << e.what() << "\n";
    return 3;
  } catch (const PathRangeError& e) {
    manifest["guard_tripped"] = true;
    manifest["error"] = e.what();
    cli::write_json(manifest_path, manifest);
    std::cerr << "numeric guard: " << e.what() << "\n";
    return 3;
  }
}

// ---------------------------------------------------------------------------
// xi
// ---------------------------------------------------------------------------

struct XiOpts {
  CommonOpts common;
  double tau = 0.0;
  double beta = 0.5;
  double alpha = 1.0;
  double S = 0.0;  // 0 = derive from tolerance
  double xi_tol = 1e-6;
  std::string h_shape = "const";
  double h_scale = 1.0;
  double h_period = 0.0;
  double h_mod = 0.0;
};

int run_xi(const XiOpts& o) {
  cli::ensure_out_dir(o.common.out);
  if (!(o.beta > 0.0 && o.beta < 1.0))
    throw ConfigError("beta must lie in (0, 1)");

  ProblemSpec spec;
  spec.alpha = o.alpha;
  spec.n_modes = o.common.n_modes;
  spec.dt = o.common.dt;
  Nonlinearity nl;
  nl.eval = [](double, double, double) { return 0.0; };
  nl.lipschitz = [](double, double, double, double) { return 0.0; };
  nl.beta = o.beta;
  nl.is_zero = true;
  const std::string shape = o.h_shape;
  const double scale_h = o.h_scale, period = o.h_period, mod = o.h_mod;
  if (shape != "zero" && shape != "const" && shape != "sinx")
    throw ConfigError("h-shape must be zero, const, or sinx");
  nl.h = [shape, scale_h, period, mod](double t, double x) {
    if (shape == "zero") return 0.0;
    double v = scale_h;
    if (period > 0.0)
      v *= 1.0 + mod * std::sin(2.0 * std::numbers::pi * t / period);
    if (shape == "sinx") v *= std::sin(x);
    return v;
  };
  nl.h_sup = shape == "zero" ? 0.0 : scale_h * (1.0 + std::abs(mod));
  nl.h_time_constant = (period == 0.0 || shape == "zero");
  spec.nl = nl;
  spec.forcing = zero_forcing(std::min(0.25, (1.0 - o.beta) / 2.0));

  const double S = o.S > 0.0 ? o.S : required_truncation(spec, o.xi_tol);
  const WienerPath path = build_path(o.common, -S - 2.0, 1.0);

  XiRequest req{PathView(path)};
  req.tau = o.tau;
  req.spec = &spec;
  req.S = S;
  req.tolerance = o.xi_tol;
  const XiValue value = xi(req);

  // Plot-ready profile, column pair x,xi.
  {
    std::ofstream os(o.common.out + "/xi.csv");
    os << "x,xi\n";
    const int m = oversampled_points(spec.n_modes);
    const GridSample g = to_grid(value.field, m);
    auto table = SineTable::get(spec.n_modes, m);
    for (int j = 0; j < m; ++j)
      os << fmt_double(table->nodes()[static_cast<std::size_t>(j)]) << ","
         << fmt_double(g.values[static_cast<std::size_t>(j)]) << "\n";
  }
  write_coeffs_csv(o.common.out + "/xi_coeffs.csv", value.field);

  ordered_json manifest = common_manifest("xi", o.common);
  manifest["config"]["tau"] = o.tau;
  manifest["config"]["beta"] = o.beta;
  manifest["config"]["alpha"] = o.alpha;
  manifest["config"]["h_shape"] = o.h_shape;
  manifest["config"]["h_scale"] = o.h_scale;
  manifest["config"]["h_period"] = o.h_period;
  manifest["config"]["h_mod"] = o.h_mod;
  manifest["tau"] = value.tau;
  manifest["S"] = value.S;
  manifest["tail_bound"] = value.tail_bound;
  manifest["seed"] = o.common.seed_text;
  manifest["sup_norm"] = sup_norm(value.field);
  cli::write_json(o.common.out + "/manifest.json", manifest);
  return 0;
}

// ---------------------------------------------------------------------------
// extremal
// ---------------------------------------------------------------------------

struct ExtremalOpts2 {
  CommonOpts common;
  double nu = 1.5;
  double gamma0 = 1.0;
  double gamma_period = 0.0;
  double gamma_amp = 0.0;
  double alpha = 1.0;
  double tau = 0.0;
  std::string ladder = "5,10,20,40";
  double cap = 160.0;
  std::string sign = "+";
  double xi_tol = 1e-6;
};

int run_extremal(const ExtremalOpts2& o) {
  cli::ensure_out_dir(o.common.out);
  if (o.sign != "+" && o.sign != "-")
    throw ConfigError("sign must be + or -");
  const ChafeeSpec cs =
      chafee_from(o.nu, o.gamma0, o.gamma_period, o.gamma_amp, o.alpha);
  const ProblemSpec spec = make_problem(cs, o.common.n_modes, o.common.dt);

  ExtremalOptions opts;
  opts.ladder = cli::parse_double_list(o.ladder);
  opts.tol = o.common.tol;
  opts.ladder_cap = o.cap;
  opts.xi_tol = o.xi_tol;

  const double S = required_truncation(spec, o.xi_tol);
  const WienerPath path = build_path(
      o.common, std::min(-o.cap - S - 2.0, o.tau - o.cap - S - 2.0),
      std::max(o.tau, 0.0) + 2.0);

  const ExtremalResult res =
      extremal(o.sign == "+" ? +1 : -1, o.tau, PathView(path), spec, opts);

  {
    std::ofstream os(o.common.out + "/u_star.csv");
    os << "x,u_star\n";
    const int m = oversampled_points(spec.n_modes);
    const GridSample g = to_grid(res.field, m);
    auto table = SineTable::get(spec.n_modes, m);
    for (int j = 0; j < m; ++j)
      os << fmt_double(table->nodes()[static_cast<std::size_t>(j)]) << ","
         << fmt_double(g.values[static_cast<std::size_t>(j)]) << "\n";
  }
  write_coeffs_csv(o.common.out + "/u_star_coeffs.csv", res.field);

  ordered_json manifest = common_manifest("extremal", o.common);
  manifest["config"]["nu"] = o.nu;
  manifest["config"]["gamma0"] = o.gamma0;
  manifest["config"]["gamma_period"] = o.gamma_period;
  manifest["config"]["gamma_amp"] = o.gamma_amp;
  manifest["config"]["alpha"] = o.alpha;
  manifest["config"]["tau"] = o.tau;
  manifest["config"]["ladder"] = o.ladder;
  manifest["config"]["sign"] = o.sign;
  manifest["ladder_used"] = res.ladder;
  manifest["rung_deltas"] = res.rung_deltas;
  manifest["converged"] = res.converged;
  manifest["monotonicity_max_violation"] = res.monotonicity_max_violation;
  manifest["xi_bound_defect"] = res.xi_bound_defect;
  manifest["a1"] = a1_projection(res.field);
  manifest["sup_norm"] = sup_norm(res.field);
  cli::write_json(o.common.out + "/manifest.json", manifest);
  return 0;
}

// ---------------------------------------------------------------------------
// bifurcate / periodic
// ---------------------------------------------------------------------------

struct SweepOpts {
  CommonOpts common;
  std::string nu_list = "0.5,0.9,1.0,1.05,1.1,1.2,1.4,1.5";
  double gamma0 = 1.0;
  double gamma_period = 0.0;
  double gamma_amp = 0.0;
  double alpha = 1.0;
  std::string seeds = "7";
  double tau = 0.0;
};

SweepConfig sweep_config(const SweepOpts& o) {
  SweepConfig cfg;
  cfg.nu_list = cli::parse_double_list(o.nu_list);
  cfg.gamma0 = o.gamma0;
  cfg.gamma_period = o.gamma_period;
  cfg.gamma_amp = o.gamma_amp;
  cfg.alpha = o.alpha;
  cfg.seeds = cli::parse_seed_list(o.seeds);
  cfg.include_deterministic = o.common.deterministic;
  cfg.tau = o.tau;
  cfg.n_modes = o.common.n_modes;
  cfg.dt = o.common.dt;
  cfg.tol = o.common.tol;
  cfg.jobs = o.common.jobs;
  return cfg;
}

ordered_json sweep_manifest(const char* command, const SweepOpts& o) {
  ordered_json manifest = common_manifest(command, o.common);
  manifest["config"]["nu_list"] = o.nu_list;
  manifest["config"]["gamma0"] = o.gamma0;
  manifest["config"]["gamma_period"] = o.gamma_period;
  manifest["config"]["gamma_amp"] = o.gamma_amp;
  manifest["config"]["alpha"] = o.alpha;
  manifest["config"]["seeds"] = o.seeds;
  manifest["config"]["tau"] = o.tau;
  manifest["config"]["jobs"] = o.common.jobs;
  return manifest;
}

int run_bifurcate(const SweepOpts& o) {
  cli::ensure_out_dir(o.common.out);
  const auto rows = bifurcation_sweep(sweep_config(o));
  {
    std::ofstream os(o.common.out + "/bifurcation.csv");
    os << "nu,seed,a1,supnorm,converged,ladder_max\n";
    for (const auto& r : rows)
      os << fmt_double(r.nu) << "," << r.seed << "," << fmt_double(r.a1) << ","
         << fmt_double(r.supnorm) << "," << (r.converged ? 1 : 0) << ","
         << fmt_double(r.ladder_max) << "\n";
  }
  ordered_json manifest = sweep_manifest("bifurcate", o);
  bool all_converged = true;
  for (const auto& r : rows) all_converged = all_converged && r.converged;
  manifest["rows"] = rows.size();
  manifest["all_converged"] = all_converged;
  cli::write_json(o.common.out + "/manifest.json", manifest);
  return all_converged ? 0 : 1;
}

int run_periodic(const SweepOpts& o) {
  cli::ensure_out_dir(o.common.out);
  if (!(o.gamma_period > 0.0))
    throw ConfigError("periodic sweep requires --gamma-period > 0");
  const auto rows = periodic_bifurcation(sweep_config(o));
  {
    std::ofstream os(o.common.out + "/periodic.csv");
    os << "nu,seed,amplitude,periodicity_defect,separation,three_distinct,"
          "converged\n";
    for (const auto& r : rows)
      os << fmt_double(r.nu) << "," << r.seed << "," << fmt_double(r.amplitude)
         << "," << fmt_double(r.periodicity_defect) << ","
         << fmt_double(r.separation) << "," << (r.three_distinct ? 1 : 0)
         << "," << (r.converged ? 1 : 0) << "\n";
  }
  ordered_json manifest = sweep_manifest("periodic", o);
  bool all_converged = true;
  for (const auto& r : rows) all_converged = all_converged && r.converged;
  manifest["rows"] = rows.size();
  manifest["all_converged"] = all_converged;
  cli::write_json(o.common.out + "/manifest.json", manifest);
  return all_converged ? 0 : 1;
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

int run_verify(const CommonOpts& o) {
  cli::ensure_out_dir(o.out);
  const auto start = std::chrono::steady_clock::now();

  cli::VerifyConfig vcfg;
  vcfg.deterministic = o.deterministic;
  vcfg.dt = o.dt;
  vcfg.n_modes = o.n_modes;
  vcfg.seed = parse_seed(o.seed_text);
  const auto results = cli::run_verify_battery(vcfg);

  bool all_pass = true;
  {
    std::ofstream os(o.out + "/verify_results.csv");
    os << "check,pass,measured,tolerance\n";
    for (const auto& r : results) {
      os << r.name << "," << (r.pass ? 1 : 0) << "," << fmt_double(r.measured)
         << "," << fmt_double(r.tolerance) << "\n";
      all_pass = all_pass && r.pass;
    }
  }

  ordered_json manifest = common_manifest("verify", o);
  ordered_json checks = ordered_json::array();
  for (const auto& r : results) {
    ordered_json c;
    c["name"] = r.name;
    c["pass"] = r.pass;
    c["measured"] = r.measured;
    c["tolerance"] = r.tolerance;
    if (!r.detail.empty()) c["detail"] = r.detail;
    checks.push_back(c);
  }
  manifest["checks"] = checks;
  manifest["all_pass"] = all_pass;
  cli::write_json(o.out + "/manifest.json", manifest);

  // Wall time goes to a sidecar so the primary outputs stay byte-identical
  // between reruns of the same config.
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  {
    std::ofstream os(o.out + "/timing.log");
    os << "wall_seconds=" << secs << "\n";
  }

  std::printf("%-28s %-6s %14s %14s\n", "check", "pass", "measured", "tolerance");
  for (const auto& r : results)
    std::printf("%-28s %-6s %14.6g %14.6g\n", r.name.c_str(),
                r.pass ? "PASS" : "FAIL", r.measured, r.tolerance);
  std::printf("verify: %s (%zu checks, %.1f s)\n",
              all_pass ? "all checks passed" : "FAILURES present",
              results.size(), secs);
  return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pathwise simulation and verification of stochastically "
               "perturbed reaction-diffusion dynamics on (0, pi)"};
  app.require_subcommand(1);

  SimulateOpts sim;
  CLI::App* sub_sim = app.add_subcommand(
      "simulate", "integrate one trajectory and export it as CSV");
  add_common(sub_sim, sim.common);
  sub_sim->add_option("--model", sim.model, "chafee | heat");
  sub_sim->add_option("--nu", sim.nu, "linear reaction coefficient");
  sub_sim->add_option("--gamma0", sim.gamma0, "cubic coefficient lower bound");
  sub_sim->add_option("--gamma-period", sim.gamma_period, "period of gamma(t), 0 = constant");
  sub_sim->add_option("--gamma-amp", sim.gamma_amp, "modulation amplitude of gamma(t)");
  sub_sim->add_option("--alpha", sim.alpha, "noise intensity");
  sub_sim->add_option("--tau", sim.tau, "initial time");
  sub_sim->add_option("--t-end", sim.t_end, "final time");
  sub_sim->add_option("--init", sim.init, "zero | sinx | sin2x | flat");
  sub_sim->add_option("--init-amp", sim.init_amp, "initial amplitude");
  sub_sim->add_option("--record-stride", sim.record_stride, "steps between samples");
  sub_sim->add_option("--guard", sim.guard, "sup-norm blow-up guard");
  sub_sim->add_option("--path-file", sim.path_file,
                      "drive the run with a path imported from CSV (t,omega)");
  sub_sim->add_flag("--coeff-trajectory", sim.coeff_trajectory,
                    "also emit the trajectory in coefficient form (t,n,a_n)");

  XiOpts xo;
  CLI::App* sub_xi = app.add_subcommand(
      "xi", "pullback quasi-solution of the damped linear problem");
  add_common(sub_xi, xo.common);
  sub_xi->add_option("--tau", xo.tau, "anchor time");
  sub_xi->add_option("--beta", xo.beta, "damping shift, in (0,1)");
  sub_xi->add_option("--alpha", xo.alpha, "noise intensity");
  sub_xi->add_option("--S", xo.S, "truncation horizon (0 = derive from xi-tol)");
  sub_xi->add_option("--xi-tol", xo.xi_tol, "truncation tolerance");
  sub_xi->add_option("--h-shape", xo.h_shape, "zero | const | sinx");
  sub_xi->add_option("--h-scale", xo.h_scale, "forcing scale");
  sub_xi->add_option("--h-period", xo.h_period, "forcing period, 0 = constant");
  sub_xi->add_option("--h-mod", xo.h_mod, "forcing modulation depth");

  ExtremalOpts2 eo;
  CLI::App* sub_ex = app.add_subcommand(
      "extremal", "monotone pullback construction of the extremal state");
  add_common(sub_ex, eo.common);
  sub_ex->add_option("--nu", eo.nu, "linear reaction coefficient");
  sub_ex->add_option("--gamma0", eo.gamma0, "cubic coefficient lower bound");
  sub_ex->add_option("--gamma-period", eo.gamma_period, "period of gamma(t)");
  sub_ex->add_option("--gamma-amp", eo.gamma_amp, "modulation amplitude");
  sub_ex->add_option("--alpha", eo.alpha, "noise intensity");
  sub_ex->add_option("--tau", eo.tau, "anchor time");
  sub_ex->add_option("--ladder", eo.ladder, "comma list of pullback horizons");
  sub_ex->add_option("--cap", eo.cap, "ladder extension cap");
  sub_ex->add_option("--sign", eo.sign, "+ for the maximal state, - for minimal");
  sub_ex->add_option("--xi-tol", eo.xi_tol, "anchor truncation tolerance");

  SweepOpts bo;
  CLI::App* sub_bi = app.add_subcommand(
      "bifurcate", "pullback amplitude sweep across nu");
  add_common(sub_bi, bo.common);
  sub_bi->add_option("--nu-list", bo.nu_list, "comma list of nu values");
  sub_bi->add_option("--gamma0", bo.gamma0, "cubic coefficient lower bound");
  sub_bi->add_option("--gamma-period", bo.gamma_period, "period of gamma(t)");
  sub_bi->add_option("--gamma-amp", bo.gamma_amp, "modulation amplitude");
  sub_bi->add_option("--alpha", bo.alpha, "noise intensity");
  sub_bi->add_option("--seeds", bo.seeds, "comma list of path seeds");
  sub_bi->add_option("--tau", bo.tau, "anchor time");

  SweepOpts po;
  po.gamma_period = 1.0;
  po.gamma0 = 0.5;
  po.gamma_amp = 0.5;
  CLI::App* sub_pe = app.add_subcommand(
      "periodic", "periodic-coefficient sweep: periodicity and multiplicity");
  add_common(sub_pe, po.common);
  sub_pe->add_option("--nu-list", po.nu_list, "comma list of nu values");
  sub_pe->add_option("--gamma0", po.gamma0, "cubic coefficient lower bound");
  sub_pe->add_option("--gamma-period", po.gamma_period, "period of gamma(t)");
  sub_pe->add_option("--gamma-amp", po.gamma_amp, "modulation amplitude");
  sub_pe->add_option("--alpha", po.alpha, "noise intensity");
  sub_pe->add_option("--seeds", po.seeds, "comma list of path seeds");
  sub_pe->add_option("--tau", po.tau, "anchor time");

  CommonOpts vo;
  CLI::App* sub_ve = app.add_subcommand(
      "verify", "run the bundled invariant battery at desk scale");
  add_common(sub_ve, vo);

  std::vector<std::string> raw_args(argv + 1, argv + argc);
  try {
    const std::vector<std::string> merged = merge_config_args(raw_args, app);
    std::vector<const char*> cargs;
    cargs.push_back(argv[0]);
    for (const auto& a : merged) cargs.push_back(a.c_str());
    app.parse(static_cast<int>(cargs.size()), cargs.data());

    if (sub_sim->parsed()) return run_simulate(sim);
    if (sub_xi->parsed()) return run_xi(xo);
    if (sub_ex->parsed()) return run_extremal(eo);
    if (sub_bi->parsed()) return run_bifurcate(bo);
    if (sub_pe->parsed()) return run_periodic(po);
    if (sub_ve->parsed()) return run_verify(vo);
    return 2;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const BlowupError& e) {
    std::cerr << "numeric guard: " << e.what() << "\n";
    return 3;
  } catch (const PathRangeError& e) {
    std::cerr << "numeric guard: " << e.what() << "\n";
    return 3;
  } catch (const TruncationError& e) {
    std::cerr << "numeric guard: " << e.what() << "\n";
    return 3;
  } catch (const MonotonicityError& e) {
    std::cerr << "check failure: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
