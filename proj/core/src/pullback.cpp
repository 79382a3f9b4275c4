#include "spde/pullback.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "spde/solver.hpp"

namespace spde {

TemperedProbe probe_tempered(const TemperedFamily& family, double tau) {
  TemperedProbe probe;
  probe.cs = {0.1, 1.0, 10.0};
  probe.rs = {-10.0, -20.0, -40.0};
  probe.decreasing = true;
  for (double c : probe.cs) {
    std::vector<double> row;
    for (double r : probe.rs)
      row.push_back(std::exp(c * r) * family.radius(tau, r));
    for (std::size_t i = 0; i + 1 < row.size(); ++i)
      if (row[i + 1] > row[i] * (1.0 + 1e-12) + 1e-300) probe.decreasing = false;
    probe.values.push_back(std::move(row));
  }
  return probe;
}

double calibrate_semigroup_constant(int n_modes, double beta) {
  const double pi = std::numbers::pi;
  std::vector<Field> probes;
  for (int n = 1; n <= std::min(4, n_modes); ++n)
    probes.push_back(single_mode(n_modes, n, 1.0));
  {
    // Flat profile: sine coefficients of the constant function 1.
    Field f(n_modes);
    for (int n = 1; n <= n_modes; n += 2)
      f.mutable_coeffs()[static_cast<std::size_t>(n - 1)] = 4.0 / (n * pi);
    probes.push_back(f);
  }
  {
    // Tent profile peaked at pi/2.
    Field f(n_modes);
    for (int n = 1; n <= n_modes; ++n)
      f.mutable_coeffs()[static_cast<std::size_t>(n - 1)] =
          8.0 / (pi * n * n) * std::sin(n * pi / 2.0);
    probes.push_back(f);
  }
  {
    // Fixed rough profile: alternating-sign 1/sqrt(n) coefficients.
    Field f(n_modes);
    for (int n = 1; n <= n_modes; ++n)
      f.mutable_coeffs()[static_cast<std::size_t>(n - 1)] =
          ((n % 2 == 0) ? -1.0 : 1.0) / std::sqrt(static_cast<double>(n));
    probes.push_back(f);
  }

  const double ts[] = {0.05, 0.1, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0};
  double M = 1.0;
  for (const Field& f : probes) {
    const double base = sup_norm(f);
    if (base == 0.0) continue;
    for (double t : ts) {
      const double ratio =
          sup_norm(apply_semigroup(f, t, beta)) * std::exp((1.0 - beta) * t) / base;
      M = std::max(M, ratio);
    }
  }
  return M;
}

AbsorbingRadius absorbing_radius(double tau, const PathView& omega,
                                 const ProblemSpec& spec, double M_used,
                                 double S, double tol) {
  const double beta = spec.nl.beta;
  const double delta = spec.forcing.delta;
  const double alpha = spec.alpha;
  const double dq = spec.dt;
  const std::int64_t nq = static_cast<std::int64_t>(std::ceil(S / dq - 1e-9));
  const double S_used = static_cast<double>(nq) * dq;

  const PathView w = omega.shifted(-tau);
  if (!w.covers(tau - S_used, tau))
    throw std::invalid_argument(
        "path does not cover the truncated absorbing integral domain");

  const std::int64_t node_tau = w.node_of(tau);
  const double a_tau = alpha * w.value_at_node(node_tau);
  if (std::abs(a_tau) > 700.0)
    throw std::domain_error("conjugation exponent overflows at tau");
  const double zinv_tau = std::exp(a_tau);

  const int m = oversampled_points(spec.n_modes);
  auto table = SineTable::get(spec.n_modes, m);
  const auto xs = table->nodes();
  const auto& h = spec.nl.h;
  const auto& g = spec.forcing.g;
  const bool frozen = spec.nl.h_time_constant && spec.forcing.time_constant;
  auto norms_at = [&](double t) {
    double hs = 0.0, gs = 0.0;
    for (double x : xs) {
      hs = std::max(hs, std::abs(h(t, x)));
      gs = std::max(gs, std::abs(g(t, x)));
    }
    return hs + gs;
  };
  const double frozen_norm = frozen ? norms_at(tau) : 0.0;

  double integral = 0.0;
  for (std::int64_t i = 0; i < nq; ++i) {
    const std::int64_t node_l = node_tau + (i - nq);
    const double s_rel = (static_cast<double>(i - nq) + 0.5) * dq;
    const double w_mid =
        0.5 * (w.value_at_node(node_l) + w.value_at_node(node_l + 1));
    const double expo = alpha * w_mid;
    if (std::abs(expo) > 700.0)
      throw std::domain_error("conjugation exponent overflows in quadrature");
    const double norm = frozen ? frozen_norm : norms_at(tau + s_rel);
    integral += dq * std::exp((1.0 - beta) * s_rel) * std::exp(-expo) * norm;
  }

  // Truncation control mirrors the xi tail bound.
  const double phi_sup = spec.nl.h_sup + spec.forcing.g_sup;
  if (phi_sup > 0.0) {
    const double lt = -alpha * w.value_at_node(node_tau - nq) +
                      (1.0 - beta - delta) * (-S_used);
    const double tail =
        std::exp(lt) * phi_sup * std::exp(-delta * S_used) / delta;
    if (zinv_tau * M_used * tail > tol) {
      std::ostringstream os;
      os << "absorbing-radius truncation tail " << zinv_tau * M_used * tail
         << " exceeds " << tol << "; enlarge S";
      throw TruncationError(zinv_tau * M_used * tail, 1.5 * S_used, os.str());
    }
  }

  AbsorbingRadius out;
  out.tau = tau;
  out.path = omega.descriptor();
  out.M_used = M_used;
  out.integral_value = zinv_tau * integral;
  out.R = M_used * (1.0 + out.integral_value);
  return out;
}

namespace {

struct RungState {
  double t = 0.0;
  Field u;
};

void check_extremal_coverage(double tau, const PathView& omega, double t_deep,
                             double S) {
  const double need_lo = -t_deep - S;
  const double need_hi = std::max(0.0, tau) + 1e-12;
  if (!omega.covers(need_lo, 0.0) || !omega.covers(std::min(-tau, 0.0), need_hi)) {
    std::ostringstream os;
    os << "path view must cover [" << need_lo << ", " << need_hi
       << "] (and the anchor at -tau) for the pullback ladder";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace

ExtremalResult extremal(int sign, double tau, const PathView& omega,
                        const ProblemSpec& spec, const ExtremalOptions& opts) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("sign must be +1 or -1");
  std::vector<double> ladder = opts.ladder;
  std::sort(ladder.begin(), ladder.end());
  ladder.erase(std::unique(ladder.begin(), ladder.end()), ladder.end());
  if (ladder.empty() || ladder.front() <= 0.0)
    throw std::invalid_argument("ladder must contain positive horizons");

  const double mono_tol =
      opts.mono_tol >= 0.0 ? opts.mono_tol : 10.0 * solver_tolerance(spec);
  const double S = required_truncation(spec, opts.xi_tol);
  check_extremal_coverage(tau, omega, opts.ladder_cap, S);

  XiRequest base_req(omega);
  base_req.tau = tau;
  base_req.spec = &spec;
  base_req.S = S;
  base_req.tolerance = opts.xi_tol;
  const XiValue xi_tau = xi(base_req);

  ExtremalResult res;
  res.sign = sign;
  res.tau = tau;
  res.path = omega.descriptor();

  RungState prev;
  bool have_prev = false;
  int hits = 0;
  std::size_t idx = 0;
  while (true) {
    double t_k;
    if (idx < ladder.size()) {
      t_k = ladder[idx];
    } else {
      t_k = 2.0 * res.ladder.back();
      if (t_k > opts.ladder_cap * (1.0 + 1e-12)) break;
    }
    ++idx;

    const PathView w_k = omega.shifted(-t_k);
    XiRequest rung_req(w_k);
    rung_req.tau = tau - t_k;
    rung_req.spec = &spec;
    rung_req.S = S;
    rung_req.tolerance = opts.xi_tol;
    const XiValue anchor = xi(rung_req);

    const Field u_k =
        cocycle_phi(t_k, tau - t_k, w_k, scale(anchor.field, sign), spec);

    res.ladder.push_back(t_k);
    const double above = max_exceedance(u_k, xi_tau.field);
    const double below = max_exceedance(scale(u_k, -1.0), xi_tau.field);
    res.xi_bound_defect =
        std::max(res.xi_bound_defect, std::max(above, below));

    if (have_prev) {
      const double viol = sign > 0 ? max_exceedance(u_k, prev.u)
                                   : max_exceedance(prev.u, u_k);
      res.monotonicity_max_violation =
          std::max(res.monotonicity_max_violation, std::max(0.0, viol));
      if (viol > mono_tol) {
        std::ostringstream os;
        os << "pullback ladder lost monotonicity at t = " << t_k
           << " (overshoot " << viol << " > " << mono_tol
           << "); the scheme or the problem data is misconfigured";
        throw MonotonicityError(viol, os.str());
      }
      const double delta = sup_norm(sub(u_k, prev.u));
      res.rung_deltas.push_back(delta);
      hits = delta < opts.tol ? hits + 1 : 0;
      if (hits >= opts.hits_required) {
        res.converged = true;
        res.field = u_k;
        return res;
      }
    }
    if (opts.floor_stop >= 0.0 && sup_norm(u_k) <= opts.floor_stop) {
      res.converged = true;
      res.field = u_k;
      return res;
    }
    prev = {t_k, u_k};
    have_prev = true;
    res.field = prev.u;
  }
  return res;  // unconverged: reported, never silently accepted
}

double quasi_solution_residual(const ExtremalResult& result, double t,
                               const PathView& omega, const ProblemSpec& spec,
                               const ExtremalOptions& opts) {
  if (!(t > 0.0)) throw std::invalid_argument("horizon must be positive");
  const Field forward = cocycle_phi(t, result.tau, omega, result.field, spec);
  const ExtremalResult far =
      extremal(result.sign, result.tau + t, omega.shifted(t), spec, opts);
  return sup_norm(sub(forward, far.field));
}

StabilityReport stability_from_above(const Field& offset, double tau,
                                     const PathView& omega,
                                     const ProblemSpec& spec,
                                     const ExtremalOptions& opts, int sign) {
  const ExtremalResult at_tau = extremal(sign, tau, omega, spec, opts);
  StabilityReport rep;
  for (double t : opts.ladder) {
    const PathView w_t = omega.shifted(-t);
    const ExtremalResult past = extremal(sign, tau - t, w_t, spec, opts);
    const Field psi = add(past.field, offset);
    const Field out = cocycle_phi(t, tau - t, w_t, psi, spec);
    rep.ts.push_back(t);
    rep.distances.push_back(sup_norm(sub(out, at_tau.field)));
    const double defect = sign > 0 ? max_exceedance(at_tau.field, out)
                                   : max_exceedance(out, at_tau.field);
    rep.sandwich_defect = std::max(rep.sandwich_defect, std::max(0.0, defect));
  }
  rep.decreasing = true;
  for (std::size_t i = 0; i + 1 < rep.distances.size(); ++i)
    if (rep.distances[i + 1] > rep.distances[i] + 1e-12) rep.decreasing = false;
  rep.final_distance = rep.distances.empty() ? 0.0 : rep.distances.back();
  return rep;
}

std::pair<Field, Field> attractor_interval(double tau, const PathView& omega,
                                           const ProblemSpec& spec,
                                           const ExtremalOptions& opts) {
  const ExtremalResult lower = extremal(-1, tau, omega, spec, opts);
  const ExtremalResult upper = extremal(+1, tau, omega, spec, opts);
  if (!lower.converged || !upper.converged)
    throw std::runtime_error(
        "extremal computation did not converge; extend the ladder cap");
  return {lower.field, upper.field};
}

double periodicity_check(double tau, double T, const PathView& omega,
                         const ProblemSpec& spec, const ExtremalOptions& opts,
                         int sign) {
  const ExtremalResult at_tau = extremal(sign, tau, omega, spec, opts);
  const ExtremalResult at_tau_T = extremal(sign, tau + T, omega, spec, opts);
  return sup_norm(sub(at_tau_T.field, at_tau.field));
}

}  // namespace spde
