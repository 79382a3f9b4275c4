#include "spde/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace spde {

namespace {

double coeff_l1(std::span<const double> c) {
  double s = 0.0;
  for (double v : c) s += std::abs(v);
  return s;
}

}  // namespace

PathwiseSolver::PathwiseSolver(const ProblemSpec& spec, PathView path)
    : spec_(spec), path_(path) {
  if (spec_.n_modes < 1) throw std::invalid_argument("n_modes must be >= 1");
  if (!(spec_.dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (std::abs(path_.dt() - spec_.dt) >
      1e-9 * std::max(path_.dt(), spec_.dt))
    throw std::invalid_argument(
        "path grid must match the solver step (use refine to align)");
  const int n = spec_.n_modes;
  const int m = oversampled_points(n);
  table_ = SineTable::get(n, m);
  e_full_.resize(static_cast<std::size_t>(n));
  e_half_.resize(static_cast<std::size_t>(n));
  for (int k = 1; k <= n; ++k) {
    const double lam = eigenvalue(k);
    e_full_[static_cast<std::size_t>(k - 1)] = std::exp(-lam * spec_.dt);
    e_half_[static_cast<std::size_t>(k - 1)] = std::exp(-lam * spec_.dt / 2.0);
  }
  grid_v_.resize(static_cast<std::size_t>(m));
  grid_u_.resize(static_cast<std::size_t>(m));
  grid_f_.resize(static_cast<std::size_t>(m));
  coef_.resize(static_cast<std::size_t>(n));
}

void PathwiseSolver::eval_rhs(double t, double z, std::span<const double> state,
                              std::span<double> out) {
  const auto xs = table_->nodes();
  const std::size_t m = state.size();
  const double zinv = 1.0 / z;
  for (std::size_t j = 0; j < m; ++j) grid_u_[j] = zinv * state[j];
  if (spec_.nl.is_zero) {
    std::fill(out.begin(), out.end(), 0.0);
  } else if (spec_.nl.eval_grid) {
    spec_.nl.eval_grid(t, xs, std::span<const double>(grid_u_), out);
  } else {
    for (std::size_t j = 0; j < m; ++j)
      out[j] = spec_.nl.eval(t, xs[j], grid_u_[j]);
  }
  if (!spec_.forcing.is_zero) {
    for (std::size_t j = 0; j < m; ++j) out[j] += spec_.forcing.g(t, xs[j]);
  }
  for (std::size_t j = 0; j < m; ++j) out[j] *= z;
}

void PathwiseSolver::step_in_place(std::vector<double>& v, std::int64_t node) {
  const double dt = spec_.dt;
  const double t_left = static_cast<double>(node) * dt;
  const double t_mid = (static_cast<double>(node) + 0.5) * dt;
  const double w_left = path_.value_at_node(node);
  const double w_mid = 0.5 * (w_left + path_.value_at_node(node + 1));
  if (std::abs(spec_.alpha * w_mid) > 700.0 ||
      std::abs(spec_.alpha * w_left) > 700.0) {
    std::ostringstream os;
    os << "conjugation exponent " << spec_.alpha * w_mid << " at t = " << t_left
       << " exceeds the double range";
    throw PathRangeError(os.str());
  }
  // Midpoint conjugation factor from the two node values only (geometric
  // mean); the solver never interpolates the path.
  const double z_left = std::exp(-spec_.alpha * w_left);
  const double z_mid = std::exp(-spec_.alpha * w_mid);

  const std::size_t n = v.size();

  // Predictor: right-hand side at the left node carries the state to the
  // interval midpoint at second order.
  table_->synthesize(v, grid_v_);
  eval_rhs(t_left, z_left, grid_v_, grid_f_);
  table_->analyze(grid_f_, coef_);
  for (std::size_t i = 0; i < n; ++i)
    coef_[i] = e_half_[i] * (v[i] + 0.5 * dt * coef_[i]);
  table_->synthesize(coef_, grid_v_);

  // Midpoint quadrature of the integral form of the step.
  eval_rhs(t_mid, z_mid, grid_v_, grid_f_);
  table_->analyze(grid_f_, coef_);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = e_full_[i] * v[i] + dt * e_half_[i] * coef_[i];
}

Field PathwiseSolver::step(const Field& v, double t) {
  if (v.n_modes() != spec_.n_modes)
    throw std::invalid_argument("state has wrong mode count");
  std::vector<double> c(v.coeffs().begin(), v.coeffs().end());
  step_in_place(c, path_.node_of(t));
  return Field::from_coeffs(std::move(c));
}

Field PathwiseSolver::integrate(
    Field v, double tau, double t_end,
    const std::function<void(double, const Field&)>& on_step) {
  if (v.n_modes() != spec_.n_modes)
    throw std::invalid_argument("state has wrong mode count");
  const std::int64_t k0 = path_.node_of(tau);
  const std::int64_t k1 = path_.node_of(t_end);
  if (k1 < k0) throw std::invalid_argument("t_end must be >= tau");
  std::vector<double>& c = v.mutable_coeffs();
  for (std::int64_t k = k0; k < k1; ++k) {
    step_in_place(c, k);
    // Cheap blow-up proxy: the coefficient l1 norm dominates the sup-norm.
    if (coeff_l1(c) > spec_.guard) {
      const double norm = sup_norm(v);
      if (norm > spec_.guard) {
        std::ostringstream os;
        os << "blow-up guard tripped at t = "
           << static_cast<double>(k + 1) * spec_.dt << " (sup-norm " << norm
           << " > " << spec_.guard
           << "); check dt and the dissipativity declaration";
        throw BlowupError(static_cast<double>(k + 1) * spec_.dt, norm, os.str());
      }
    }
    if (on_step) on_step(static_cast<double>(k + 1) * spec_.dt, v);
  }
  return v;
}

Trajectory PathwiseSolver::solve(const Field& v_tau, double tau, double t_end,
                                 int record_stride) {
  if (record_stride < 1) throw std::invalid_argument("record_stride must be >= 1");
  Trajectory traj;
  traj.tau = tau;
  traj.dt = spec_.dt;
  traj.record_dt = spec_.dt * record_stride;
  traj.path = path_.descriptor();
  traj.scheme = "exponential-midpoint";
  traj.samples.push_back({tau, v_tau});
  traj.max_sup_norm = sup_norm(v_tau);

  const std::int64_t k0 = path_.node_of(tau);
  std::int64_t steps = 0;
  Field final = integrate(v_tau, tau, t_end, [&](double t, const Field& v) {
    ++steps;
    if (steps % record_stride == 0) {
      traj.samples.push_back({t, v});
      traj.max_sup_norm = std::max(traj.max_sup_norm, sup_norm(v));
    }
  });
  (void)k0;
  const double t_last = traj.samples.back().t;
  if (std::abs(t_last - t_end) > 0.5 * spec_.dt) {
    traj.samples.push_back({t_end, final});
    traj.max_sup_norm = std::max(traj.max_sup_norm, sup_norm(final));
  }
  return traj;
}

Field step_v(const Field& v, double t, double dt, const PathView& path,
             const ProblemSpec& spec) {
  ProblemSpec s = spec;
  s.dt = dt;
  PathwiseSolver solver(s, path);
  return solver.step(v, t);
}

Trajectory solve_v(const Field& v_tau, double tau, double t_end,
                   const PathView& path, const ProblemSpec& spec,
                   int record_stride) {
  PathwiseSolver solver(spec, path);
  return solver.solve(v_tau, tau, t_end, record_stride);
}

Field cocycle_phi(double t, double tau, const PathView& omega,
                  const Field& u_tau, const ProblemSpec& spec) {
  if (t < 0.0) throw std::invalid_argument("cocycle time must be >= 0");
  if (t == 0.0) return u_tau;
  const PathView w = omega.shifted(-tau);
  const double z_tau = conj_factor(w, tau, spec.alpha);
  PathwiseSolver solver(spec, w);
  Field v = solver.integrate(scale(u_tau, z_tau), tau, tau + t);
  const double z_end = conj_factor(w, tau + t, spec.alpha);
  return scale(v, 1.0 / z_end);
}

ComparisonReport comparison_check(const Field& v1_tau, const Field& v2_tau,
                                  double tau, double t_end,
                                  const PathView& path, const ProblemSpec& spec,
                                  int record_stride) {
  ComparisonReport rep;
  rep.max_violation = max_exceedance(v1_tau, v2_tau);
  rep.at_t = tau;
  rep.times.push_back(tau);
  rep.violations.push_back(rep.max_violation);

  PathwiseSolver s1(spec, path);
  PathwiseSolver s2(spec, path);
  Field a = v1_tau;
  Field b = v2_tau;
  const std::int64_t k0 = path.node_of(tau);
  const std::int64_t k1 = path.node_of(t_end);
  std::int64_t steps = 0;
  for (std::int64_t k = k0; k < k1; ++k) {
    const double t = static_cast<double>(k) * spec.dt;
    a = s1.step(a, t);
    b = s2.step(b, t);
    ++steps;
    if (steps % record_stride == 0 || k + 1 == k1) {
      const double viol = max_exceedance(a, b);
      rep.times.push_back(t + spec.dt);
      rep.violations.push_back(viol);
      if (viol > rep.max_violation) {
        rep.max_violation = viol;
        rep.at_t = t + spec.dt;
      }
    }
  }
  return rep;
}

SmoothingReport smoothing_check(const Trajectory& traj) {
  SmoothingReport rep;
  if (traj.samples.empty()) return rep;
  const Field& f = traj.samples.back().v;
  rep.final_profile.reserve(static_cast<std::size_t>(f.n_modes()));
  for (int n = 1; n <= f.n_modes(); ++n) {
    const double a = std::abs(f.coeff(n));
    rep.final_profile.push_back(a);
    if (a > 1e-10) rep.last_mode_above = n;
  }
  // Least-squares slope of ln|a_n| over the resolved range.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int n = 1; n <= f.n_modes(); ++n) {
    const double a = rep.final_profile[static_cast<std::size_t>(n - 1)];
    if (a < 1e-14) continue;
    const double x = n, y = std::log(a);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  if (cnt >= 3) {
    rep.log_slope = (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx);
    rep.geometric_decay = rep.log_slope <= -0.05;
  }
  return rep;
}

}  // namespace spde
