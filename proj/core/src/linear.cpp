#include "spde/linear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace spde {

namespace {

// Measured sup-norm semigroup constant bound used in tail estimates
// (flat-profile data realizes 4/pi asymptotically).
constexpr double kSemigroupSup = 4.0 / std::numbers::pi;

}  // namespace

ProblemSpec linear_problem(const ProblemSpec& spec) {
  ProblemSpec lp = spec;
  const double beta = spec.nl.beta;
  Nonlinearity nl;
  nl.eval = [beta](double, double, double s) { return beta * s; };
  nl.eval_grid = [beta](double, std::span<const double>,
                        std::span<const double> ss, std::span<double> out) {
    for (std::size_t i = 0; i < ss.size(); ++i) out[i] = beta * ss[i];
  };
  nl.lipschitz = [beta](double, double, double, double) { return beta; };
  nl.beta = beta;
  nl.h = [](double, double) { return 0.0; };
  nl.h_sup = 0.0;
  nl.is_zero = (beta == 0.0);
  lp.nl = nl;

  const auto h = spec.nl.h;
  const auto g = spec.forcing.g;
  Forcing phi;
  phi.g = [h, g](double t, double x) { return h(t, x) + std::abs(g(t, x)); };
  phi.delta = spec.forcing.delta;
  phi.g_sup = spec.nl.h_sup + spec.forcing.g_sup;
  phi.is_zero = (phi.g_sup == 0.0);
  phi.time_constant = spec.nl.h_time_constant && spec.forcing.time_constant;
  lp.forcing = phi;
  return lp;
}

double required_truncation(const ProblemSpec& spec, double tol) {
  const double beta = spec.nl.beta;
  const double delta = spec.forcing.delta;
  const double bound = spec.nl.h_sup + spec.forcing.g_sup;
  if (bound <= 0.0) return 1.0;
  const double rate = 1.0 - beta;  // lambda_1 - beta
  const double S0 =
      std::max(5.0, std::log(kSemigroupSup * bound / (delta * tol)) / rate);
  // The measured tail factor pays for the conjugation growth exp(alpha
  // |omega(s)|) ~ exp(alpha sqrt(|s|)); budget three standard deviations.
  const double noise_margin = 3.0 * spec.alpha * std::sqrt(S0 + 30.0) / rate;
  return 1.15 * S0 + noise_margin;
}

XiValue xi(const XiRequest& req) {
  if (req.spec == nullptr) throw std::invalid_argument("XiRequest needs a spec");
  const ProblemSpec& spec = *req.spec;
  const int n = spec.n_modes;
  const int m = oversampled_points(n);
  const double beta = spec.nl.beta;
  const double delta = spec.forcing.delta;
  const double alpha = spec.alpha;
  const double dq = req.dq > 0.0 ? req.dq : spec.dt;

  const double dtp = req.path.dt();
  const double ratio = dq / dtp;
  const std::int64_t stride = static_cast<std::int64_t>(std::nearbyint(ratio));
  if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9)
    throw std::invalid_argument("dq must be a positive multiple of the path step");

  const std::int64_t nq =
      static_cast<std::int64_t>(std::ceil(req.S / dq - 1e-9));
  const double S_used = static_cast<double>(nq) * dq;
  if (!req.path.covers(-S_used, 0.0))
    throw std::invalid_argument(
        "path does not cover the truncated integral domain [-S, 0]");

  const double phi_sup = spec.nl.h_sup + spec.forcing.g_sup;

  XiValue out;
  out.tau = req.tau;
  out.S = S_used;
  out.path = req.path.descriptor();

  std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
  if (phi_sup > 0.0) {
    auto table = SineTable::get(n, m);
    const auto xs = table->nodes();
    std::vector<double> grid(static_cast<std::size_t>(m), 0.0);
    std::vector<double> cn(static_cast<std::size_t>(n), 0.0);
    const auto& h = spec.nl.h;
    const auto& g = spec.forcing.g;
    const bool frozen = spec.nl.h_time_constant && spec.forcing.time_constant;
    if (frozen) {
      for (int j = 0; j < m; ++j)
        grid[static_cast<std::size_t>(j)] =
            h(req.tau, xs[static_cast<std::size_t>(j)]) +
            std::abs(g(req.tau, xs[static_cast<std::size_t>(j)]));
      table->analyze(grid, cn);
    }
    for (std::int64_t i = 0; i < nq; ++i) {
      const std::int64_t node_l = (i - nq) * stride;
      const double s_mid = (static_cast<double>(i - nq) + 0.5) * dq;
      const double w_mid = 0.5 * (req.path.value_at_node(node_l) +
                                  req.path.value_at_node(node_l + stride));
      const double expo = alpha * w_mid;
      if (std::abs(expo) > 700.0)
        throw std::domain_error("conjugation exponent overflows in quadrature");
      const double z_mid = std::exp(-expo);
      if (!frozen) {
        const double ts = req.tau + s_mid;
        for (int j = 0; j < m; ++j)
          grid[static_cast<std::size_t>(j)] =
              h(ts, xs[static_cast<std::size_t>(j)]) +
              std::abs(g(ts, xs[static_cast<std::size_t>(j)]));
        table->analyze(grid, cn);
      }
      for (int k = 1; k <= n; ++k) {
        const double w = std::exp((eigenvalue(k) - beta) * s_mid) * z_mid * dq;
        acc[static_cast<std::size_t>(k - 1)] += w * cn[static_cast<std::size_t>(k - 1)];
      }
    }

    // Tail bound from the delta-decay hypothesis, with the conjugation
    // growth measured on the covered part of the tail.
    double log_wz = -1e300;
    const std::int64_t node_S = -nq * stride;
    for (std::int64_t k = req.path.node_min(); k <= node_S; k += stride) {
      const double s = static_cast<double>(k) * dtp;
      const double lt = -alpha * req.path.value_at_node(k) +
                        (1.0 - beta - delta) * s;
      log_wz = std::max(log_wz, lt);
    }
    if (log_wz == -1e300) {
      const double s = static_cast<double>(node_S) * dtp;
      log_wz = -alpha * req.path.value_at_node(node_S) + (1.0 - beta - delta) * s;
    }
    out.tail_bound = kSemigroupSup * std::exp(log_wz) * phi_sup *
                     std::exp(-delta * S_used) / delta;
    if (out.tail_bound > req.tolerance) {
      const double S_req = required_truncation(spec, req.tolerance);
      std::ostringstream os;
      os << "truncation horizon S = " << S_used << " leaves tail bound "
         << out.tail_bound << " > " << req.tolerance << "; S of about "
         << S_req << " should suffice";
      throw TruncationError(out.tail_bound, S_req, os.str());
    }
  }

  out.field = Field::from_coeffs(std::move(acc));
  if (phi_sup > 0.0) {
    const GridSample gs = to_grid(out.field, m);
    out.min_value = *std::min_element(gs.values.begin(), gs.values.end());
  }
  return out;
}

double verify_quasi_solution(const XiValue& value, double t,
                             const PathView& omega, const ProblemSpec& spec) {
  if (!(t > 0.0)) throw std::invalid_argument("horizon must be positive");
  const ProblemSpec lp = linear_problem(spec);
  const double tau = value.tau;

  PathwiseSolver solver(lp, omega.translated(-tau));
  const Field lhs = solver.integrate(value.field, tau, tau + t);

  XiRequest rhs_req(omega.translated(t));
  rhs_req.tau = tau + t;
  rhs_req.spec = &spec;
  rhs_req.S = value.S;
  rhs_req.tolerance = 1e-5;
  const XiValue rhs = xi(rhs_req);

  return sup_norm(sub(lhs, rhs.field));
}

DecayFit verify_decay(const Field& v_init, double tau,
                      std::span<const double> t_ladder, const PathView& omega,
                      const ProblemSpec& spec, double S, double tol) {
  const ProblemSpec lp = linear_problem(spec);
  XiRequest req(omega);
  req.tau = tau;
  req.spec = &spec;
  req.S = S;
  req.tolerance = tol;
  const XiValue target = xi(req);

  DecayFit fit;
  for (double t : t_ladder) {
    PathwiseSolver solver(lp, omega.translated(-tau));
    const Field end = solver.integrate(v_init, tau - t, tau);
    fit.ts.push_back(t);
    fit.errors.push_back(sup_norm(sub(end, target.field)));
  }

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (std::size_t i = 0; i < fit.ts.size(); ++i) {
    if (fit.errors[i] < 1e-13) continue;
    const double x = fit.ts[i];
    const double y = std::log(fit.errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++cnt;
  }
  fit.fitted_rate = cnt >= 2 ? -(cnt * sxy - sx * sy) / (cnt * sxx - sx * sx)
                             : std::numeric_limits<double>::infinity();
  return fit;
}

}  // namespace spde
