#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace spde {

/// Reaction term f(t, x, s) together with its declared analytic data:
/// a local Lipschitz bound and the dissipativity pair (beta, h) from
///   f(t,x,s)*s <= beta*s^2 + h(t,x)|s|,    f(t,x,0) = 0.
struct Nonlinearity {
  std::function<double(double t, double x, double s)> eval;

  /// Optional batch evaluator over a grid row (same contract as eval);
  /// used by the solver hot loop when present.
  std::function<void(double t, std::span<const double> xs,
                     std::span<const double> ss, std::span<double> out)>
      eval_grid;

  /// L such that |f(t,x,s1)-f(t,x,s2)| <= L|s1-s2| for t in [t0,t1],
  /// s1,s2 in [s0,s1].
  std::function<double(double t0, double t1, double s0, double s1)> lipschitz;

  double beta = 0.0;  // in (0, lambda_1) = (0, 1) on this domain
  std::function<double(double t, double x)> h;  // nonnegative
  double h_sup = 0.0;       // sup over (t,x) of h, for truncation bounds
  bool h_time_constant = true;
  bool is_zero = false;     // f == 0 (pure heat flow shortcut)
};

/// Deterministic forcing g(t, x) plus the decay data used to truncate
/// improper integrals over the past.
struct Forcing {
  std::function<double(double t, double x)> g;
  double delta = 0.25;   // 0 < delta < lambda_1 - beta
  double g_sup = 0.0;    // sup over (t,x) of |g|
  bool is_zero = true;
  bool time_constant = true;
};

Forcing zero_forcing(double delta);

/// Full problem data for the transformed pathwise equation.
struct ProblemSpec {
  double alpha = 1.0;  // noise intensity
  int n_modes = 64;
  double dt = 1e-3;
  double guard = 1e6;  // sup-norm blow-up guard
  Nonlinearity nl;
  Forcing forcing;
};

/// Discretization error budget at step size spec.dt; tolerance multipliers
/// in the verification contracts are expressed against this.
inline double solver_tolerance(const ProblemSpec& spec) { return 0.2 * spec.dt; }

/// Sampled validation of a Nonlinearity declaration: f(t,x,0) = 0, the
/// dissipativity inequality, and the Lipschitz bound, checked on grids of
/// (t, x, s) triples. Throws std::invalid_argument naming the violated
/// condition.
void validate_nonlinearity(const Nonlinearity& nl,
                           std::span<const double> t_samples,
                           double s_lo, double s_hi, int s_samples);

/// Numeric tail check of the delta-weighted integrability of h + |g|:
/// returns the tail integral of e^{delta s} (sup_x h + sup_x |g|) below -S.
double forcing_tail(const Nonlinearity& nl, const Forcing& forcing, double S);

}  // namespace spde
