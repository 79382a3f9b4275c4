#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "spde/field.hpp"
#include "spde/linear.hpp"
#include "spde/problem.hpp"
#include "spde/wiener.hpp"

namespace spde {

/// A tempered family of sets, represented by its sup-norm radius along the
/// pullback parametrization and a representative sampler.
struct TemperedFamily {
  /// rho(tau + r, r): radius of the member at anchor time tau+r under the
  /// r-shifted fiber.
  std::function<double(double tau, double r)> radius;
  /// k-th representative element of the member at (tau + r, r).
  std::function<Field(double tau, double r, std::uint64_t k)> sample;
};

struct TemperedProbe {
  std::vector<double> cs;
  std::vector<double> rs;
  // probe[c][r] = e^{c r} * rho(tau + r, r)
  std::vector<std::vector<double>> values;
  bool decreasing = false;  // every row decreases along the r ladder
};

/// Finite shadow of the temperedness quantifier: c in {0.1, 1, 10},
/// r in {-10, -20, -40}.
TemperedProbe probe_tempered(const TemperedFamily& family, double tau);

/// Measured semigroup constant: sup over probe fields f and times t of
///   ||exp(-A t) f||_sup * exp((lambda_1 - beta) t) / ||f||_sup
/// on the discretized operator (1 for a single sine mode; about 4/pi for
/// flat-profile data).
double calibrate_semigroup_constant(int n_modes, double beta);

struct AbsorbingRadius {
  double tau = 0.0;
  PathDescriptor path;
  double R = 0.0;
  double M_used = 0.0;
  double integral_value = 0.0;  // the pullback integral (nonnegative)
};

/// Pullback absorbing radius
///   R(tau,omega) = M + M z^{-1}(tau, theta_{-tau} omega) *
///     int_{-inf}^{tau} e^{(lambda-beta)(s-tau)} z(s, theta_{-tau} omega)
///       (sup_x h(s) + sup_x |g(s)|) ds,
/// truncated at tau - S with the same quadrature as xi.
AbsorbingRadius absorbing_radius(double tau, const PathView& omega,
                                 const ProblemSpec& spec, double M_used,
                                 double S, double tol = 1e-6);

class MonotonicityError : public std::runtime_error {
 public:
  MonotonicityError(double violation, std::string what)
      : std::runtime_error(std::move(what)), violation_(violation) {}
  double violation() const { return violation_; }

 private:
  double violation_;
};

struct ExtremalOptions {
  std::vector<double> ladder{5, 10, 20, 40};
  double tol = 1e-4;        // sup-norm rung-difference target
  double ladder_cap = 160;  // extend by doubling up to this horizon
  double xi_tol = 1e-6;     // truncation tolerance for the rung anchors
  double mono_tol = -1;     // <0 means 10 * solver_tolerance(spec)
  int hits_required = 1;    // consecutive sub-tol rung deltas to converge
  // >= 0: declare convergence once a rung's sup-norm falls below this value
  // (valid when the limit is known to be sandwiched between zero and the
  // rung, as for odd-symmetric reactions).
  double floor_stop = -1;
};

struct ExtremalResult {
  int sign = +1;  // +1 builds the maximal element, -1 the minimal
  double tau = 0.0;
  PathDescriptor path;
  Field field;  // final rung
  std::vector<double> ladder;
  std::vector<double> rung_deltas;          // sup-norm of successive rungs
  double monotonicity_max_violation = 0.0;  // worst overshoot across rungs
  double xi_bound_defect = 0.0;  // max of (|u_rung| - xi(tau,omega))_+
  bool converged = false;
};

/// Monotone pullback construction of the extremal quasi-solutions: rung k
/// evolves sign * xi(tau - t_k, theta_{-t_k} omega) through the cocycle to
/// time tau. Rungs must be pointwise monotone (decreasing for +, increasing
/// for -); a violation beyond mono_tol is a hard MonotonicityError. The run
/// converges when the final rung difference drops below tol; otherwise the
/// ladder doubles until ladder_cap and the result is flagged unconverged.
ExtremalResult extremal(int sign, double tau, const PathView& omega,
                        const ProblemSpec& spec, const ExtremalOptions& opts = {});

/// ||Phi(t, tau, omega, u*(tau,omega)) - u*(tau+t, theta_t omega)||_sup,
/// re-deriving the far end with the same options.
double quasi_solution_residual(const ExtremalResult& result, double t,
                               const PathView& omega, const ProblemSpec& spec,
                               const ExtremalOptions& opts = {});

struct StabilityReport {
  std::vector<double> ts;
  std::vector<double> distances;      // to u*(tau, omega)
  double sandwich_defect = 0.0;       // max of (u* - Phi(...))_+ over runs
  bool decreasing = false;
  double final_distance = 0.0;
};

/// Asymptotic stability from above: start at u*(tau-t, theta_{-t} omega) +
/// offset (offset >= 0) and measure pullback distances to u*(tau, omega)
/// along the ladder. Mirrored for the minimal element when sign = -1 and
/// offset <= 0.
StabilityReport stability_from_above(const Field& offset, double tau,
                                     const PathView& omega,
                                     const ProblemSpec& spec,
                                     const ExtremalOptions& opts = {},
                                     int sign = +1);

/// The computable envelope of the attractor: the pair (u_*, u*). Throws if
/// either extremal computation failed to converge.
std::pair<Field, Field> attractor_interval(double tau, const PathView& omega,
                                           const ProblemSpec& spec,
                                           const ExtremalOptions& opts = {});

/// ||u*(tau+T, omega) - u*(tau, omega)||_sup for T-periodic coefficients.
double periodicity_check(double tau, double T, const PathView& omega,
                         const ProblemSpec& spec,
                         const ExtremalOptions& opts = {}, int sign = +1);

}  // namespace spde
