#pragma once

#include <stdexcept>
#include <vector>

#include "spde/field.hpp"
#include "spde/problem.hpp"
#include "spde/solver.hpp"
#include "spde/wiener.hpp"

namespace spde {

/// Raised when the requested truncation horizon S leaves a tail above the
/// tolerance; carries an estimate of the horizon that would suffice.
class TruncationError : public std::runtime_error {
 public:
  TruncationError(double tail, double required_S, std::string what)
      : std::runtime_error(std::move(what)), tail_(tail), required_S_(required_S) {}
  double tail_bound() const { return tail_; }
  double required_S() const { return required_S_; }

 private:
  double tail_;
  double required_S_;
};

/// Request for the pullback integral of the damped linear problem
///   dv/dt - Lap v - beta v = z(t, omega) (h(t,x) + |g(t,x)|).
struct XiRequest {
  double tau = 0.0;
  PathView path;          // must cover [-S, 0] in view time
  const ProblemSpec* spec = nullptr;
  double S = 30.0;        // truncation horizon (integral over [-S, 0])
  double dq = 0.0;        // quadrature step; 0 means spec->dt
  double tolerance = 1e-6;

  explicit XiRequest(PathView p) : path(p) {}
};

/// The computed quasi-solution value at (tau, omega), with the truncation
/// bound actually achieved.
struct XiValue {
  Field field;
  double tail_bound = 0.0;
  double tau = 0.0;
  double S = 0.0;
  double min_value = 0.0;  // min over the oversampled grid (>= -eps)
  PathDescriptor path;
};

/// Per-mode midpoint quadrature of
///   a_n(xi) = int_{-S}^0 exp((n^2-beta)s) z(s, omega) c_n(h^tau + |g^tau|) ds,
/// where c_n(.) is the sine coefficient of the pointwise field h + |g|
/// evaluated on the oversampled grid. Throws TruncationError when the
/// delta-decay tail bound exceeds the tolerance.
XiValue xi(const XiRequest& req);

/// Truncation horizon that brings the delta-decay tail bound below tol.
double required_truncation(const ProblemSpec& spec, double tol);

/// Linear problem as a ProblemSpec: reaction beta*s, forcing h + |g|
/// (pointwise), so the generic solver integrates the damped linear equation.
ProblemSpec linear_problem(const ProblemSpec& spec);

/// Integrate the linear problem from xi(tau, omega) over [tau, tau+t] along
/// the translated path omega^{-tau} and return the sup-norm distance to
/// xi(tau+t, omega^t). Small residual certifies the quasi-solution property.
double verify_quasi_solution(const XiValue& value, double t,
                             const PathView& omega, const ProblemSpec& spec);

struct DecayFit {
  std::vector<double> ts;
  std::vector<double> errors;  // sup-norm distance to xi(tau, omega)
  double fitted_rate = 0.0;    // least-squares exponential rate
};

/// Pullback deviation ||v(tau, tau-t, omega^{-tau}, v_init) - xi(tau,omega)||
/// for a ladder of horizons t, with the fitted exponential rate. The rate
/// contract is >= 0.9*(lambda_1 - beta).
DecayFit verify_decay(const Field& v_init, double tau,
                      std::span<const double> t_ladder, const PathView& omega,
                      const ProblemSpec& spec, double S, double tol = 1e-6);

}  // namespace spde
