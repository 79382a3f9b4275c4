#pragma once

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "spde/field.hpp"
#include "spde/problem.hpp"
#include "spde/wiener.hpp"

namespace spde {

/// Raised when the blow-up guard trips. Global existence holds for valid
/// problem data, so a trip indicates a configuration error (dt too large or
/// a wrong dissipativity declaration).
class BlowupError : public std::runtime_error {
 public:
  BlowupError(double t, double norm, std::string what)
      : std::runtime_error(std::move(what)), t_(t), norm_(norm) {}
  double t() const { return t_; }
  double sup_norm() const { return norm_; }

 private:
  double t_;
  double norm_;
};

/// Raised when |alpha * omega(t)| exceeds the floating-point range of the
/// conjugation factor.
class PathRangeError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TrajectorySample {
  double t;
  Field v;
};

/// Time-indexed states of the transformed variable v, with provenance.
struct Trajectory {
  double tau = 0.0;
  double dt = 0.0;         // solver step
  double record_dt = 0.0;  // spacing of stored samples
  PathDescriptor path;
  std::string scheme;
  std::vector<TrajectorySample> samples;
  double max_sup_norm = 0.0;  // over recorded samples
  bool guard_tripped = false;
};

/// Pathwise integrator for the conjugated equation
///   dv/dt - Lap v = z(t) f(t, x, z^{-1}(t) v) + z(t) g(t, x),
/// z(t) = exp(-alpha omega(t)), by exponential midpoint stepping: the
/// Laplacian is applied exactly in coefficient space, the right-hand side
/// is evaluated at the interval midpoint on the 4x-oversampled grid with
/// the midpoint conjugation factor taken as the geometric mean of the two
/// node values (so only grid nodes of omega are ever queried).
///
/// One solver instance integrates sequentially and owns scratch buffers;
/// run distinct trajectories on distinct instances when parallelizing.
class PathwiseSolver {
 public:
  PathwiseSolver(const ProblemSpec& spec, PathView path);

  const ProblemSpec& spec() const { return spec_; }
  const PathView& path() const { return path_; }

  /// One step of size spec.dt from grid-aligned time t.
  Field step(const Field& v, double t);

  /// Integrate v from tau to t_end; on_step(t, v) fires after every step.
  Field integrate(Field v, double tau, double t_end,
                  const std::function<void(double, const Field&)>& on_step = {});

  /// Integrate and record every record_stride-th state (plus the final one).
  Trajectory solve(const Field& v_tau, double tau, double t_end,
                   int record_stride = 1);

 private:
  void step_in_place(std::vector<double>& v, std::int64_t node);
  void eval_rhs(double t, double z, std::span<const double> state,
                std::span<double> out);

  ProblemSpec spec_;
  PathView path_;
  std::shared_ptr<const SineTable> table_;
  std::vector<double> e_full_;   // exp(-n^2 dt)
  std::vector<double> e_half_;   // exp(-n^2 dt/2)
  std::vector<double> grid_v_;   // scratch: conjugated state on the grid
  std::vector<double> grid_u_;   // scratch: physical state on the grid
  std::vector<double> grid_f_;   // scratch: reaction+forcing on the grid
  std::vector<double> coef_;     // scratch: transformed right-hand side
};

/// One exponential-midpoint step (convenience wrapper over PathwiseSolver).
Field step_v(const Field& v, double t, double dt, const PathView& path,
             const ProblemSpec& spec);

/// Repeated stepping with blow-up guard; throws BlowupError on a guard trip.
Trajectory solve_v(const Field& v_tau, double tau, double t_end,
                   const PathView& path, const ProblemSpec& spec,
                   int record_stride = 1);

/// Cocycle of the original equation via conjugation:
///   Phi(t, tau, omega, u_tau) = z^{-1}(t+tau, theta_{-tau} omega) *
///       v(t+tau, tau, theta_{-tau} omega, z(tau, theta_{-tau} omega) u_tau).
/// t = 0 returns u_tau unchanged.
Field cocycle_phi(double t, double tau, const PathView& omega,
                  const Field& u_tau, const ProblemSpec& spec);

struct ComparisonReport {
  double max_violation = 0.0;  // max over recorded times of max(v1 - v2)
  double at_t = 0.0;
  std::vector<double> times;
  std::vector<double> violations;
};

/// Integrate two ordered initial states under the same problem data and
/// measure how far order preservation is violated at recorded times.
/// Violations are data in the report, never exceptions.
ComparisonReport comparison_check(const Field& v1_tau, const Field& v2_tau,
                                  double tau, double t_end,
                                  const PathView& path, const ProblemSpec& spec,
                                  int record_stride = 100);

struct SmoothingReport {
  std::vector<double> final_profile;  // |a_n| at the final recorded time
  int last_mode_above = 0;            // largest n with |a_n| > 1e-10
  double log_slope = 0.0;             // least-squares slope of ln|a_n| vs n
  bool geometric_decay = false;       // slope <= -0.05 over the fitted range
};

/// Spectral decay profile at the end of a trajectory; analytic smoothing
/// shows up as (at least) geometric coefficient decay.
SmoothingReport smoothing_check(const Trajectory& traj);

}  // namespace spde
