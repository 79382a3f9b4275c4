#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spde {

/// Provenance of a path or path view, carried into run manifests.
struct PathDescriptor {
  std::uint64_t seed = 0;
  int level = 0;          // number of bridge refinements applied
  bool zero = false;      // deterministic all-zero path
  bool imported = false;  // reconstructed from samples, seed unknown
  double dt = 0.0;
  double time_shift = 0.0;   // view time offset relative to the base path
  double value_shift = 0.0;  // constant subtracted from base values
};

/// A two-sided Wiener trajectory sampled on the uniform grid t_k = k*dt,
/// k in [node_min, node_max], with node 0 pinned to omega(0) = 0.
///
/// Positive-time and negative-time increments come from two independent
/// streams derived from the master seed, so extending one side of the
/// domain never changes samples on the other. Paths are immutable after
/// construction and safe to share read-only across threads.
class WienerPath {
 public:
  /// Draw a fresh path. Requires t_min < 0 < t_max, dt > 0, and both
  /// bounds integer multiples of dt.
  static WienerPath sample(std::uint64_t seed, double t_min, double t_max,
                           double dt);

  /// The deterministic member omega == 0 (used by exact oracles).
  static WienerPath zero(double t_min, double t_max, double dt);

  /// Rebuild a path from raw samples (CSV import). values[k] is the sample
  /// at t_min + k*dt; the node at t = 0 must exist and hold exactly 0.
  static WienerPath from_samples(double t_min, double dt,
                                 std::vector<double> values);

  /// Insert factor-1 intermediate nodes per interval by Brownian-bridge
  /// sampling keyed to (seed, level+1). Existing nodes are preserved
  /// bit-exactly; the zero path refines to a finer zero path.
  WienerPath refined(int factor) const;

  double dt() const { return dt_; }
  double t_min() const { return static_cast<double>(k_min_) * dt_; }
  double t_max() const { return static_cast<double>(k_max_) * dt_; }
  std::int64_t node_min() const { return k_min_; }
  std::int64_t node_max() const { return k_max_; }

  /// Sample at grid node k (time k*dt). Throws std::out_of_range outside
  /// [node_min, node_max].
  double value_at_node(std::int64_t k) const;

  /// Sample at time t: exact on grid nodes, linear interpolation between
  /// them (interpolation exists for plotting and diagnostics only; solvers
  /// query nodes).
  double value(double t) const;

  /// Grid node index of an aligned time; throws std::invalid_argument if t
  /// is not aligned to the grid or lies outside the domain.
  std::int64_t node_of(double t) const;

  bool covers(double a, double b) const;

  std::span<const double> samples() const { return values_; }
  std::uint64_t seed() const { return seed_; }
  int level() const { return level_; }
  bool is_zero() const { return zero_; }
  bool is_imported() const { return imported_; }

 private:
  WienerPath() = default;

  double dt_ = 0.0;
  std::int64_t k_min_ = 0;
  std::int64_t k_max_ = 0;
  std::uint64_t seed_ = 0;
  int level_ = 0;
  bool zero_ = false;
  bool imported_ = false;
  std::vector<double> values_;  // values_[k - k_min]
};

/// Grid-aligned affine view of a base path:
///   value(t) = base(t + time_shift) - value_shift.
/// Composing the shift group and plain translations folds into a single
/// (node_shift, value_shift) pair, so views stay O(1). The view borrows the
/// base path; keep the WienerPath alive while views of it exist.
class PathView {
 public:
  explicit PathView(const WienerPath& base) : base_(&base) {}

  /// Shift-group action theta_s: t -> base(t+s) - base(s). s must be
  /// grid-aligned.
  PathView shifted(double s) const;

  /// Plain translation omega^s: t -> base(t+s) - value_shift (no
  /// re-anchoring at zero). s must be grid-aligned.
  PathView translated(double s) const;

  double dt() const;
  double t_min() const;
  double t_max() const;
  std::int64_t node_min() const;
  std::int64_t node_max() const;

  double value_at_node(std::int64_t k) const;
  double value(double t) const;
  std::int64_t node_of(double t) const;
  bool covers(double a, double b) const;

  const WienerPath& base() const { return *base_; }
  PathDescriptor descriptor() const;

 private:
  const WienerPath* base_;
  std::int64_t node_shift_ = 0;
  double value_shift_ = 0.0;
};

/// theta_s acting on a view (group law composes exactly on grid nodes).
PathView shift(const PathView& w, double s);
inline PathView shift(const WienerPath& p, double s) {
  return PathView(p).shifted(s);
}

/// Plain translation omega^s.
PathView translate(const PathView& w, double s);

/// Conjugation factor z(t, omega) = exp(-alpha * omega(t)). Strictly
/// positive; throws std::domain_error if |alpha*omega(t)| would overflow.
double conj_factor(const PathView& w, double t, double alpha);
inline double conj_factor(const WienerPath& p, double t, double alpha) {
  return conj_factor(PathView(p), t, alpha);
}

struct SublinearityReport {
  double t_half = 0.0;      // |t_min|/2, the cutoff used
  double max_abs_ratio = 0.0;  // max |omega(t)/t| over nodes with |t| >= t_half
  double arg_t = 0.0;          // where the max is attained
};

/// Soft diagnostic for omega(t)/t -> 0; never asserted, only reported.
SublinearityReport sublinearity_report(const WienerPath& p);

}  // namespace spde
