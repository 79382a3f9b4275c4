#pragma once

#include <memory>
#include <span>
#include <vector>

namespace spde {

/// A function on (0, pi) with homogeneous Dirichlet values, stored as
/// coefficients a_n of the sine basis e_n = sin(n x), n = 1..N. Fields are
/// immutable values; every operation below is pure.
class Field {
 public:
  Field() = default;
  explicit Field(int n_modes) : coeffs_(static_cast<std::size_t>(n_modes), 0.0) {}
  static Field from_coeffs(std::vector<double> coeffs) {
    Field f;
    f.coeffs_ = std::move(coeffs);
    return f;
  }

  int n_modes() const { return static_cast<int>(coeffs_.size()); }
  double coeff(int n) const { return coeffs_.at(static_cast<std::size_t>(n - 1)); }
  std::span<const double> coeffs() const { return coeffs_; }
  std::vector<double>& mutable_coeffs() { return coeffs_; }

 private:
  std::vector<double> coeffs_;  // coeffs_[n-1] multiplies sin(n x)
};

/// Values on the interior grid x_j = j*pi/(n_points+1), j = 1..n_points.
struct GridSample {
  int n_points = 0;
  std::vector<double> values;
};

/// Precomputed sin(n x_j) table shared between transforms of the same shape.
class SineTable {
 public:
  static std::shared_ptr<const SineTable> get(int n_modes, int n_points);

  int n_modes() const { return n_modes_; }
  int n_points() const { return n_points_; }
  std::span<const double> row(int j) const {  // j = 0..n_points-1
    return {table_.data() + static_cast<std::size_t>(j) * n_modes_,
            static_cast<std::size_t>(n_modes_)};
  }
  std::span<const double> nodes() const { return nodes_; }  // x_j

  void synthesize(std::span<const double> coeffs, std::span<double> grid) const;
  void analyze(std::span<const double> grid, std::span<double> coeffs) const;

 private:
  SineTable(int n_modes, int n_points);
  int n_modes_;
  int n_points_;
  std::vector<double> table_;  // [j * n_modes + (n-1)]
  std::vector<double> nodes_;
};

/// Eigenvalue n^2 of the negative Laplacian on (0, pi) with Dirichlet
/// conditions. Throws std::invalid_argument for n < 1.
double eigenvalue(int n);

/// Forward discrete sine transform: evaluate f on the interior grid.
GridSample to_grid(const Field& f, int n_points);

/// Inverse transform; exact left-inverse of to_grid when n_points >= n_modes.
/// Throws std::invalid_argument when n_modes > n_points.
Field from_grid(const GridSample& g, int n_modes);

/// Apply exp(-A t) with A = -Laplacian - beta*I: a_n -> exp(-(n^2-beta)t) a_n.
/// Throws std::invalid_argument for t < 0.
Field apply_semigroup(const Field& f, double t, double beta);

/// Oversampling factor used for sup-norm estimation and nonlinearity
/// evaluation (grid of 4N points for an N-mode field).
inline int oversampled_points(int n_modes) { return 4 * n_modes; }

/// max |f(x_j)| on the 4x-oversampled grid; a lower bound of the true
/// sup-norm with spectral-accuracy error (budget 1e-6 absolute).
double sup_norm(const Field& f);

/// sqrt((pi/2) * sum a_n^2), the L2(0,pi) norm by orthogonality.
double l2_norm(const Field& f);

/// true iff f(x_j) <= g(x_j) + tol on the oversampled grid. Requires equal
/// n_modes.
bool pointwise_leq(const Field& f, const Field& g, double tol);

/// max over the oversampled grid of f(x_j) - g(x_j) (positive means f pokes
/// above g somewhere).
double max_exceedance(const Field& f, const Field& g);

// Coefficient-space arithmetic helpers (same n_modes required).
Field add(const Field& a, const Field& b);
Field sub(const Field& a, const Field& b);
Field scale(const Field& a, double c);

/// Field with the single coefficient a_n = amplitude.
Field single_mode(int n_modes, int n, double amplitude);

}  // namespace spde
