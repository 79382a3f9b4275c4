#include "spde/problem.hpp"

#include <cmath>
#include <numbers>

namespace spde {

Forcing zero_forcing(double delta) {
  Forcing f;
  f.g = [](double, double) { return 0.0; };
  f.delta = delta;
  f.g_sup = 0.0;
  f.is_zero = true;
  f.time_constant = true;
  return f;
}

void validate_nonlinearity(const Nonlinearity& nl,
                           std::span<const double> t_samples, double s_lo,
                           double s_hi, int s_samples) {
  const double pi = std::numbers::pi;
  const int nx = 8;
  for (double t : t_samples) {
    for (int ix = 1; ix <= nx; ++ix) {
      const double x = ix * pi / (nx + 1);
      if (std::abs(nl.eval(t, x, 0.0)) > 1e-12)
        throw std::invalid_argument("nonlinearity must vanish at s = 0");
      for (int is = 0; is < s_samples; ++is) {
        const double s = s_lo + (s_hi - s_lo) * is / (s_samples - 1);
        const double fs = nl.eval(t, x, s) * s;
        const double bound = nl.beta * s * s + nl.h(t, x) * std::abs(s);
        if (fs > bound + 1e-9 * std::max(1.0, std::abs(bound)))
          throw std::invalid_argument(
              "dissipativity inequality f(t,x,s)s <= beta s^2 + h|s| violated");
      }
      if (nl.lipschitz) {
        const double L = nl.lipschitz(t, t, s_lo, s_hi);
        for (int is = 0; is + 1 < s_samples; ++is) {
          const double s1 = s_lo + (s_hi - s_lo) * is / (s_samples - 1);
          const double s2 = s_lo + (s_hi - s_lo) * (is + 1) / (s_samples - 1);
          const double df = std::abs(nl.eval(t, x, s1) - nl.eval(t, x, s2));
          if (df > L * std::abs(s1 - s2) + 1e-9)
            throw std::invalid_argument("declared Lipschitz bound violated");
        }
      }
    }
  }
}

double forcing_tail(const Nonlinearity& nl, const Forcing& forcing, double S) {
  // e^{delta s} (sup h + sup |g|) integrated over s < -S for uniformly
  // bounded data.
  const double bound = nl.h_sup + forcing.g_sup;
  return bound * std::exp(-forcing.delta * S) / forcing.delta;
}

}  // namespace spde
