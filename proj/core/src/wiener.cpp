#include "spde/wiener.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace spde {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Domain-separated stream seed: stream 0 = forward increments, 1 = backward,
// 2 = bridge refinement (level folds in so each refinement level is fresh).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream,
                          std::uint64_t level) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) ^ (level << 8));
}

std::int64_t aligned_index(double t, double dt, const char* what) {
  const double q = t / dt;
  const double r = std::nearbyint(q);
  if (std::abs(q - r) > 1e-9 * std::max(1.0, std::abs(q))) {
    throw std::invalid_argument(std::string(what) +
                                " is not aligned to the path grid");
  }
  return static_cast<std::int64_t>(r);
}

}  // namespace

WienerPath WienerPath::sample(std::uint64_t seed, double t_min, double t_max,
                              double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_min < 0.0 && 0.0 < t_max))
    throw std::invalid_argument("domain must satisfy t_min < 0 < t_max");
  const std::int64_t k_min = aligned_index(t_min, dt, "t_min");
  const std::int64_t k_max = aligned_index(t_max, dt, "t_max");

  WienerPath p;
  p.dt_ = dt;
  p.k_min_ = k_min;
  p.k_max_ = k_max;
  p.seed_ = seed;
  p.values_.assign(static_cast<std::size_t>(k_max - k_min + 1), 0.0);

  const std::size_t idx0 = static_cast<std::size_t>(-k_min);
  const double sd = std::sqrt(dt);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::mt19937_64 fwd(stream_seed(seed, 0, 0));
  double acc = 0.0;
  for (std::int64_t j = 1; j <= k_max; ++j) {
    acc += sd * gauss(fwd);
    p.values_[idx0 + static_cast<std::size_t>(j)] = acc;
  }

  std::mt19937_64 bwd(stream_seed(seed, 1, 0));
  acc = 0.0;
  for (std::int64_t j = 1; j <= -k_min; ++j) {
    acc -= sd * gauss(bwd);
    p.values_[idx0 - static_cast<std::size_t>(j)] = acc;
  }
  return p;
}

WienerPath WienerPath::zero(double t_min, double t_max, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (!(t_min < 0.0 && 0.0 < t_max))
    throw std::invalid_argument("domain must satisfy t_min < 0 < t_max");
  WienerPath p;
  p.dt_ = dt;
  p.k_min_ = aligned_index(t_min, dt, "t_min");
  p.k_max_ = aligned_index(t_max, dt, "t_max");
  p.zero_ = true;
  p.values_.assign(static_cast<std::size_t>(p.k_max_ - p.k_min_ + 1), 0.0);
  return p;
}

WienerPath WienerPath::from_samples(double t_min, double dt,
                                    std::vector<double> values) {
  if (!(dt > 0.0)) throw std::invalid_argument("dt must be positive");
  if (values.size() < 2) throw std::invalid_argument("need at least 2 samples");
  WienerPath p;
  p.dt_ = dt;
  p.k_min_ = aligned_index(t_min, dt, "t_min");
  p.k_max_ = p.k_min_ + static_cast<std::int64_t>(values.size()) - 1;
  if (p.k_min_ > 0 || p.k_max_ < 0)
    throw std::invalid_argument("samples must bracket t = 0");
  if (values[static_cast<std::size_t>(-p.k_min_)] != 0.0)
    throw std::invalid_argument("sample at t = 0 must be exactly 0");
  p.imported_ = true;
  p.values_ = std::move(values);
  return p;
}

WienerPath WienerPath::refined(int factor) const {
  if (factor < 2) throw std::invalid_argument("refine factor must be >= 2");
  WienerPath p;
  p.dt_ = dt_ / factor;
  p.k_min_ = k_min_ * factor;
  p.k_max_ = k_max_ * factor;
  p.seed_ = seed_;
  p.level_ = level_ + 1;
  p.zero_ = zero_;
  p.imported_ = imported_;
  p.values_.assign(static_cast<std::size_t>(p.k_max_ - p.k_min_ + 1), 0.0);

  const std::size_t n_coarse = values_.size();
  for (std::size_t i = 0; i < n_coarse; ++i)
    p.values_[i * static_cast<std::size_t>(factor)] = values_[i];
  if (zero_) return p;

  std::mt19937_64 rng(stream_seed(seed_, 2, static_cast<std::uint64_t>(level_) + 1));
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double h = p.dt_;
  for (std::size_t i = 0; i + 1 < n_coarse; ++i) {
    const double right = values_[i + 1];
    double prev = values_[i];
    for (int j = 1; j < factor; ++j) {
      // Bridge conditional given (prev at current node, right at the coarse
      // endpoint): remaining sub-intervals to the endpoint = factor - j + 1.
      const int remaining = factor - j + 1;
      const double mean = prev + (right - prev) / remaining;
      const double var = h * static_cast<double>(remaining - 1) / remaining;
      prev = mean + std::sqrt(var) * gauss(rng);
      p.values_[i * static_cast<std::size_t>(factor) +
                static_cast<std::size_t>(j)] = prev;
    }
  }
  return p;
}

double WienerPath::value_at_node(std::int64_t k) const {
  if (k < k_min_ || k > k_max_)
    throw std::out_of_range("path node outside sampled domain");
  return values_[static_cast<std::size_t>(k - k_min_)];
}

double WienerPath::value(double t) const {
  const double q = t / dt_;
  const double lo = static_cast<double>(k_min_);
  const double hi = static_cast<double>(k_max_);
  if (q < lo - 1e-9 || q > hi + 1e-9)
    throw std::out_of_range("time outside sampled path domain");
  const double r = std::nearbyint(q);
  if (std::abs(q - r) <= 1e-9 * std::max(1.0, std::abs(q)))
    return value_at_node(static_cast<std::int64_t>(r));
  const double fl = std::floor(q);
  const std::int64_t k0 = static_cast<std::int64_t>(fl);
  const double w = q - fl;
  return (1.0 - w) * value_at_node(k0) + w * value_at_node(k0 + 1);
}

std::int64_t WienerPath::node_of(double t) const {
  const std::int64_t k = aligned_index(t, dt_, "time");
  if (k < k_min_ || k > k_max_)
    throw std::out_of_range("time outside sampled path domain");
  return k;
}

bool WienerPath::covers(double a, double b) const {
  return a >= t_min() - 1e-9 * dt_ && b <= t_max() + 1e-9 * dt_;
}

PathView PathView::shifted(double s) const {
  const std::int64_t m = aligned_index(s, dt(), "shift offset");
  PathView v(*base_);
  v.node_shift_ = node_shift_ + m;
  v.value_shift_ = base_->value_at_node(node_shift_ + m);
  return v;
}

PathView PathView::translated(double s) const {
  const std::int64_t m = aligned_index(s, dt(), "translation offset");
  PathView v(*base_);
  v.node_shift_ = node_shift_ + m;
  v.value_shift_ = value_shift_;
  return v;
}

double PathView::dt() const { return base_->dt(); }

double PathView::t_min() const {
  return static_cast<double>(base_->node_min() - node_shift_) * dt();
}

double PathView::t_max() const {
  return static_cast<double>(base_->node_max() - node_shift_) * dt();
}

std::int64_t PathView::node_min() const { return base_->node_min() - node_shift_; }
std::int64_t PathView::node_max() const { return base_->node_max() - node_shift_; }

double PathView::value_at_node(std::int64_t k) const {
  return base_->value_at_node(k + node_shift_) - value_shift_;
}

double PathView::value(double t) const {
  return base_->value(t + static_cast<double>(node_shift_) * dt()) - value_shift_;
}

std::int64_t PathView::node_of(double t) const {
  const std::int64_t k = aligned_index(t, dt(), "time");
  if (k < node_min() || k > node_max())
    throw std::out_of_range("time outside view domain");
  return k;
}

bool PathView::covers(double a, double b) const {
  return a >= t_min() - 1e-9 * dt() && b <= t_max() + 1e-9 * dt();
}

PathDescriptor PathView::descriptor() const {
  PathDescriptor d;
  d.seed = base_->seed();
  d.level = base_->level();
  d.zero = base_->is_zero();
  d.imported = base_->is_imported();
  d.dt = dt();
  d.time_shift = static_cast<double>(node_shift_) * dt();
  d.value_shift = value_shift_;
  return d;
}

PathView shift(const PathView& w, double s) { return w.shifted(s); }
PathView translate(const PathView& w, double s) { return w.translated(s); }

double conj_factor(const PathView& w, double t, double alpha) {
  const double a = alpha * w.value(t);
  if (std::abs(a) > 700.0)
    throw std::domain_error("conjugation exponent overflows double range");
  return std::exp(-a);
}

SublinearityReport sublinearity_report(const WienerPath& p) {
  SublinearityReport rep;
  rep.t_half = std::abs(p.t_min()) / 2.0;
  for (std::int64_t k = p.node_min(); k <= p.node_max(); ++k) {
    const double t = static_cast<double>(k) * p.dt();
    if (std::abs(t) < rep.t_half || k == 0) continue;
    const double ratio = std::abs(p.value_at_node(k) / t);
    if (ratio > rep.max_abs_ratio) {
      rep.max_abs_ratio = ratio;
      rep.arg_t = t;
    }
  }
  return rep;
}

}  // namespace spde
