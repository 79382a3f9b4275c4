#include "spde/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spde {

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const std::string& file) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot open " + file + " for writing");
  return os;
}

}  // namespace

void write_path_csv(const std::string& file, const WienerPath& p) {
  auto os = open_out(file);
  os << "t,omega\n";
  for (std::int64_t k = p.node_min(); k <= p.node_max(); ++k)
    os << fmt_double(static_cast<double>(k) * p.dt()) << ","
       << fmt_double(p.value_at_node(k)) << "\n";
}

WienerPath read_path_csv(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot open " + file);
  std::string line;
  if (!std::getline(is, line) || line.rfind("t,omega", 0) != 0)
    throw std::runtime_error(file + ": expected header 't,omega'");
  std::vector<double> ts, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error(file + ": malformed row '" + line + "'");
    ts.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (ts.size() < 2) throw std::runtime_error(file + ": too few samples");
  const double dt = ts[1] - ts[0];
  for (std::size_t i = 1; i + 1 < ts.size(); ++i) {
    const double step = ts[i + 1] - ts[i];
    if (std::abs(step - dt) > 1e-9 * std::max(dt, step))
      throw std::runtime_error(file + ": non-uniform time grid");
  }
  return WienerPath::from_samples(ts.front(), dt, std::move(vs));
}

void write_field_csv(const std::string& file, const Field& f) {
  auto os = open_out(file);
  os << "x,u\n";
  const int m = oversampled_points(std::max(1, f.n_modes()));
  const GridSample g = to_grid(f, m);
  auto table = SineTable::get(std::max(1, f.n_modes()), m);
  const auto xs = table->nodes();
  for (int j = 0; j < m; ++j)
    os << fmt_double(xs[static_cast<std::size_t>(j)]) << ","
       << fmt_double(g.values[static_cast<std::size_t>(j)]) << "\n";
}

void write_coeffs_csv(const std::string& file, const Field& f) {
  auto os = open_out(file);
  os << "n,a_n\n";
  for (int n = 1; n <= f.n_modes(); ++n)
    os << n << "," << fmt_double(f.coeff(n)) << "\n";
}

void write_trajectory_csv(const std::string& file, const Trajectory& traj) {
  auto os = open_out(file);
  os << "t,x,u\n";
  if (traj.samples.empty()) return;
  const int n = traj.samples.front().v.n_modes();
  const int m = oversampled_points(std::max(1, n));
  auto table = SineTable::get(std::max(1, n), m);
  const auto xs = table->nodes();
  for (const auto& sample : traj.samples) {
    const GridSample g = to_grid(sample.v, m);
    for (int j = 0; j < m; ++j)
      os << fmt_double(sample.t) << "," << fmt_double(xs[static_cast<std::size_t>(j)])
         << "," << fmt_double(g.values[static_cast<std::size_t>(j)]) << "\n";
  }
}

void write_trajectory_coeffs_csv(const std::string& file,
                                 const Trajectory& traj) {
  auto os = open_out(file);
  os << "t,n,a_n\n";
  for (const auto& sample : traj.samples)
    for (int n = 1; n <= sample.v.n_modes(); ++n)
      os << fmt_double(sample.t) << "," << n << ","
         << fmt_double(sample.v.coeff(n)) << "\n";
}

std::uint64_t parse_seed(const std::string& text) {
  std::size_t pos = 0;
  const std::uint64_t seed = std::stoull(text, &pos, 0);  // 0x-hex or decimal
  if (pos != text.size())
    throw std::invalid_argument("invalid seed literal: " + text);
  return seed;
}

}  // namespace spde
