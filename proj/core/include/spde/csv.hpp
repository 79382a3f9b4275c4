#pragma once

#include <string>
#include <vector>

#include "spde/field.hpp"
#include "spde/solver.hpp"
#include "spde/wiener.hpp"

namespace spde {

/// Shortest exact decimal for a 64-bit float (%.17g); CSV cells use this so
/// regression baselines are bit-exact on re-read.
std::string fmt_double(double x);

/// Header `t,omega`.
void write_path_csv(const std::string& file, const WienerPath& p);
WienerPath read_path_csv(const std::string& file);

/// Header `x,u`, values on the oversampled grid.
void write_field_csv(const std::string& file, const Field& f);

/// Header `n,a_n`.
void write_coeffs_csv(const std::string& file, const Field& f);

/// Long form `t,x,u` over the recorded samples.
void write_trajectory_csv(const std::string& file, const Trajectory& traj);

/// Per-time coefficient form `t,n,a_n`.
void write_trajectory_coeffs_csv(const std::string& file, const Trajectory& traj);

/// Parse a seed given as decimal or 0x-prefixed hex.
std::uint64_t parse_seed(const std::string& text);

}  // namespace spde
