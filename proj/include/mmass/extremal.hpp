#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <utility>

#include "mmass/dist.hpp"

namespace mmass {

// One heavy atom and n-1 light atoms of mass x in [0, 1/n]:
//   G_t(x) = (n-1) x (1-x)^t + (1-(n-1)x) ((n-1)x)^t.
// t is real-valued here; the public searches below take integer t.

double g_value(std::uint64_t n, double t, double x);
double g_prime(std::uint64_t n, double t, double x);

/// G_t(x) / G_t(1/n), computed in log space.
double r_ratio(std::uint64_t n, double t, double x);

/// Upper bound on max_x G_t(x) divided by (1-1/n)^t; a value below 1
/// certifies that the uniform distribution is still optimal at t.
double q_diagnostic(std::uint64_t n, double t);

struct ExtremalSolution {
  std::uint64_t n = 0;
  std::uint64_t t = 0;
  double x_star = 0.0;
  double heavy = 0.0;
  double value = 0.0;
  bool is_uniform = true;
  /// ln(x_star - 1/(t+1)) for interior solutions. x_star itself is the
  /// nearest double, which for t >> n rounds onto 1/(t+1).
  std::optional<double> log_excess;

  ProbVector to_distribution() const;
};

/// Maximizer of G_t on [0, 1/n]. Interior critical points are located by
/// bisection on the sign of G' in u = ln(x - 1/(t+1)); the best interior
/// maximum wins only if it strictly beats the uniform value.
ExtremalSolution find_x_star(std::uint64_t n, std::uint64_t t);

struct ThresholdResult {
  std::uint64_t n = 0;
  std::uint64_t tau = 0;
  double margin_at_tau = 0.0;  // G_tau(x*) - (1-1/n)^tau
  std::uint64_t scan_first = 0;
  std::uint64_t scan_last = 0;
  bool monotone = true;  // every scanned t >= tau also wins
};

/// Smallest t > n at which the bivalent maximum strictly beats uniform.
/// t_max = 0 selects ceil(n + 10 sqrt(n)).
ThresholdResult find_tau(std::uint64_t n, std::uint64_t t_max = 0);

struct LightMassBounds {
  double lower = 0.0;      // 1/(t+1)
  double upper = 0.0;      // 1/(t+1) + e^{-sqrt(n/2)}
  double log_width = 0.0;  // -sqrt(n/2)
};

/// Requires t >= n + sqrt(2n).
LightMassBounds light_mass_bounds(std::uint64_t n, std::uint64_t t);

struct SimplexOracleResult {
  double value = 0.0;
  std::array<double, 3> point{};  // sorted ascending
};

/// Exhaustive grid search of sum_i p_i (1-p_i)^t over the 2-simplex followed
/// by one refinement pass at a tenth of the step around the best grid point.
SimplexOracleResult simplex_oracle_n3(std::uint64_t t, double grid_step);

}  // namespace mmass
