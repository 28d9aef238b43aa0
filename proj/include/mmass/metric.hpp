#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mmass/sampling.hpp"

namespace mmass {

/// Finite metric probability space. Points carry either Euclidean
/// coordinates or an explicit distance matrix; balls are closed.
class PointCloud {
 public:
  enum class Metric { euclidean, explicit_matrix };

  /// coords is row-major, one row of `dim` coordinates per point.
  static PointCloud euclidean(std::vector<double> coords, std::size_t dim, std::vector<double> masses);
  /// Validates symmetry, zero diagonal, nonnegativity and the triangle
  /// inequality to within kTriangleTolerance.
  static PointCloud from_matrix(std::vector<double> matrix, std::vector<double> masses);

  static constexpr double kTriangleTolerance = 1e-9;

  std::size_t size() const noexcept { return masses_.size(); }
  std::size_t dim() const noexcept { return dim_; }
  Metric metric() const noexcept { return metric_; }
  std::span<const double> masses() const noexcept { return masses_; }
  std::span<const double> coords() const noexcept { return coords_; }
  std::span<const double> matrix() const noexcept { return matrix_; }

  double distance(std::size_t i, std::size_t j) const noexcept { return matrix_[i * size() + j]; }
  double diameter() const noexcept;
  /// All pairwise distances d(i,j), i < j.
  std::vector<double> pairwise_distances() const;

 private:
  PointCloud() = default;
  static void check_masses(std::span<const double> masses);

  Metric metric_ = Metric::euclidean;
  std::size_t dim_ = 0;
  std::vector<double> coords_;
  std::vector<double> masses_;
  std::vector<double> matrix_;  // dense n x n distances, computed once
};

struct EpsNet {
  double eps = 0.0;
  std::vector<std::size_t> centers;

  std::size_t size() const noexcept { return centers.size(); }
};

/// Farthest-point greedy net seeded at the heaviest point (lowest index on
/// ties); stops once every point lies within eps of a center.
EpsNet greedy_eps_net(const PointCloud& cloud, double eps);

/// Whether every point lies within eps of some center.
bool covers(const PointCloud& cloud, std::span<const std::size_t> centers, double eps);

inline constexpr std::size_t kMaxExactCoverPoints = 20;

/// Minimum-cardinality eps-net by exhaustive search; clouds of at most
/// kMaxExactCoverPoints points.
EpsNet exact_eps_net(const PointCloud& cloud, double eps);

/// Mass of points farther than eps from every sample point.
double eps_missing_mass(const PointCloud& cloud, std::span<const std::size_t> sample, double eps);

/// sum_x m(x) (1 - P(B_eps(x)))^t, where 1 - P(B_eps(x)) is summed directly
/// over the points outside the ball.
double expected_eps_missing_mass(const PointCloud& cloud, std::uint64_t t, double eps);

/// E[U_t(eps)^2] = sum_{x,y} m(x) m(y) (1 - P(B_eps(x) u B_eps(y)))^t.
double eps_missing_mass_second_moment(const PointCloud& cloud, std::uint64_t t, double eps);

/// net_size / (e t).
double covering_bound(std::size_t net_size, std::uint64_t t);

/// Monte Carlo mean of eps_missing_mass over t-point samples, checked
/// against expected_eps_missing_mass. The 3 se window uses the larger of the
/// plug-in standard error and the exact one from the second moment, since the
/// plug-in value collapses to 0 when every replicate misses a rare event.
McReport mc_eps_missing_mass(const PointCloud& cloud, std::uint64_t t, double eps, std::uint64_t replicates,
                             std::uint64_t seed, unsigned threads = 0);

}  // namespace mmass
