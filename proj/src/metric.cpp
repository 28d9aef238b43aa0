#include "mmass/metric.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "mmass/error.hpp"
#include "mmass/numeric.hpp"

namespace mmass {

namespace {

using Bitset = std::vector<std::uint64_t>;

std::vector<Bitset> ball_bitsets(const PointCloud& cloud, double eps) {
  const std::size_t n = cloud.size();
  const std::size_t words = (n + 63) / 64;
  std::vector<Bitset> balls(n, Bitset(words, 0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (cloud.distance(i, j) <= eps) balls[i][j / 64] |= std::uint64_t{1} << (j % 64);
  return balls;
}

void require_eps(double eps) { require(eps > 0.0 && std::isfinite(eps), "eps must be positive"); }

}  // namespace

void PointCloud::check_masses(std::span<const double> masses) {
  require(!masses.empty(), "point cloud is empty");
  // Full support and unit total, exactly as for a ProbVector.
  (void)ProbVector(std::vector<double>(masses.begin(), masses.end()));
}

PointCloud PointCloud::euclidean(std::vector<double> coords, std::size_t dim, std::vector<double> masses) {
  require(dim >= 1, "dimension must be positive");
  check_masses(masses);
  require(coords.size() == masses.size() * dim, "coordinate count does not match points x dim");
  for (double c : coords) require(std::isfinite(c), "coordinates must be finite");
  PointCloud pc;
  pc.metric_ = Metric::euclidean;
  pc.dim_ = dim;
  pc.coords_ = std::move(coords);
  pc.masses_ = std::move(masses);
  const std::size_t n = pc.masses_.size();
  pc.matrix_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = pc.coords_[i * dim + k] - pc.coords_[j * dim + k];
        s += d * d;
      }
      pc.matrix_[i * n + j] = pc.matrix_[j * n + i] = std::sqrt(s);
    }
  }
  return pc;
}

PointCloud PointCloud::from_matrix(std::vector<double> matrix, std::vector<double> masses) {
  check_masses(masses);
  const std::size_t n = masses.size();
  require(matrix.size() == n * n, "distance matrix must be n x n");
  for (std::size_t i = 0; i < n; ++i) {
    require(matrix[i * n + i] == 0.0, "distance matrix diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      const double d = matrix[i * n + j];
      require(std::isfinite(d) && d >= 0.0, "distances must be finite and nonnegative");
      require(d == matrix[j * n + i], "distance matrix must be symmetric");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        require(matrix[i * n + k] <= matrix[i * n + j] + matrix[j * n + k] + kTriangleTolerance,
                "distance matrix violates the triangle inequality");
  PointCloud pc;
  pc.metric_ = Metric::explicit_matrix;
  pc.masses_ = std::move(masses);
  pc.matrix_ = std::move(matrix);
  return pc;
}

double PointCloud::diameter() const noexcept { return *std::max_element(matrix_.begin(), matrix_.end()); }

std::vector<double> PointCloud::pairwise_distances() const {
  std::vector<double> out;
  const std::size_t n = size();
  out.reserve(n * (n - 1) / 2);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) out.push_back(distance(i, j));
  return out;
}

EpsNet greedy_eps_net(const PointCloud& cloud, double eps) {
  require_eps(eps);
  const std::size_t n = cloud.size();
  const auto m = cloud.masses();
  const auto first = static_cast<std::size_t>(std::max_element(m.begin(), m.end()) - m.begin());
  EpsNet net{eps, {first}};
  std::vector<double> gap(n);
  for (std::size_t i = 0; i < n; ++i) gap[i] = cloud.distance(first, i);
  for (;;) {
    const auto far = static_cast<std::size_t>(std::max_element(gap.begin(), gap.end()) - gap.begin());
    if (gap[far] <= eps) break;
    net.centers.push_back(far);
    for (std::size_t i = 0; i < n; ++i) gap[i] = std::min(gap[i], cloud.distance(far, i));
  }
  return net;
}

bool covers(const PointCloud& cloud, std::span<const std::size_t> centers, double eps) {
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const bool hit = std::any_of(centers.begin(), centers.end(),
                                 [&](std::size_t c) { return cloud.distance(c, i) <= eps; });
    if (!hit) return false;
  }
  return true;
}

EpsNet exact_eps_net(const PointCloud& cloud, double eps) {
  require_eps(eps);
  const std::size_t n = cloud.size();
  require(n <= kMaxExactCoverPoints, "exact covering number limited to 20 points");
  std::vector<std::uint32_t> cover(n, 0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (cloud.distance(i, j) <= eps) cover[i] |= std::uint32_t{1} << j;
  const std::uint32_t full = n == 32 ? ~0u : (std::uint32_t{1} << n) - 1;
  for (std::size_t k = 1; k <= n; ++k) {
    // Gosper's hack: subsets of size k in increasing order.
    std::uint32_t s = (std::uint32_t{1} << k) - 1;
    while (s <= full) {
      std::uint32_t hit = 0;
      for (std::uint32_t rest = s; rest != 0; rest &= rest - 1) hit |= cover[std::countr_zero(rest)];
      if (hit == full) {
        EpsNet net{eps, {}};
        for (std::uint32_t rest = s; rest != 0; rest &= rest - 1)
          net.centers.push_back(static_cast<std::size_t>(std::countr_zero(rest)));
        return net;
      }
      const std::uint32_t c = s & (~s + 1);
      const std::uint32_t r = s + c;
      if (r == 0) break;
      s = (((r ^ s) >> 2) / c) | r;
    }
  }
  fail(Errc::internal_error, "no cover found; the full point set always covers");
}

double eps_missing_mass(const PointCloud& cloud, std::span<const std::size_t> sample, double eps) {
  require_eps(eps);
  require(!sample.empty(), "sample must be nonempty");
  for (auto s : sample) require(s < cloud.size(), "sample index out of range");
  CompensatedSum acc;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const bool hit = std::any_of(sample.begin(), sample.end(),
                                 [&](std::size_t s) { return cloud.distance(s, i) <= eps; });
    if (!hit) acc.add(cloud.masses()[i]);
  }
  return acc.value();
}

double expected_eps_missing_mass(const PointCloud& cloud, std::uint64_t t, double eps) {
  require_eps(eps);
  require(t >= 1, "t must be >= 1");
  const std::size_t n = cloud.size();
  const auto m = cloud.masses();
  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) {
    CompensatedSum outside;
    for (std::size_t j = 0; j < n; ++j)
      if (cloud.distance(i, j) > eps) outside.add(m[j]);
    const double q = std::min(1.0, outside.value());
    total.add(m[i] * pow_nonneg(q, static_cast<double>(t)));
  }
  return total.value();
}

double eps_missing_mass_second_moment(const PointCloud& cloud, std::uint64_t t, double eps) {
  require_eps(eps);
  require(t >= 1, "t must be >= 1");
  const auto balls = ball_bitsets(cloud, eps);
  const auto m = cloud.masses();
  const std::size_t n = m.size();
  const std::size_t words = balls.front().size();
  const double td = static_cast<double>(t);
  CompensatedSum total;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      CompensatedSum outside;
      for (std::size_t w = 0; w < words; ++w) {
        std::uint64_t free = ~(balls[i][w] | balls[j][w]);
        if (w + 1 == words && n % 64) free &= (std::uint64_t{1} << (n % 64)) - 1;
        while (free) {
          outside.add(m[w * 64 + std::countr_zero(free)]);
          free &= free - 1;
        }
      }
      const double term = m[i] * m[j] * pow_nonneg(std::min(1.0, outside.value()), td);
      total.add(i == j ? term : 2.0 * term);
    }
  }
  return total.value();
}

double covering_bound(std::size_t net_size, std::uint64_t t) {
  require(t >= 1, "t must be >= 1");
  return static_cast<double>(net_size) / (std::numbers::e * static_cast<double>(t));
}

McReport mc_eps_missing_mass(const PointCloud& cloud, std::uint64_t t, double eps, std::uint64_t replicates,
                             std::uint64_t seed, unsigned threads) {
  require_eps(eps);
  require(t >= 1, "t must be >= 1");
  require(replicates >= 1000, "mc_eps_missing_mass needs at least 10^3 replicates");
  const auto balls = ball_bitsets(cloud, eps);
  const CategoricalSampler sampler(cloud.masses());
  const auto m = cloud.masses();
  const std::size_t words = balls.front().size();
  const auto table = run_replicates(
      replicates, seed, 1,
      [&](std::mt19937_64& gen, std::span<double> out) {
        Bitset covered(words, 0);
        for (std::uint64_t k = 0; k < t; ++k) {
          const auto& b = balls[sampler(gen)];
          for (std::size_t w = 0; w < words; ++w) covered[w] |= b[w];
        }
        CompensatedSum acc;
        for (std::size_t i = 0; i < m.size(); ++i)
          if (!(covered[i / 64] >> (i % 64) & 1u)) acc.add(m[i]);
        out[0] = acc.value();
      },
      threads);
  const auto est = column_estimate(table, 1, 0);
  McReport rep;
  rep.replicates = replicates;
  rep.seed = seed;
  rep.estimate = est.mean;
  rep.std_error = est.std_error;
  rep.reference = expected_eps_missing_mass(cloud, t, eps);
  const double var = eps_missing_mass_second_moment(cloud, t, eps) - *rep.reference * *rep.reference;
  rep.reference_std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(replicates));
  rep.within_3se = within_three_se(est.mean, std::max(est.std_error, *rep.reference_std_error), *rep.reference);
  return rep;
}

}  // namespace mmass
