#include "mmass/extremal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mmass/error.hpp"
#include "mmass/numeric.hpp"

namespace mmass {

namespace {

constexpr int kScanPoints = 64;
// Interior candidates closer than this (relative) to 1/n are the uniform point.
constexpr double kUniformGuard = 1e-9;

void check_family(std::uint64_t n, double t, double x) {
  require(n >= 2, "bivalent family needs n >= 2");
  require(t >= 0.0, "t must be nonnegative");
  require(x >= 0.0 && x <= 1.0 / static_cast<double>(n), "x must lie in [0, 1/n]");
}

double uniform_value(std::uint64_t n, double t) {
  return pow_one_minus(1.0 / static_cast<double>(n), t);
}

// Sign of G'(1/(t+1) + e^u). With p = 1/(t+1) + d,
//   G'(p)/(n-1) = -d (t+1) (1-p)^{t-1} + (t-n+1 - (n-1) d (t+1)) ((n-1)p)^{t-1},
// and both terms are compared through their logarithms so that offsets far
// below the resolution of p still have a well-defined sign.
int gprime_sign_at_offset(double n, double t, double u) {
  const double lo = 1.0 / (t + 1.0);
  const double d = std::exp(u);
  const double p = lo + d;
  const double log_neg = u + std::log(t + 1.0) + (t - 1.0) * std::log1p(-p);
  const double c = (t - n + 1.0) - (n - 1.0) * d * (t + 1.0);
  if (c <= 0.0) return -1;
  const double log_pos = std::log(c) + (t - 1.0) * std::log((n - 1.0) * p);
  if (log_pos > log_neg) return 1;
  if (log_pos < log_neg) return -1;
  return 0;
}

double bisect_offset(double n, double t, double a, double b) {
  // sign(a) >= 0, sign(b) < 0
  for (int it = 0; it < 4096; ++it) {
    const double mid = 0.5 * (a + b);
    if (mid == a || mid == b) break;
    if (gprime_sign_at_offset(n, t, mid) >= 0)
      a = mid;
    else
      b = mid;
  }
  return 0.5 * (a + b);
}

}  // namespace

double g_value(std::uint64_t n, double t, double x) {
  check_family(n, t, x);
  const double m = static_cast<double>(n - 1);
  const double heavy = std::max(0.0, 1.0 - m * x);
  return m * x * pow_one_minus(x, t) + heavy * pow_nonneg(m * x, t);
}

double g_prime(std::uint64_t n, double t, double x) {
  check_family(n, t, x);
  const double m = static_cast<double>(n - 1);
  const double light = pow_one_minus(x, t - 1.0) * (1.0 - (t + 1.0) * x);
  const double heavy = pow_nonneg(m * x, t - 1.0) * (t - (t + 1.0) * m * x);
  return m * (light + heavy);
}

double r_ratio(std::uint64_t n, double t, double x) {
  check_family(n, t, x);
  const double nd = static_cast<double>(n);
  const double m = nd - 1.0;
  const double first = m * x * std::exp(t * (std::log1p(-x) - std::log1p(-1.0 / nd)));
  const double heavy = std::max(0.0, 1.0 - m * x);
  const double second = x == 0.0 ? 0.0 : heavy * std::exp(t * std::log(nd * x));
  return first + second;
}

double q_diagnostic(std::uint64_t n, double t) {
  require(n >= 2, "q_diagnostic needs n >= 2");
  require(t >= 1.0, "q_diagnostic needs t >= 1");
  const double nd = static_cast<double>(n);
  const double first = (nd - 1.0) / (t + 1.0) *
                       std::exp(t * (std::log1p(-1.0 / (t + 1.0)) - std::log1p(-1.0 / nd)));
  const double second = (1.0 - (nd - 1.0) / t) * std::exp(t * std::log(nd / t));
  return first + second;
}

ProbVector ExtremalSolution::to_distribution() const {
  if (is_uniform) return ProbVector::uniform(n);
  return ProbVector::from_runs({{x_star, n - 1}, {heavy, 1}});
}

ExtremalSolution find_x_star(std::uint64_t n, std::uint64_t t) {
  require(n >= 2, "find_x_star needs n >= 2");
  require(t >= 1, "find_x_star needs t >= 1");
  const double nd = static_cast<double>(n);
  const double td = static_cast<double>(t);

  ExtremalSolution sol;
  sol.n = n;
  sol.t = t;
  sol.x_star = 1.0 / nd;
  sol.heavy = 1.0 - (nd - 1.0) / nd;
  sol.value = uniform_value(n, td);
  sol.is_uniform = true;

  const double lo = 1.0 / (td + 1.0);
  const double x_end = (1.0 - kUniformGuard) / nd;
  if (lo >= x_end) return sol;  // G' > 0 on [0, 1/(t+1)) covers all of [0, 1/n)

  // Grid A: log-spaced offsets up to min(1/t, x_end). Grid B: linear in x
  // from there to x_end.
  const double split = std::min(1.0 / td, x_end);
  const double u_split = std::log(split - lo);
  const double u_est = std::log(td - nd + 1.0) + (td - 1.0) * std::log((nd - 1.0) * lo) -
                       std::log(td + 1.0) - (td - 1.0) * std::log1p(-lo);
  double u_min = std::min(u_est, u_split) - 40.0;
  for (int guard = 0; gprime_sign_at_offset(nd, td, u_min) < 0; ++guard) {
    if (guard > 1000) fail(Errc::internal_error, "G' not positive near 1/(t+1)");
    u_min -= 40.0;
  }

  std::vector<double> us;
  us.reserve(2 * kScanPoints);
  for (int k = 0; k < kScanPoints; ++k)
    us.push_back(u_min + (u_split - u_min) * k / (kScanPoints - 1));
  if (split < x_end) {
    for (int k = 1; k <= kScanPoints; ++k) {
      const double x = split + (x_end - split) * k / kScanPoints;
      us.push_back(std::log(x - lo));
    }
  }

  std::vector<int> sign(us.size());
  for (std::size_t k = 0; k < us.size(); ++k) sign[k] = gprime_sign_at_offset(nd, td, us[k]);

  double best_ratio = 1.0;
  std::optional<double> best_u;
  for (std::size_t k = 0; k + 1 < us.size(); ++k) {
    if (sign[k] >= 0 && sign[k + 1] < 0) {
      const double u = bisect_offset(nd, td, us[k], us[k + 1]);
      const double x = lo + std::exp(u);
      const double r = r_ratio(n, td, std::min(x, 1.0 / nd));
      if (r > best_ratio) {
        best_ratio = r;
        best_u = u;
      }
    }
  }

  if (!best_u) {
    if (split < x_end && r_ratio(n, td, split) > 1.0)
      fail(Errc::internal_error, "interior maximum exists but no sign change of G' was bracketed");
    return sol;
  }
  sol.is_uniform = false;
  sol.log_excess = *best_u;
  sol.x_star = lo + std::exp(*best_u);
  sol.heavy = 1.0 - (nd - 1.0) * sol.x_star;
  sol.value = g_value(n, td, sol.x_star);
  return sol;
}

ThresholdResult find_tau(std::uint64_t n, std::uint64_t t_max) {
  require(n >= 2, "find_tau needs n >= 2");
  const double nd = static_cast<double>(n);
  const auto min_budget = static_cast<std::uint64_t>(std::ceil(nd + 10.0 * std::sqrt(nd)));
  if (t_max == 0) t_max = min_budget;
  require(t_max >= min_budget, "scan budget t_max must be at least n + 10 sqrt(n)");

  ThresholdResult res;
  res.n = n;
  res.scan_first = n + 1;
  res.scan_last = t_max;
  for (std::uint64_t t = n + 1; t <= t_max; ++t) {
    const auto sol = find_x_star(n, t);
    const bool win = !sol.is_uniform;
    if (res.tau == 0) {
      if (win) {
        res.tau = t;
        res.margin_at_tau = sol.value - uniform_value(n, static_cast<double>(t));
      }
    } else if (!win) {
      res.monotone = false;
    }
  }
  if (res.tau == 0)
    fail(Errc::threshold_not_found, "no bivalent win for n = " + std::to_string(n) + " over t in [" +
                                        std::to_string(res.scan_first) + ", " +
                                        std::to_string(res.scan_last) + "]");
  return res;
}

LightMassBounds light_mass_bounds(std::uint64_t n, std::uint64_t t) {
  require(n >= 2, "light_mass_bounds needs n >= 2");
  const double nd = static_cast<double>(n);
  const double td = static_cast<double>(t);
  require(td >= nd + std::sqrt(2.0 * nd), "light_mass_bounds needs t >= n + sqrt(2n)");
  LightMassBounds b;
  b.lower = 1.0 / (td + 1.0);
  b.log_width = -std::sqrt(nd / 2.0);
  b.upper = b.lower + std::exp(b.log_width);
  return b;
}

SimplexOracleResult simplex_oracle_n3(std::uint64_t t, double grid_step) {
  require(t >= 1, "oracle needs t >= 1");
  require(grid_step > 0.0 && grid_step <= 1e-2, "grid step must lie in (0, 1e-2]");
  const auto steps = static_cast<long>(std::llround(1.0 / grid_step));
  const double h = 1.0 / static_cast<double>(steps);
  const double td = static_cast<double>(t);
  auto objective = [td](double a, double b, double c) {
    return a * pow_one_minus(a, td) + b * pow_one_minus(b, td) + c * pow_one_minus(c, td);
  };

  double best = -1.0;
  double b1 = 0.0, b2 = 0.0;
  for (long i = 0; i <= steps; ++i) {
    const double p1 = static_cast<double>(i) * h;
    for (long j = 0; i + j <= steps; ++j) {
      const double p2 = static_cast<double>(j) * h;
      const double p3 = static_cast<double>(steps - i - j) * h;
      const double v = objective(p1, p2, p3);
      if (v > best) {
        best = v;
        b1 = p1;
        b2 = p2;
      }
    }
  }

  const double fine = h / 10.0;
  const double c1 = b1, c2 = b2;
  for (int di = -10; di <= 10; ++di) {
    for (int dj = -10; dj <= 10; ++dj) {
      const double p1 = c1 + di * fine;
      const double p2 = c2 + dj * fine;
      const double p3 = 1.0 - p1 - p2;
      if (p1 < 0.0 || p2 < 0.0 || p3 < 0.0) continue;
      const double v = objective(p1, p2, p3);
      if (v > best) {
        best = v;
        b1 = p1;
        b2 = p2;
      }
    }
  }

  SimplexOracleResult out;
  out.value = best;
  out.point = {b1, b2, std::max(0.0, 1.0 - b1 - b2)};
  std::sort(out.point.begin(), out.point.end());
  return out;
}

}  // namespace mmass
