#include "mmass/mass.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

#include "mmass/error.hpp"
#include "mmass/numeric.hpp"

namespace mmass {

namespace {

void require_positive_t(std::uint64_t t) { require(t >= 1, "sample count t must be >= 1"); }

double td(std::uint64_t t) { return static_cast<double>(t); }

// Band index of p relative to 1/(t+1), or -1 below it.
int band_of(double p, double t_plus_1) {
  const double scaled = p * t_plus_1;
  if (scaled < 1.0) return -1;
  int j = static_cast<int>(std::floor(std::log2(scaled)));
  // log2 can be off by one right at a power of two.
  while (j > 0 && std::ldexp(1.0, j) > scaled) --j;
  while (std::ldexp(1.0, j + 1) <= scaled) ++j;
  return j;
}

}  // namespace

double expected_missing_mass(const ProbVector& d, std::uint64_t t, bool allow_zero) {
  if (t == 0) {
    require(allow_zero, "t = 0 requires allow_zero");
    return 1.0;
  }
  CompensatedSum acc;
  for (const auto& r : d.runs())
    acc.add(static_cast<double>(r.count) * r.mass * pow_one_minus(r.mass, td(t)));
  return acc.value();
}

MassInterval expected_missing_mass(const Truncation& tr, std::uint64_t t) {
  require_positive_t(t);
  CompensatedSum acc;
  for (double p : tr.masses) acc.add(p * pow_one_minus(p, td(t)));
  const double lo = acc.value();
  return {lo, lo + tr.tail_bound};
}

MassInterval expected_missing_mass(const CountableFamily& f, std::uint64_t t, double tol) {
  return expected_missing_mass(truncate(f, tol), t);
}

double kernel_f(double x, double t) {
  require(x >= 0.0 && x <= 1.0, "kernel argument must lie in [0,1]");
  return x * pow_one_minus(x, t);
}

double kernel_f_prime(double x, double t) {
  require(x >= 0.0 && x <= 1.0, "kernel argument must lie in [0,1]");
  return pow_one_minus(x, t - 1.0) * (1.0 - (t + 1.0) * x);
}

double bound_finite(std::uint64_t n, std::uint64_t t) {
  require(n >= 1, "support size must be >= 1");
  require_positive_t(t);
  const double b = t <= n ? std::exp(-td(t) / td(n)) : td(n) / (std::numbers::e * td(t));
  return std::min(b, 1.0);
}

double bound_countable(std::uint64_t ell, std::uint64_t t, double c) {
  require(ell >= 1, "plateau length must be >= 1");
  require_positive_t(t);
  require(c > 0.0, "universal constant must be positive");
  return td(ell) / (c * td(t));
}

double trivial_bound(const ProbVector& d, std::uint64_t t) {
  return pow_one_minus(d.min_mass(), td(t));
}

std::vector<DyadicBand> dyadic_band_decomposition(const ProbVector& d, std::uint64_t t) {
  require_positive_t(t);
  std::map<int, std::pair<std::uint64_t, CompensatedSum>> bands;
  const double t1 = td(t) + 1.0;
  for (const auto& r : d.runs()) {
    auto& [count, acc] = bands[band_of(r.mass, t1)];
    count += r.count;
    acc.add(static_cast<double>(r.count) * r.mass * pow_one_minus(r.mass, td(t)));
  }
  std::vector<DyadicBand> out;
  out.reserve(bands.size());
  for (const auto& [j, v] : bands) out.push_back({j, v.first, v.second.value()});
  return out;
}

double gt_expected_estimate(const ProbVector& d, std::uint64_t t) {
  require_positive_t(t);
  CompensatedSum acc;
  for (const auto& r : d.runs())
    acc.add(static_cast<double>(r.count) * r.mass * pow_one_minus(r.mass, td(t - 1)));
  return acc.value();
}

double singleton_mass_expectation(const ProbVector& d, std::uint64_t t) {
  require_positive_t(t);
  CompensatedSum acc;
  for (const auto& r : d.runs())
    acc.add(static_cast<double>(r.count) * td(t) * r.mass * r.mass * pow_one_minus(r.mass, td(t - 1)));
  return acc.value();
}

double gt_bias(const ProbVector& d, std::uint64_t t) {
  return gt_expected_estimate(d, t) - expected_missing_mass(d, t);
}

MassCurve mass_curve(const ProbVector& d, std::span<const std::uint64_t> ts) {
  MassCurve c;
  for (auto t : ts) {
    const double v = expected_missing_mass(d, t);
    c.t_values.push_back(t);
    c.values.push_back(v);
    c.lower.push_back(v);
    c.upper.push_back(v);
  }
  return c;
}

MassCurve mass_curve(const CountableFamily& f, std::span<const std::uint64_t> ts, double tol) {
  const auto tr = truncate(f, tol);
  MassCurve c;
  for (auto t : ts) {
    const auto iv = expected_missing_mass(tr, t);
    c.t_values.push_back(t);
    c.values.push_back(0.5 * (iv.lower + iv.upper));
    c.lower.push_back(iv.lower);
    c.upper.push_back(iv.upper);
  }
  return c;
}

}  // namespace mmass
