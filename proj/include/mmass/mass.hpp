#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mmass/dist.hpp"

namespace mmass {

/// sum_i p_i (1 - p_i)^t. t = 0 is rejected unless allow_zero is set, in
/// which case the result is 1.
double expected_missing_mass(const ProbVector& d, std::uint64_t t, bool allow_zero = false);

struct MassInterval {
  double lower = 0.0;
  double upper = 0.0;

  double width() const noexcept { return upper - lower; }
  bool contains(double v) const noexcept { return lower <= v && v <= upper; }
};

/// Retained atoms give the lower end; dropped atoms add at most their mass.
MassInterval expected_missing_mass(const Truncation& tr, std::uint64_t t);
MassInterval expected_missing_mass(const CountableFamily& f, std::uint64_t t, double tol);

/// The one-atom kernel x (1-x)^t and its derivative (1-x)^{t-1} (1-(t+1)x).
/// t may be fractional; its peak is at 1/(t+1) with value below 1/(e t).
double kernel_f(double x, double t);
double kernel_f_prime(double x, double t);

/// e^{-t/n} for t <= n, n/(e t) otherwise, clamped to 1.
double bound_finite(std::uint64_t n, std::uint64_t t);

/// ell / (c t). The constant is a caller choice; kDefaultUniversalC is the
/// largest value consistent with the dyadic-block family over the grid
/// a in [2,64], t in (a, 100a] (sup of t E/ell measured at 1.44247, rounded
/// down to three digits after inversion).
inline constexpr double kDefaultUniversalC = 0.693;
double bound_countable(std::uint64_t ell, std::uint64_t t, double c = kDefaultUniversalC);

/// (1 - p_min)^t.
double trivial_bound(const ProbVector& d, std::uint64_t t);

/// One dyadic band of the masses relative to 1/(t+1): band j >= 0 holds
/// 2^j/(t+1) <= p < 2^{j+1}/(t+1); band -1 holds everything below 1/(t+1).
struct DyadicBand {
  int index = -1;
  std::uint64_t count = 0;
  double contribution = 0.0;
};

std::vector<DyadicBand> dyadic_band_decomposition(const ProbVector& d, std::uint64_t t);

// Good-Turing closed forms.

/// E[number of singletons / t] = sum_i p_i (1-p_i)^{t-1}.
double gt_expected_estimate(const ProbVector& d, std::uint64_t t);
/// E[mass of the singletons] = sum_i t p_i^2 (1-p_i)^{t-1}.
double singleton_mass_expectation(const ProbVector& d, std::uint64_t t);
/// gt_expected_estimate - expected_missing_mass.
double gt_bias(const ProbVector& d, std::uint64_t t);

/// E[U_t] over a grid of t. For finite distributions lower == value == upper.
struct MassCurve {
  std::vector<std::uint64_t> t_values;
  std::vector<double> values;
  std::vector<double> lower;
  std::vector<double> upper;
};

MassCurve mass_curve(const ProbVector& d, std::span<const std::uint64_t> ts);
/// Interval-valued curve; `value` is the midpoint of each interval.
MassCurve mass_curve(const CountableFamily& f, std::span<const std::uint64_t> ts, double tol);

}  // namespace mmass
