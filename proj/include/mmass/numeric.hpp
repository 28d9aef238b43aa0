#pragma once

#include <cstddef>
#include <span>

namespace mmass {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double v) noexcept;
  CompensatedSum& operator+=(double v) noexcept {
    add(v);
    return *this;
  }
  double value() const noexcept { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_sum(std::span<const double> values) noexcept;

/// Exponents at or above this go through exp/log instead of repeated squaring.
inline constexpr double kLogSpaceExponent = 64.0;
/// Masses below this always take the log1p route for (1-p)^t.
inline constexpr double kLogSpaceMass = 1e-8;

/// (1-p)^t for p in [0,1], t >= 0. Integer t below the log-space threshold
/// uses exponentiation by squaring; everything else exp(t*log1p(-p)).
double pow_one_minus(double p, double t) noexcept;

/// b^t for b >= 0, t >= 0 under the same policy as pow_one_minus.
double pow_nonneg(double b, double t) noexcept;

}  // namespace mmass
