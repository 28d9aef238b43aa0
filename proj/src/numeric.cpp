#include "mmass/numeric.hpp"

#include <cmath>
#include <cstdint>

#include "mmass/error.hpp"

namespace mmass {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_input: return "invalid-input";
    case Errc::insufficient_truncation: return "insufficient-truncation";
    case Errc::internal_error: return "internal-error";
    case Errc::threshold_not_found: return "threshold-not-found";
    case Errc::construction_failed: return "construction-failed";
  }
  return "unknown";
}

void CompensatedSum::add(double v) noexcept {
  const double t = sum_ + v;
  if (std::fabs(sum_) >= std::fabs(v))
    comp_ += (sum_ - t) + v;
  else
    comp_ += (v - t) + sum_;
  sum_ = t;
}

double compensated_sum(std::span<const double> values) noexcept {
  CompensatedSum acc;
  for (double v : values) acc.add(v);
  return acc.value();
}

namespace {

bool small_integer(double t) noexcept {
  return t < kLogSpaceExponent && t == std::floor(t);
}

double pow_by_squaring(double b, std::uint64_t e) noexcept {
  double r = 1.0;
  while (e != 0) {
    if (e & 1u) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

}  // namespace

double pow_one_minus(double p, double t) noexcept {
  if (t == 0.0) return 1.0;
  if (p >= 1.0) return 0.0;
  if (p < kLogSpaceMass || !small_integer(t)) return std::exp(t * std::log1p(-p));
  return pow_by_squaring(1.0 - p, static_cast<std::uint64_t>(t));
}

double pow_nonneg(double b, double t) noexcept {
  if (t == 0.0) return 1.0;
  if (b == 0.0) return 0.0;
  if (!small_integer(t)) return std::exp(t * std::log(b));
  return pow_by_squaring(b, static_cast<std::uint64_t>(t));
}

}  // namespace mmass
