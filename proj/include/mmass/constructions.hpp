#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mmass/dist.hpp"

namespace mmass {

/// n-1 atoms of mass 1/(t+1) and one heavy atom carrying the rest.
/// Requires t > n.
ProbVector tight_finite(std::uint64_t n, std::uint64_t t);

/// Dyadic blocks of `a` equal atoms; block k has total mass 2^{-k} and
/// plateau length a. Requires a >= 2.
CountableFamily tight_countable(std::uint64_t a);

/// One equal-mass block of the rate construction before doubling.
struct RateBlock {
  std::uint64_t horizon = 0;  // t the block was built for; 0 for the heavy atom
  double mass = 0.0;          // per-atom mass
  std::uint64_t count = 0;
  double cap = 1.0;           // per-atom masses are strictly below this

  double total() const noexcept { return mass * static_cast<double>(count); }
};

struct RateConstruction {
  ProbVector distribution;        // D^k(base)
  std::uint64_t tau = 0;          // first t > 10 with r_t < 0.9
  std::uint64_t doublings = 0;    // k
  std::vector<RateBlock> blocks;  // base, before doubling
};

inline constexpr std::uint64_t kMaxDoublings = 40;

/// Distribution whose expected missing mass dominates r_t for every
/// t = 1..r.size(), where r[0] = r_1. The base puts 1 - r_tau on a single
/// atom, r_{t-1} - r_t on fine atoms below 1/(t+1)^2 for tau < t <= T, and
/// the residual r_T on atoms below 1/(T+1)^2; it is then doubled until the
/// whole horizon is dominated.
RateConstruction rate_lb(std::span<const double> r, std::uint64_t max_doublings = kMaxDoublings);

/// r_t = 1/ln(t+2), t = 1..t_max.
std::vector<double> inverse_log_sequence(std::uint64_t t_max);
/// r_t = scale * ratio^t, t = 1..t_max.
std::vector<double> geometric_sequence(std::uint64_t t_max, double scale, double ratio);

}  // namespace mmass
