#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mmass/dist.hpp"

namespace mmass {

/// Occurrence counts of t draws, indexed like ProbVector::masses().
struct SampleCounts {
  std::uint64_t t = 0;
  std::vector<std::uint64_t> counts;
  std::string source;
  std::uint64_t seed = 0;
};

/// Inverse-CDF sampler over a cumulative table of the expanded masses.
class CategoricalSampler {
 public:
  explicit CategoricalSampler(std::span<const double> masses);
  explicit CategoricalSampler(const ProbVector& d);

  std::size_t size() const noexcept { return cumulative_.size(); }
  std::span<const double> masses() const noexcept { return masses_; }

  template <class Engine>
  std::size_t operator()(Engine& gen) const {
    return lookup(unit_uniform(gen()));
  }

  static double unit_uniform(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
  }

 private:
  std::size_t lookup(double u) const noexcept;

  std::vector<double> masses_;
  std::vector<double> cumulative_;
};

/// Seed of replicate `index` under master seed `seed` (splitmix64 of the pair).
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept;

/// Worker count: MML_THREADS if set and positive, else hardware concurrency.
unsigned default_threads();

/// Runs `replicates` independent replicates, each with its own engine seeded
/// by substream_seed(seed, i), writing `width` statistics per replicate into
/// row i of the returned row-major table. Output does not depend on `threads`.
using ReplicateFn = std::function<void(std::mt19937_64&, std::span<double>)>;
std::vector<double> run_replicates(std::uint64_t replicates, std::uint64_t seed, std::size_t width,
                                   const ReplicateFn& fn, unsigned threads = 0);

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;  // plug-in sample standard deviation / sqrt(R)
};

/// Mean and standard error of column `column` of a run_replicates table.
MeanEstimate column_estimate(std::span<const double> table, std::size_t width, std::size_t column);

struct McReport {
  std::uint64_t replicates = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::uint64_t seed = 0;
  std::optional<double> reference;  // closed-form value the estimate is checked against
  std::optional<double> reference_std_error;  // exact standard error of the mean, when known
  std::optional<bool> within_3se;
  std::optional<double> exceed_freq;
  std::optional<double> exceed_std_error;
  std::optional<double> bound;
  std::optional<bool> violated;
};

/// Absolute slack added to the 3-standard-error window so that zero-variance
/// cases compare equal up to rounding.
inline constexpr double kMcSlack = 1e-12;
bool within_three_se(double estimate, double std_error, double reference) noexcept;

SampleCounts draw_sample(const ProbVector& d, std::uint64_t t, std::uint64_t seed);

/// Total mass of atoms with zero count.
double empirical_missing_mass(const ProbVector& d, const SampleCounts& sc);

/// (number of atoms seen exactly once) / t.
double good_turing(const SampleCounts& sc);

/// Monte Carlo mean of (good_turing - empirical_missing_mass) against gt_bias.
McReport verify_bias(const ProbVector& d, std::uint64_t t, std::uint64_t replicates, std::uint64_t seed,
                     unsigned threads = 0);

/// Frequency of |U_t - E U_t| >= eps against 2 exp(-t eps^2). The estimate
/// field carries the mean of U_t; violated is set when the frequency exceeds
/// the bound by more than three binomial standard errors.
McReport verify_concentration(const ProbVector& d, std::uint64_t t, double eps, std::uint64_t replicates,
                              std::uint64_t seed, unsigned threads = 0);

}  // namespace mmass
