#include "mmass/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "mmass/error.hpp"
#include "mmass/mass.hpp"
#include "mmass/numeric.hpp"

namespace mmass {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void count_draws(const CategoricalSampler& s, std::uint64_t t, std::mt19937_64& gen,
                 std::vector<std::uint64_t>& counts) {
  std::fill(counts.begin(), counts.end(), 0);
  for (std::uint64_t i = 0; i < t; ++i) ++counts[s(gen)];
}

double unseen_mass(std::span<const double> masses, std::span<const std::uint64_t> counts) {
  CompensatedSum acc;
  for (std::size_t i = 0; i < masses.size(); ++i)
    if (counts[i] == 0) acc.add(masses[i]);
  return acc.value();
}

double singleton_fraction(std::span<const std::uint64_t> counts, std::uint64_t t) {
  const auto ones = std::count(counts.begin(), counts.end(), std::uint64_t{1});
  return static_cast<double>(ones) / static_cast<double>(t);
}

}  // namespace

CategoricalSampler::CategoricalSampler(std::span<const double> masses)
    : masses_(masses.begin(), masses.end()) {
  require(!masses_.empty(), "sampler needs at least one atom");
  cumulative_.reserve(masses_.size());
  CompensatedSum acc;
  for (double m : masses_) {
    acc.add(m);
    cumulative_.push_back(acc.value());
  }
}

CategoricalSampler::CategoricalSampler(const ProbVector& d) : CategoricalSampler(d.masses()) {}

std::size_t CategoricalSampler::lookup(double u) const noexcept {
  const double target = u * cumulative_.back();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  return std::min(idx, cumulative_.size() - 1);
}

std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) noexcept {
  return splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

unsigned default_threads() {
  if (const char* env = std::getenv("MML_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<double> run_replicates(std::uint64_t replicates, std::uint64_t seed, std::size_t width,
                                   const ReplicateFn& fn, unsigned threads) {
  require(width >= 1, "replicate width must be positive");
  std::vector<double> table(replicates * width);
  if (threads == 0) threads = default_threads();
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, std::max<std::uint64_t>(replicates, 1)));

  auto work = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t i = begin; i < end; ++i) {
      std::mt19937_64 gen(substream_seed(seed, i));
      fn(gen, std::span<double>(table).subspan(i * width, width));
    }
  };
  if (threads <= 1) {
    work(0, replicates);
    return table;
  }
  std::vector<std::jthread> pool;
  pool.reserve(threads);
  const std::uint64_t chunk = (replicates + threads - 1) / threads;
  for (unsigned w = 0; w < threads; ++w) {
    const std::uint64_t begin = w * chunk;
    const std::uint64_t end = std::min(replicates, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back(work, begin, end);
  }
  pool.clear();
  return table;
}

MeanEstimate column_estimate(std::span<const double> table, std::size_t width, std::size_t column) {
  const std::size_t rows = table.size() / width;
  require(rows >= 1, "no replicates");
  CompensatedSum sum;
  for (std::size_t i = 0; i < rows; ++i) sum.add(table[i * width + column]);
  MeanEstimate e;
  e.mean = sum.value() / static_cast<double>(rows);
  if (rows > 1) {
    CompensatedSum sq;
    for (std::size_t i = 0; i < rows; ++i) {
      const double dlt = table[i * width + column] - e.mean;
      sq.add(dlt * dlt);
    }
    const double var = sq.value() / static_cast<double>(rows - 1);
    e.std_error = std::sqrt(var / static_cast<double>(rows));
  }
  return e;
}

bool within_three_se(double estimate, double std_error, double reference) noexcept {
  return std::fabs(estimate - reference) <= 3.0 * std_error + kMcSlack;
}

SampleCounts draw_sample(const ProbVector& d, std::uint64_t t, std::uint64_t seed) {
  require(t >= 1, "sample size must be >= 1");
  const CategoricalSampler sampler(d);
  SampleCounts sc;
  sc.t = t;
  sc.seed = seed;
  sc.source = "probvector:n=" + std::to_string(d.size());
  sc.counts.assign(sampler.size(), 0);
  std::mt19937_64 gen(substream_seed(seed, 0));
  count_draws(sampler, t, gen, sc.counts);
  return sc;
}

double empirical_missing_mass(const ProbVector& d, const SampleCounts& sc) {
  require(sc.counts.size() == d.size(), "sample counts do not match the support size");
  const auto m = d.masses();
  return unseen_mass(m, sc.counts);
}

double good_turing(const SampleCounts& sc) {
  require(sc.t >= 1, "good_turing needs t >= 1");
  return singleton_fraction(sc.counts, sc.t);
}

McReport verify_bias(const ProbVector& d, std::uint64_t t, std::uint64_t replicates, std::uint64_t seed,
                     unsigned threads) {
  require(t >= 1, "t must be >= 1");
  require(replicates >= 1000, "verify_bias needs at least 10^3 replicates");
  const CategoricalSampler sampler(d);
  const auto table = run_replicates(
      replicates, seed, 1,
      [&](std::mt19937_64& gen, std::span<double> out) {
        std::vector<std::uint64_t> counts(sampler.size());
        count_draws(sampler, t, gen, counts);
        out[0] = singleton_fraction(counts, t) - unseen_mass(sampler.masses(), counts);
      },
      threads);
  const auto est = column_estimate(table, 1, 0);
  McReport rep;
  rep.replicates = replicates;
  rep.seed = seed;
  rep.estimate = est.mean;
  rep.std_error = est.std_error;
  rep.reference = gt_bias(d, t);
  rep.within_3se = within_three_se(est.mean, est.std_error, *rep.reference);
  return rep;
}

McReport verify_concentration(const ProbVector& d, std::uint64_t t, double eps, std::uint64_t replicates,
                              std::uint64_t seed, unsigned threads) {
  require(t >= 1, "t must be >= 1");
  require(eps > 0.0 && eps <= 1.0, "eps must lie in (0, 1]");
  require(replicates >= 10000, "verify_concentration needs at least 10^4 replicates");
  const CategoricalSampler sampler(d);
  const double expected = expected_missing_mass(d, t);
  const auto table = run_replicates(
      replicates, seed, 2,
      [&](std::mt19937_64& gen, std::span<double> out) {
        std::vector<std::uint64_t> counts(sampler.size());
        count_draws(sampler, t, gen, counts);
        const double u = unseen_mass(sampler.masses(), counts);
        out[0] = u;
        out[1] = std::fabs(u - expected) >= eps ? 1.0 : 0.0;
      },
      threads);
  const auto mean_u = column_estimate(table, 2, 0);
  const auto freq = column_estimate(table, 2, 1);
  McReport rep;
  rep.replicates = replicates;
  rep.seed = seed;
  rep.estimate = mean_u.mean;
  rep.std_error = mean_u.std_error;
  rep.reference = expected;
  rep.within_3se = within_three_se(mean_u.mean, mean_u.std_error, expected);
  const double f = freq.mean;
  rep.exceed_freq = f;
  rep.exceed_std_error = std::sqrt(f * (1.0 - f) / static_cast<double>(replicates));
  rep.bound = 2.0 * std::exp(-static_cast<double>(t) * eps * eps);
  rep.violated = f - 3.0 * *rep.exceed_std_error > *rep.bound;
  return rep;
}

}  // namespace mmass
