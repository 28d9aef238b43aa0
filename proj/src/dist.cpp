#include "mmass/dist.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmass/error.hpp"
#include "mmass/numeric.hpp"

namespace mmass {

namespace {

constexpr std::uint64_t kMaxTruncation = std::uint64_t{1} << 28;

void sort_and_merge(std::vector<MassRun>& runs) {
  std::sort(runs.begin(), runs.end(),
            [](const MassRun& a, const MassRun& b) { return a.mass < b.mass; });
  std::vector<MassRun> merged;
  merged.reserve(runs.size());
  for (const auto& r : runs) {
    if (!merged.empty() && merged.back().mass == r.mass)
      merged.back().count += r.count;
    else
      merged.push_back(r);
  }
  runs = std::move(merged);
}

std::uint64_t plateau_of_sorted_runs(std::span<const MassRun> runs) {
  require(!runs.empty(), "plateau length of an empty distribution");
  // For each distinct p_j, count atoms with p_j <= p < 2 p_j.
  std::uint64_t best = 0;
  std::uint64_t window = 0;
  std::size_t hi = 0;
  for (std::size_t lo = 0; lo < runs.size(); ++lo) {
    const double alpha = 2.0 * runs[lo].mass;
    while (hi < runs.size() && runs[hi].mass < alpha) window += runs[hi++].count;
    best = std::max(best, window);
    window -= runs[lo].count;
  }
  return best;
}

// Atoms per band of a geometric family: #{k >= 0 : q^k > 1/2}.
std::uint64_t geometric_band(double q) {
  std::uint64_t m = 0;
  double v = 1.0;
  while (v > 0.5) {
    ++m;
    v *= q;
    if (m > kMaxTruncation) fail(Errc::insufficient_truncation, "geometric ratio too close to 1");
  }
  return m;
}

}  // namespace

ProbVector::ProbVector(std::vector<double> masses, bool normalize) {
  runs_.reserve(masses.size());
  for (double m : masses) runs_.push_back({m, 1});
  canonicalize(normalize);
}

ProbVector ProbVector::from_runs(std::vector<MassRun> runs, bool normalize) {
  ProbVector d;
  d.runs_ = std::move(runs);
  d.canonicalize(normalize);
  return d;
}

ProbVector ProbVector::uniform(std::uint64_t n) {
  require(n >= 1, "uniform distribution needs n >= 1");
  return from_runs({{1.0 / static_cast<double>(n), n}});
}

void ProbVector::canonicalize(bool normalize) {
  require(!runs_.empty(), "empty distribution");
  CompensatedSum total;
  for (const auto& r : runs_) {
    require(std::isfinite(r.mass) && r.mass > 0.0, "masses must be finite and strictly positive");
    require(r.count > 0, "run count must be positive");
    total.add(r.mass * static_cast<double>(r.count));
  }
  const double sum = total.value();
  if (normalize) {
    for (auto& r : runs_) r.mass /= sum;
  } else {
    require(std::fabs(sum - 1.0) <= kSumTolerance,
            "masses sum to " + std::to_string(sum) + ", not 1");
  }
  for (const auto& r : runs_) require(r.mass <= 1.0, "mass exceeds 1");
  sort_and_merge(runs_);
  size_ = 0;
  for (const auto& r : runs_) {
    require(size_ <= std::numeric_limits<std::uint64_t>::max() - r.count, "support size overflow");
    size_ += r.count;
  }
}

double ProbVector::total() const noexcept {
  CompensatedSum acc;
  for (const auto& r : runs_) acc.add(r.mass * static_cast<double>(r.count));
  return acc.value();
}

std::vector<double> ProbVector::masses() const {
  require(size_ <= kMaxExpandedSupport, "support too large to expand");
  std::vector<double> out;
  out.reserve(size_);
  for (const auto& r : runs_) out.insert(out.end(), r.count, r.mass);
  return out;
}

CountableFamily CountableFamily::geometric(double ratio) {
  require(ratio > 0.0 && ratio < 1.0, "geometric ratio must lie in (0,1)");
  CountableFamily f;
  f.kind_ = Kind::geometric;
  f.ratio_ = ratio;
  return f;
}

CountableFamily CountableFamily::dyadic_blocks(std::uint64_t a) {
  require(a >= 1, "block size must be positive");
  CountableFamily f;
  f.kind_ = Kind::dyadic_blocks;
  f.block_ = a;
  return f;
}

CountableFamily CountableFamily::explicit_terms(std::vector<double> terms, double tail_after) {
  require(!terms.empty(), "explicit family needs at least one term");
  require(tail_after >= 0.0 && std::isfinite(tail_after), "tail bound must be nonnegative");
  for (double t : terms) require(std::isfinite(t) && t > 0.0, "terms must be strictly positive");
  CountableFamily f;
  f.kind_ = Kind::explicit_terms;
  f.terms_ = std::move(terms);
  f.tail_after_ = tail_after;
  f.suffix_.assign(f.terms_.size() + 1, tail_after);
  CompensatedSum acc;
  acc.add(tail_after);
  for (std::size_t i = f.terms_.size(); i-- > 0;) {
    acc.add(f.terms_[i]);
    f.suffix_[i] = acc.value();
  }
  const double head = f.suffix_[0] - tail_after;
  require(head <= 1.0 + kSumTolerance, "explicit terms exceed total mass 1");
  require(f.suffix_[0] >= 1.0 - kSumTolerance, "explicit terms plus tail bound fall short of 1");
  return f;
}

CountableFamily CountableFamily::from_finite(const ProbVector& d) {
  auto m = d.masses();
  std::reverse(m.begin(), m.end());
  return explicit_terms(std::move(m), 0.0);
}

std::string CountableFamily::name() const {
  switch (kind_) {
    case Kind::geometric: return "geometric";
    case Kind::dyadic_blocks: return "tight-countable";
    case Kind::explicit_terms: return "explicit";
  }
  return "unknown";
}

double CountableFamily::term(std::uint64_t i) const {
  require(i >= 1, "atoms are indexed from 1");
  switch (kind_) {
    case Kind::geometric:
      return (1.0 - ratio_) * std::pow(ratio_, static_cast<double>(i - 1));
    case Kind::dyadic_blocks: {
      const auto k = static_cast<int>((i - 1) / block_ + 1);
      return std::ldexp(1.0 / static_cast<double>(block_), -k);
    }
    case Kind::explicit_terms:
      return i <= terms_.size() ? terms_[i - 1] : 0.0;
  }
  return 0.0;
}

double CountableFamily::tail_mass(std::uint64_t n) const {
  switch (kind_) {
    case Kind::geometric:
      return std::pow(ratio_, static_cast<double>(n));
    case Kind::dyadic_blocks: {
      const auto full = static_cast<int>(n / block_);
      const auto rem = static_cast<double>(n % block_);
      return std::ldexp(1.0, -full) - rem * std::ldexp(1.0 / static_cast<double>(block_), -(full + 1));
    }
    case Kind::explicit_terms:
      return n < suffix_.size() ? suffix_[n] : tail_after_;
  }
  return 0.0;
}

bool CountableFamily::adequate_for_plateau(std::uint64_t n) const {
  switch (kind_) {
    case Kind::geometric: return n >= geometric_band(ratio_);
    case Kind::dyadic_blocks: return n >= block_;
    case Kind::explicit_terms: {
      if (n == 0 || n > terms_.size()) return false;
      const double smallest = *std::min_element(terms_.begin(), terms_.begin() + static_cast<std::ptrdiff_t>(n));
      return tail_mass(n) < smallest;
    }
  }
  return false;
}

Truncation truncate(const CountableFamily& f, double tol) {
  require(tol > 0.0 && tol < 1.0, "truncation tolerance must lie in (0,1)");
  Truncation out;
  std::uint64_t n = 0;
  while (f.tail_mass(n) > tol) {
    if (f.kind() == CountableFamily::Kind::explicit_terms && n >= f.terms().size())
      fail(Errc::insufficient_truncation, "explicit family tail bound exceeds tolerance");
    if (n >= kMaxTruncation) fail(Errc::insufficient_truncation, "truncation too long");
    out.masses.push_back(f.term(++n));
  }
  out.tail_bound = f.tail_mass(n);
  return out;
}

std::uint64_t plateau_length(const ProbVector& d) { return plateau_of_sorted_runs(d.runs()); }

std::uint64_t plateau_length(std::span<const double> masses) {
  std::vector<MassRun> runs;
  runs.reserve(masses.size());
  for (double m : masses) {
    require(std::isfinite(m) && m > 0.0, "masses must be strictly positive");
    runs.push_back({m, 1});
  }
  sort_and_merge(runs);
  return plateau_of_sorted_runs(runs);
}

std::uint64_t plateau_length(const CountableFamily& f, std::uint64_t n_terms) {
  require(n_terms >= 1, "plateau length of an empty truncation");
  if (!f.adequate_for_plateau(n_terms))
    fail(Errc::insufficient_truncation,
         "first " + std::to_string(n_terms) + " atoms do not determine the plateau length");
  std::vector<double> m;
  m.reserve(n_terms);
  for (std::uint64_t i = 1; i <= n_terms; ++i) m.push_back(f.term(i));
  return plateau_length(m);
}

ProbVector doubling_operator(const ProbVector& d) {
  std::vector<MassRun> runs(d.runs().begin(), d.runs().end());
  for (auto& r : runs) {
    require(r.count <= std::numeric_limits<std::uint64_t>::max() / 2, "support size overflow");
    r.mass *= 0.5;
    r.count *= 2;
  }
  return ProbVector::from_runs(std::move(runs));
}

}  // namespace mmass
