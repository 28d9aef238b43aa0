#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mmass {

/// Tolerance on |sum(p) - 1| accepted by ProbVector without normalization.
inline constexpr double kSumTolerance = 1e-12;

/// Largest support size that masses() or the samplers will expand.
inline constexpr std::uint64_t kMaxExpandedSupport = std::uint64_t{1} << 26;

/// `count` atoms that all carry `mass`.
struct MassRun {
  double mass = 0.0;
  std::uint64_t count = 0;

  friend bool operator==(const MassRun&, const MassRun&) = default;
};

/// Finite probability distribution with full support.
///
/// Atoms are stored as runs of equal mass sorted by increasing mass, so that
/// the p_1 <= p_2 <= ... <= p_n convention holds and repeated halving (the
/// doubling operator) stays O(#runs) regardless of how many atoms it creates.
/// Construction rejects zero or negative masses and totals off by more than
/// kSumTolerance unless `normalize` is set.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> masses, bool normalize = false);

  static ProbVector from_runs(std::vector<MassRun> runs, bool normalize = false);
  static ProbVector uniform(std::uint64_t n);
  static ProbVector point_mass() { return uniform(1); }

  std::span<const MassRun> runs() const noexcept { return runs_; }
  std::uint64_t size() const noexcept { return size_; }
  std::size_t distinct() const noexcept { return runs_.size(); }
  double min_mass() const noexcept { return runs_.front().mass; }
  double max_mass() const noexcept { return runs_.back().mass; }
  double total() const noexcept;

  /// Expanded nondecreasing mass list; throws if size() > kMaxExpandedSupport.
  std::vector<double> masses() const;

  friend bool operator==(const ProbVector&, const ProbVector&) = default;

 private:
  ProbVector() = default;
  void canonicalize(bool normalize);

  std::vector<MassRun> runs_;
  std::uint64_t size_ = 0;
};

/// Countable distribution over N given by a mass function and a certified
/// bound on the mass beyond any prefix. The set of families is closed:
/// a family must know its own tail.
class CountableFamily {
 public:
  enum class Kind { geometric, dyadic_blocks, explicit_terms };

  /// p_i = (1-q) q^{i-1}, tail_mass(N) = q^N.
  static CountableFamily geometric(double ratio);
  /// Block k = 1, 2, ... holds `a` atoms of mass 1/(2^k a).
  static CountableFamily dyadic_blocks(std::uint64_t a);
  /// Explicit prefix of masses followed by at most `tail_after` further mass.
  static CountableFamily explicit_terms(std::vector<double> terms, double tail_after = 0.0);
  static CountableFamily from_finite(const ProbVector& d);

  Kind kind() const noexcept { return kind_; }
  std::string name() const;
  double ratio() const noexcept { return ratio_; }
  std::uint64_t block_size() const noexcept { return block_; }
  std::span<const double> terms() const noexcept { return terms_; }
  double tail_after() const noexcept { return tail_after_; }

  /// Mass of atom i (1-based).
  double term(std::uint64_t i) const;
  /// Upper bound on sum_{i > n} p_i.
  double tail_mass(std::uint64_t n) const;

  /// Whether the first n atoms determine the family's plateau length.
  bool adequate_for_plateau(std::uint64_t n) const;

 private:
  CountableFamily() = default;

  Kind kind_ = Kind::geometric;
  double ratio_ = 0.5;
  std::uint64_t block_ = 0;
  std::vector<double> terms_;
  std::vector<double> suffix_;  // suffix_[i] = sum of terms_[i..] + tail_after_
  double tail_after_ = 0.0;
};

/// Finite prefix of a CountableFamily plus the bound on everything dropped.
struct Truncation {
  std::vector<double> masses;  // family index order
  double tail_bound = 0.0;
};

/// Smallest prefix whose tail bound is <= tol.
Truncation truncate(const CountableFamily& f, double tol);

/// sup over alpha of |{i : alpha/2 <= p_i < alpha}|, evaluated at the
/// breakpoints alpha = 2 p_j.
std::uint64_t plateau_length(const ProbVector& d);

/// Plateau length of the first `n_terms` atoms. Geometric and dyadic families
/// are self-similar, so any prefix holding one full band is adequate; explicit
/// families need tail_mass(n_terms) below the smallest retained mass.
std::uint64_t plateau_length(const CountableFamily& f, std::uint64_t n_terms);

/// Plateau length of a plain mass list (any order).
std::uint64_t plateau_length(std::span<const double> masses);

/// Every atom of mass p becomes two atoms of mass p/2.
ProbVector doubling_operator(const ProbVector& d);

}  // namespace mmass
