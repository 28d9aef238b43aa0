#include "mmass/constructions.hpp"

#include <cmath>

#include "mmass/error.hpp"
#include "mmass/mass.hpp"

namespace mmass {

namespace {

// Smallest equal split of `total` whose atoms stay strictly below `cap`.
RateBlock fine_block(std::uint64_t horizon, double total, double cap) {
  RateBlock b;
  b.horizon = horizon;
  b.cap = cap;
  b.count = static_cast<std::uint64_t>(std::floor(total / cap)) + 1;
  b.mass = total / static_cast<double>(b.count);
  while (b.mass >= cap) {
    ++b.count;
    b.mass = total / static_cast<double>(b.count);
  }
  return b;
}

bool dominates(const ProbVector& d, std::span<const double> r) {
  for (std::size_t i = 0; i < r.size(); ++i)
    if (!(expected_missing_mass(d, i + 1) > r[i])) return false;
  return true;
}

}  // namespace

ProbVector tight_finite(std::uint64_t n, std::uint64_t t) {
  require(n >= 2, "tight_finite needs n >= 2");
  require(t > n, "tight_finite needs t > n");
  const double x = 1.0 / (static_cast<double>(t) + 1.0);
  return ProbVector::from_runs({{x, n - 1}, {1.0 - static_cast<double>(n - 1) * x, 1}});
}

CountableFamily tight_countable(std::uint64_t a) {
  require(a >= 2, "tight_countable needs a >= 2");
  return CountableFamily::dyadic_blocks(a);
}

RateConstruction rate_lb(std::span<const double> r, std::uint64_t max_doublings) {
  require(!r.empty(), "target sequence is empty");
  require(r[0] < 1.0, "target sequence must start below 1");
  for (std::size_t i = 0; i < r.size(); ++i) {
    require(std::isfinite(r[i]) && r[i] > 0.0, "target sequence must be positive");
    if (i > 0) require(r[i] < r[i - 1], "target sequence must be strictly decreasing");
  }
  const std::uint64_t horizon = r.size();
  auto r_at = [&](std::uint64_t t) { return r[t - 1]; };

  std::uint64_t tau = 0;
  for (std::uint64_t t = 11; t <= horizon; ++t) {
    if (r_at(t) < 0.9) {
      tau = t;
      break;
    }
  }
  require(tau != 0, "horizon must reach some t > 10 with r_t < 0.9");

  RateConstruction out{ProbVector::point_mass(), tau, 0, {}};
  out.blocks.push_back({0, 1.0 - r_at(tau), 1, 1.0});
  for (std::uint64_t t = tau + 1; t <= horizon; ++t) {
    const double cap = 1.0 / ((static_cast<double>(t) + 1.0) * (static_cast<double>(t) + 1.0));
    out.blocks.push_back(fine_block(t, r_at(t - 1) - r_at(t), cap));
  }
  {
    const double h = static_cast<double>(horizon) + 1.0;
    out.blocks.push_back(fine_block(horizon, r_at(horizon), 1.0 / (h * h)));
  }

  std::vector<MassRun> runs;
  runs.reserve(out.blocks.size());
  for (const auto& b : out.blocks) runs.push_back({b.mass, b.count});
  ProbVector d = ProbVector::from_runs(std::move(runs));

  for (std::uint64_t k = 0;; ++k) {
    if (dominates(d, r)) {
      out.distribution = std::move(d);
      out.doublings = k;
      return out;
    }
    if (k == max_doublings)
      fail(Errc::construction_failed,
           "no dominating distribution within " + std::to_string(max_doublings) + " doublings");
    d = doubling_operator(d);
  }
}

std::vector<double> inverse_log_sequence(std::uint64_t t_max) {
  std::vector<double> r(t_max);
  for (std::uint64_t t = 1; t <= t_max; ++t) r[t - 1] = 1.0 / std::log(static_cast<double>(t) + 2.0);
  return r;
}

std::vector<double> geometric_sequence(std::uint64_t t_max, double scale, double ratio) {
  require(scale > 0.0 && ratio > 0.0 && ratio < 1.0, "geometric sequence needs scale > 0, ratio in (0,1)");
  std::vector<double> r(t_max);
  for (std::uint64_t t = 1; t <= t_max; ++t) r[t - 1] = scale * std::pow(ratio, static_cast<double>(t));
  return r;
}

}  // namespace mmass
