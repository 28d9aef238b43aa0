#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mmass/constructions.hpp"
#include "mmass/mass.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mmass;
using support::code_of;

namespace {

constexpr double kE = std::numbers::e;

bool rel_close(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(std::fabs(b), 1e-300); }

}  // namespace

TEST_CASE("expected missing mass examples") {
  CHECK(expected_missing_mass(ProbVector::uniform(2), 1) == 0.5);
  CHECK(expected_missing_mass(ProbVector::point_mass(), 5) == 0.0);
  // 9^10 / 10^10 in integer arithmetic.
  std::uint64_t num = 1, den = 1;
  for (int i = 0; i < 10; ++i) num *= 9, den *= 10;
  const double exact = static_cast<double>(num) / static_cast<double>(den);
  CHECK(rel_close(expected_missing_mass(ProbVector::uniform(10), 10), exact, 1e-14));
}

TEST_CASE("t = 0 needs the explicit flag") {
  CHECK(code_of([] { expected_missing_mass(ProbVector::uniform(3), 0); }) == Errc::invalid_input);
  CHECK(expected_missing_mass(ProbVector::uniform(3), 0, true) == 1.0);
}

TEST_CASE("expected missing mass matches the long double oracle") {
  std::mt19937_64 gen(21);
  for (int rep = 0; rep < 300; ++rep) {
    const auto p = oracle::random_simplex(1 + gen() % 60, gen, rep % 3 ? 1.0 : 0.2);
    const ProbVector d(p, true);
    for (std::uint64_t t : {1u, 2u, 7u, 63u, 64u, 65u, 500u, 5000u}) {
      const double ref = static_cast<double>(oracle::emm(d.masses(), t));
      CHECK(std::fabs(expected_missing_mass(d, t) - ref) <= 1e-13 * std::max(ref, 1e-3));
    }
  }
}

TEST_CASE("expected missing mass properties") {
  std::mt19937_64 gen(33);
  for (int rep = 0; rep < 1000; ++rep) {
    const std::size_t n = 1 + gen() % 50;
    const ProbVector d(oracle::random_simplex(n, gen, rep % 2 ? 1.0 : 0.25), true);
    const std::uint64_t t = 1 + gen() % 500;
    const double e = expected_missing_mass(d, t);
    CHECK(e >= 0.0);
    CHECK(e <= bound_finite(n, t) + 1e-12);
    CHECK(expected_missing_mass(d, t + 1) <= e);
    CHECK(e <= trivial_bound(d, t) + 1e-15);
    CHECK(std::fabs(gt_bias(d, t) - singleton_mass_expectation(d, t) / static_cast<double>(t)) <= 1e-12);
  }
}

TEST_CASE("kernel examples") {
  for (double t : {1.0, 5.0, 100.0}) {
    CHECK(kernel_f(0.0, t) == 0.0);
    CHECK(kernel_f(1.0, t) == 0.0);
  }
  for (double t : {1.0, 10.0, 100.0}) CHECK(kernel_f(1.0 / (t + 1.0), t) < 1.0 / (kE * t));
  for (double t : {2.0, 10.0, 100.0}) {
    const double fmin = kernel_f_prime(2.0 / (t + 1.0), t);
    for (int i = 0; i <= 1000; ++i) CHECK(kernel_f_prime(i / 1000.0, t) >= fmin - 1e-15);
  }
  CHECK(code_of([] { kernel_f(1.5, 3); }) == Errc::invalid_input);
}

TEST_CASE("kernel unimodal at 1/(t+1)") {
  for (double t : {1.0, 3.0, 50.0, 1000.0}) {
    const double peak = 1.0 / (t + 1.0);
    CHECK(kernel_f(peak, t) >= kernel_f(peak * 0.99, t));
    CHECK(kernel_f(peak, t) >= kernel_f(peak * 1.01, t));
    CHECK(std::fabs(kernel_f_prime(peak, t)) <= 1e-15);
  }
}

TEST_CASE("kernel derivative agrees with finite differences") {
  for (int t = 1; t <= 100; t += 3) {
    for (int i = 1; i <= 99; ++i) {
      const double x = i / 100.0;
      const long double h = 1e-5L * std::min(x, 1.0 - x) / (t + 1);
      const auto f = [t](long double y) { return y * std::pow(1.0L - y, static_cast<long double>(t)); };
      const double fd = static_cast<double>(oracle::central_difference(f, x, h));
      const double an = kernel_f_prime(x, t);
      // Relative to max(|f'|, f) so the critical point does not divide by zero.
      CHECK(std::fabs(an - fd) <= 1e-6 * std::max(std::fabs(an), kernel_f(x, t)));
    }
  }
}

TEST_CASE("bound evaluators") {
  CHECK(bound_finite(10, 5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-15));
  CHECK(bound_finite(10, 100) == doctest::Approx(10.0 / (100.0 * kE)).epsilon(1e-15));
  CHECK(bound_finite(1, 1) == doctest::Approx(1.0 / kE).epsilon(1e-15));
  CHECK(expected_missing_mass(ProbVector::point_mass(), 1) <= bound_finite(1, 1));
  CHECK(bound_finite(3, 1) <= 1.0);

  CHECK(bound_countable(1, 10, 1.0) == doctest::Approx(0.1));
  CHECK(bound_countable(7, 7, 1.0) == 1.0);
  CHECK(code_of([] { bound_countable(1, 1, 0.0); }) == Errc::invalid_input);
  CHECK(code_of([] { bound_countable(1, 1, -2.0); }) == Errc::invalid_input);

  const auto iv = expected_missing_mass(tight_countable(4), 100, 1e-13);
  CHECK(iv.lower >= 16.0 / (27.0 * 100.0));
  CHECK(iv.upper <= bound_countable(4, 100));
}

TEST_CASE("dyadic band decomposition") {
  {
    const auto d = ProbVector::uniform(4);
    const auto bands = dyadic_band_decomposition(d, 3);
    REQUIRE(bands.size() == 1);
    CHECK(bands[0].index == 0);
    CHECK(bands[0].count == 4);
    CHECK(bands[0].contribution == expected_missing_mass(d, 3));
  }
  {
    const auto bands = dyadic_band_decomposition(ProbVector::point_mass(), 8);
    REQUIRE(bands.size() == 1);
    CHECK(bands[0].contribution == 0.0);
  }
  {
    const auto bands = dyadic_band_decomposition(ProbVector::uniform(100), 9);
    REQUIRE(bands.size() == 1);
    CHECK(bands[0].index == -1);
    CHECK(bands[0].count == 100);
  }
  std::mt19937_64 gen(45);
  for (int rep = 0; rep < 300; ++rep) {
    const ProbVector d(oracle::random_simplex(1 + gen() % 80, gen, 0.3), true);
    const std::uint64_t t = 1 + gen() % 400;
    const auto bands = dyadic_band_decomposition(d, t);
    double sum = 0.0;
    const auto ell = plateau_length(d);
    for (const auto& b : bands) {
      sum += b.contribution;
      if (b.index >= 0) CHECK(b.count <= ell);
    }
    CHECK(std::fabs(sum - expected_missing_mass(d, t)) <= 1e-12);
  }
}

TEST_CASE("band membership at exact powers of two") {
  // 1/4 = 2/(t+1) at t = 7.
  const ProbVector d = ProbVector::uniform(4);
  const auto bands = dyadic_band_decomposition(d, 7);
  REQUIRE(bands.size() == 1);
  CHECK(bands[0].index == 1);
}

TEST_CASE("Good-Turing closed forms") {
  const auto u2 = ProbVector::uniform(2);
  CHECK(gt_expected_estimate(u2, 2) == 0.5);
  CHECK(expected_missing_mass(u2, 2) == 0.25);
  CHECK(singleton_mass_expectation(u2, 2) == 0.5);
  CHECK(gt_bias(u2, 2) == 0.25);

  const auto pm = ProbVector::point_mass();
  CHECK(gt_expected_estimate(pm, 3) == 0.0);
  CHECK(gt_bias(pm, 3) == 0.0);

  const auto u3 = ProbVector::uniform(3);
  CHECK(gt_expected_estimate(u3, 1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(expected_missing_mass(u3, 1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(singleton_mass_expectation(u3, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(std::fabs(gt_bias(u3, 1) - singleton_mass_expectation(u3, 1)) <= 1e-15);

  CHECK(code_of([&] { gt_bias(u3, 0); }) == Errc::invalid_input);
  CHECK(code_of([&] { gt_expected_estimate(u3, 0); }) == Errc::invalid_input);
}

TEST_CASE("Good-Turing closed forms match brute-force enumeration") {
  // All n^t equally likely samples for small n, t.
  for (std::uint64_t n = 1; n <= 4; ++n) {
    for (std::uint64_t t = 1; t <= 5; ++t) {
      const ProbVector d = ProbVector::uniform(n);
      std::uint64_t total = 1;
      for (std::uint64_t i = 0; i < t; ++i) total *= n;
      long double sum_gt = 0, sum_u = 0, sum_u1 = 0;
      for (std::uint64_t code = 0; code < total; ++code) {
        std::vector<int> counts(n, 0);
        for (std::uint64_t c = code, i = 0; i < t; ++i, c /= n) ++counts[c % n];
        int ones = 0, zeros = 0;
        for (int c : counts) ones += c == 1, zeros += c == 0;
        sum_gt += static_cast<long double>(ones) / t;
        sum_u += static_cast<long double>(zeros) / n;
        sum_u1 += static_cast<long double>(ones) / n;
      }
      CHECK(std::fabs(gt_expected_estimate(d, t) - static_cast<double>(sum_gt / total)) <= 1e-14);
      CHECK(std::fabs(expected_missing_mass(d, t) - static_cast<double>(sum_u / total)) <= 1e-14);
      CHECK(std::fabs(singleton_mass_expectation(d, t) - static_cast<double>(sum_u1 / total)) <= 1e-14);
    }
  }
}

TEST_CASE("countable intervals contain the series value") {
  for (double q : {0.1, 0.5, 0.9}) {
    for (double tol : {1e-3, 1e-6, 1e-12}) {
      for (std::uint64_t t : {1u, 10u, 100u, 1000u}) {
        const auto iv = expected_missing_mass(CountableFamily::geometric(q), t, tol);
        const double ref = static_cast<double>(oracle::geometric_emm(q, t));
        CHECK(iv.width() <= tol);
        CHECK(iv.lower <= ref + 1e-15);
        CHECK(ref <= iv.upper + 1e-15);
      }
    }
  }
  for (std::uint64_t a : {2u, 5u}) {
    const auto iv = expected_missing_mass(tight_countable(a), 50, 1e-12);
    const double ref = static_cast<double>(oracle::dyadic_emm(a, 50));
    CHECK(iv.lower <= ref + 1e-15);
    CHECK(ref <= iv.upper + 1e-15);
  }
}

TEST_CASE("mass curves") {
  std::vector<std::uint64_t> ts{1, 2, 5, 10, 100};
  const auto c = mass_curve(ProbVector::uniform(5), ts);
  CHECK(c.t_values == ts);
  for (std::size_t i = 0; i + 1 < ts.size(); ++i) CHECK(c.values[i + 1] <= c.values[i]);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(c.values[i] >= 0.0);
    CHECK(c.values[i] <= 1.0);
    CHECK(c.lower[i] == c.values[i]);
  }
  const auto g = mass_curve(CountableFamily::geometric(0.7), ts, 1e-9);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    CHECK(g.lower[i] <= g.values[i]);
    CHECK(g.values[i] <= g.upper[i]);
    CHECK(g.upper[i] - g.lower[i] <= 1e-9);
  }
}
