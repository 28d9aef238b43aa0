#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "mmass/constructions.hpp"
#include "mmass/dist.hpp"
#include "mmass/error.hpp"
#include "mmass/numeric.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace mmass;

using support::code_of;

TEST_CASE("compensated sum recovers cancelled low-order bits") {
  std::vector<double> v{1.0, 1e100, 1.0, -1e100};
  CHECK(compensated_sum(v) == 2.0);
  CompensatedSum s;
  for (int i = 0; i < 10; ++i) s += 0.1;
  CHECK(s.value() == doctest::Approx(1.0).epsilon(1e-16));
}

TEST_CASE("pow_one_minus policy") {
  CHECK(pow_one_minus(0.3, 0) == 1.0);
  CHECK(pow_one_minus(1.0, 5) == 0.0);
  CHECK(pow_one_minus(0.5, 3) == 0.125);
  CHECK(pow_one_minus(0.1, 1000) == doctest::Approx(std::pow(0.9, 1000)).epsilon(1e-13));
  CHECK(pow_one_minus(1e-12, 1e6) == doctest::Approx(std::exp(-1e-6)).epsilon(1e-15));
  CHECK(pow_nonneg(0.0, 3) == 0.0);
  CHECK(pow_nonneg(2.0, 10) == 1024.0);
}

TEST_CASE("ProbVector validation and canonical order") {
  const ProbVector d({0.5, 0.2, 0.3});
  const auto m = d.masses();
  CHECK(std::is_sorted(m.begin(), m.end()));
  CHECK(d.size() == 3);
  CHECK(d.min_mass() == 0.2);
  CHECK(d.max_mass() == 0.5);

  CHECK(code_of([] { ProbVector({0.5, 0.4}); }) == Errc::invalid_input);
  CHECK(code_of([] { ProbVector({1.0, 0.0}); }) == Errc::invalid_input);
  CHECK(code_of([] { ProbVector({-0.5, 1.5}); }) == Errc::invalid_input);
  CHECK(code_of([] { ProbVector(std::vector<double>{}); }) == Errc::invalid_input);
  CHECK(code_of([] { ProbVector({std::nan(""), 1.0}); }) == Errc::invalid_input);

  const ProbVector n({2.0, 6.0}, true);
  CHECK(n.min_mass() == 0.25);
  CHECK(n.max_mass() == 0.75);
}

TEST_CASE("runs: zero count is rejected, equal masses merge") {
  CHECK(code_of([] { ProbVector::from_runs({{0.5, 2}, {0.1, 0}}); }) == Errc::invalid_input);
  const auto d = ProbVector::from_runs({{0.25, 2}, {0.125, 2}, {0.25, 1}}, true);
  CHECK(d.distinct() == 2);
  CHECK(d.size() == 5);
  CHECK(d.total() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("plateau length examples") {
  CHECK(plateau_length(ProbVector::uniform(5)) == 5);
  std::vector<double> dyadic;
  for (int i = 1; i <= 40; ++i) dyadic.push_back(std::ldexp(1.0, -i));
  CHECK(plateau_length(dyadic) == 1);
  CHECK(oracle::plateau_scan(dyadic) == 1);
  CHECK(plateau_length(CountableFamily::geometric(0.5), 40) == 1);
  const auto f3 = tight_countable(3);
  CHECK(plateau_length(f3, truncate(f3, 1e-9).masses.size()) == 3);
  CHECK(plateau_length(ProbVector::point_mass()) == 1);
}

TEST_CASE("plateau length agrees with a dense alpha scan") {
  std::mt19937_64 gen(11);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + gen() % 40;
    auto p = oracle::random_simplex(n, gen, rep % 2 ? 1.0 : 0.3);
    CHECK(plateau_length(p) == oracle::plateau_scan(p));
  }
}

TEST_CASE("plateau length properties") {
  std::mt19937_64 gen(5);
  for (std::uint64_t n = 1; n <= 60; ++n) CHECK(plateau_length(ProbVector::uniform(n)) == n);
  for (int rep = 0; rep < 100; ++rep) {
    auto p = oracle::random_simplex(2 + gen() % 30, gen);
    const auto ell = plateau_length(p);
    auto shuffled = p;
    std::shuffle(shuffled.begin(), shuffled.end(), gen);
    CHECK(plateau_length(shuffled) == ell);
    const ProbVector d(p, true);
    CHECK(plateau_length(doubling_operator(d)) >= plateau_length(d));
  }
}

TEST_CASE("plateau length of a truncation needs an adequate prefix") {
  const auto f = CountableFamily::explicit_terms({0.5, 0.25, 0.125}, 0.125);
  CHECK(code_of([&] { plateau_length(f, 3); }) == Errc::insufficient_truncation);
  CHECK(code_of([&] { plateau_length(CountableFamily::geometric(0.9), 3); }) == Errc::insufficient_truncation);
  CHECK(plateau_length(CountableFamily::geometric(0.9), 50) == 7);
  CHECK(oracle::plateau_scan([] {
          std::vector<double> v;
          for (int i = 0; i < 400; ++i) v.push_back(0.1 * std::pow(0.9, i));
          return v;
        }()) == 7);
}

TEST_CASE("doubling operator examples") {
  CHECK(doubling_operator(ProbVector::point_mass()).masses() == std::vector<double>{0.5, 0.5});
  CHECK(doubling_operator(ProbVector::uniform(2)).masses() == std::vector<double>{0.25, 0.25, 0.25, 0.25});
  CHECK(doubling_operator(ProbVector({0.25, 0.75})).masses() == std::vector<double>{0.125, 0.125, 0.375, 0.375});
}

TEST_CASE("doubling preserves total mass") {
  std::mt19937_64 gen(9);
  for (int rep = 0; rep < 50; ++rep) {
    ProbVector d(oracle::random_simplex(1 + gen() % 20, gen), true);
    for (int k = 0; k < 30; ++k) d = doubling_operator(d);
    CHECK(std::fabs(d.total() - 1.0) <= 1e-15);
    CHECK(d.size() % (1u << 30) == 0);
  }
}

TEST_CASE("truncation examples") {
  const auto g = truncate(CountableFamily::geometric(0.5), 1e-6);
  CHECK(g.masses.size() == 20);
  CHECK(g.tail_bound == std::ldexp(1.0, -20));

  const auto one = truncate(CountableFamily::explicit_terms({1.0}), 0.5);
  CHECK(one.masses == std::vector<double>{1.0});
  CHECK(one.tail_bound == 0.0);

  const auto d = truncate(tight_countable(2), std::ldexp(1.0, -10));
  CHECK(d.masses.size() == 20);
  CHECK(d.tail_bound == std::ldexp(1.0, -10));
  CHECK(d.masses.front() == 0.25);
  CHECK(d.masses.back() == std::ldexp(1.0, -11));

  CHECK(code_of([] { truncate(CountableFamily::geometric(0.5), 0.0); }) == Errc::invalid_input);
  CHECK(code_of([] { truncate(CountableFamily::geometric(0.5), -1.0); }) == Errc::invalid_input);
}

TEST_CASE("countable family tail bounds are consistent") {
  for (const auto& f : {CountableFamily::geometric(0.3), CountableFamily::geometric(0.95), tight_countable(3),
                        tight_countable(7), CountableFamily::explicit_terms({0.4, 0.3, 0.2}, 0.1)}) {
    double head = 0.0;
    double prev = f.tail_mass(0);
    CHECK(prev >= 1.0 - 1e-12);
    for (std::uint64_t n = 1; n <= 60; ++n) {
      head += f.term(n);
      const double tail = f.tail_mass(n);
      CHECK(tail <= prev);
      CHECK(head <= 1.0 + 1e-12);
      CHECK(head + tail >= 1.0 - 1e-12);
      prev = tail;
    }
  }
}

TEST_CASE("explicit family rejects inconsistent tails") {
  CHECK(code_of([] { CountableFamily::explicit_terms({0.5, 0.2}, 0.1); }) == Errc::invalid_input);
  CHECK(code_of([] { CountableFamily::explicit_terms({0.7, 0.6}); }) == Errc::invalid_input);
  CHECK(code_of([] { CountableFamily::geometric(1.0); }) == Errc::invalid_input);
  CHECK(code_of([] { truncate(CountableFamily::explicit_terms({0.5, 0.25}, 0.25), 0.1); }) ==
        Errc::insufficient_truncation);
}
