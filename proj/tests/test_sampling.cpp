#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "mmass/constructions.hpp"
#include "mmass/mass.hpp"
#include "mmass/sampling.hpp"
#include "support.hpp"

using namespace mmass;
using support::code_of;

TEST_CASE("draw_sample examples") {
  const auto pm = draw_sample(ProbVector::point_mass(), 7, 1);
  CHECK(pm.counts == std::vector<std::uint64_t>{7});
  CHECK(pm.t == 7);

  const std::uint64_t t = 1000000;
  const auto two = draw_sample(ProbVector::uniform(2), t, 2);
  REQUIRE(two.counts.size() == 2);
  CHECK(two.counts[0] + two.counts[1] == t);
  for (auto c : two.counts) CHECK(std::fabs(static_cast<double>(c) - t / 2.0) <= 5.0 * std::sqrt(t * 0.25));

  const auto a = draw_sample(ProbVector({0.1, 0.2, 0.7}), 500, 99);
  const auto b = draw_sample(ProbVector({0.1, 0.2, 0.7}), 500, 99);
  CHECK(a.counts == b.counts);
  const auto c = draw_sample(ProbVector({0.1, 0.2, 0.7}), 500, 100);
  CHECK(a.counts != c.counts);
  CHECK(code_of([] { draw_sample(ProbVector::uniform(2), 0, 0); }) == Errc::invalid_input);
}

TEST_CASE("sampler frequencies follow the masses") {
  const ProbVector d({0.05, 0.15, 0.3, 0.5});
  const auto sc = draw_sample(d, 400000, 7);
  const auto m = d.masses();
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double sd = std::sqrt(400000 * m[i] * (1 - m[i]));
    CHECK(std::fabs(static_cast<double>(sc.counts[i]) - 400000 * m[i]) <= 5 * sd);
  }
  CHECK(CategoricalSampler::unit_uniform(0) == 0.0);
  CHECK(CategoricalSampler::unit_uniform(~std::uint64_t{0}) < 1.0);
}

TEST_CASE("empirical missing mass examples") {
  const auto d = ProbVector::uniform(2);
  CHECK(empirical_missing_mass(d, SampleCounts{3, {1, 2}, "", 0}) == 0.0);
  CHECK(empirical_missing_mass(d, SampleCounts{3, {3, 0}, "", 0}) == 0.5);
  CHECK(code_of([&] { empirical_missing_mass(d, SampleCounts{3, {3}, "", 0}); }) == Errc::invalid_input);
}

TEST_CASE("good_turing examples") {
  CHECK(good_turing(SampleCounts{4, {1, 1, 2}, "", 0}) == 0.5);
  CHECK(good_turing(SampleCounts{3, {3}, "", 0}) == 0.0);
  CHECK(good_turing(SampleCounts{3, {1, 1, 1}, "", 0}) == 1.0);
}

TEST_CASE("replicate means converge to the closed forms") {
  const auto d = tight_finite(6, 20);
  const std::uint64_t t = 20, reps = 100000;
  const auto table = run_replicates(reps, 5, 2, [&](std::mt19937_64& gen, std::span<double> out) {
    const CategoricalSampler s(d);
    SampleCounts sc{t, std::vector<std::uint64_t>(s.size(), 0), "", 0};
    for (std::uint64_t i = 0; i < t; ++i) ++sc.counts[s(gen)];
    out[0] = empirical_missing_mass(d, sc);
    out[1] = good_turing(sc);
  });
  const auto u = column_estimate(table, 2, 0);
  const auto g = column_estimate(table, 2, 1);
  CHECK(std::fabs(u.mean - expected_missing_mass(d, t)) <= 4 * u.std_error);
  CHECK(std::fabs(g.mean - gt_expected_estimate(d, t)) <= 4 * g.std_error);
}

TEST_CASE("verify_bias examples") {
  const auto r = verify_bias(ProbVector::uniform(2), 2, 100000, 1);
  CHECK(*r.reference == 0.25);
  CHECK(*r.within_3se);
  CHECK(r.replicates == 100000);
  CHECK(r.seed == 1);

  const auto pm = verify_bias(ProbVector::point_mass(), 9, 1000, 1);
  CHECK(pm.estimate == 0.0);
  CHECK(pm.std_error == 0.0);
  CHECK(*pm.within_3se);

  const auto u50 = verify_bias(ProbVector::uniform(50), 100, 100000, 3);
  const double ref = 50 * 0.02 * 0.02 * std::pow(0.98, 99);
  CHECK(*u50.reference == doctest::Approx(ref).epsilon(1e-12));
  CHECK(*u50.within_3se);

  CHECK(code_of([] { verify_bias(ProbVector::uniform(2), 2, 999, 1); }) == Errc::invalid_input);
}

TEST_CASE("verify_concentration examples") {
  const auto d = ProbVector::uniform(20);
  const auto a = verify_concentration(d, 100, 0.1, 100000, 4);
  CHECK(*a.bound == doctest::Approx(2 * std::exp(-1.0)).epsilon(1e-15));
  CHECK(!*a.violated);
  CHECK(*a.exceed_freq <= *a.bound);

  const auto b = verify_concentration(d, 100, 0.3, 100000, 4);
  CHECK(*b.bound == doctest::Approx(2.47e-4).epsilon(1e-2));
  CHECK(!*b.violated);

  const auto c = verify_concentration(d, 100, 1.0, 10000, 4);
  CHECK(*c.exceed_freq == 0.0);
  CHECK(!*c.violated);

  CHECK(code_of([&] { verify_concentration(d, 10, 0.0, 10000, 1); }) == Errc::invalid_input);
  CHECK(code_of([&] { verify_concentration(d, 10, 1.5, 10000, 1); }) == Errc::invalid_input);
  CHECK(code_of([&] { verify_concentration(d, 10, 0.1, 9999, 1); }) == Errc::invalid_input);
}

TEST_CASE("reports are reproducible and independent of worker count") {
  const auto d = ProbVector({0.1, 0.2, 0.3, 0.4});
  const auto one = verify_concentration(d, 15, 0.1, 20000, 77, 1);
  const auto four = verify_concentration(d, 15, 0.1, 20000, 77, 4);
  const auto again = verify_concentration(d, 15, 0.1, 20000, 77, 3);
  CHECK(one.estimate == four.estimate);
  CHECK(one.std_error == four.std_error);
  CHECK(*one.exceed_freq == *four.exceed_freq);
  CHECK(one.estimate == again.estimate);
  CHECK(verify_bias(d, 5, 5000, 3, 1).estimate == verify_bias(d, 5, 5000, 3, 7).estimate);
}

TEST_CASE("substream seeds differ across indices and seeds") {
  CHECK(substream_seed(0, 0) != substream_seed(0, 1));
  CHECK(substream_seed(0, 0) != substream_seed(1, 0));
  CHECK(substream_seed(5, 9) == substream_seed(5, 9));
}

TEST_CASE("MML_THREADS caps the default worker count") {
  ::setenv("MML_THREADS", "3", 1);
  CHECK(default_threads() == 3);
  ::unsetenv("MML_THREADS");
  CHECK(default_threads() >= 1);
}
