#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pemu/fit.hpp"
#include "testutil.hpp"

using namespace pemu;

namespace {

// data generated from planted coefficients; the oracle for every recovery test
std::vector<CharacterizationSample> planted_samples(
    const std::vector<double>& coeffs, const std::vector<std::vector<std::uint8_t>>& ts,
    test::Rng* noise_rng = nullptr, double noise = 0) {
  std::vector<CharacterizationSample> samples;
  for (const auto& t : ts) {
    CharacterizationSample s;
    s.transitions = t;
    for (std::size_t i = 0; i < t.size(); ++i)
      if (t[i]) s.power += coeffs[i];
    if (noise_rng) s.power += (noise_rng->uniform() * 2 - 1) * noise;
    if (s.power < 0) s.power = 0;
    samples.push_back(std::move(s));
  }
  return samples;
}

std::vector<std::vector<std::uint8_t>> full_rank_vectors(test::Rng& rng, unsigned n,
                                                         std::size_t extra) {
  std::vector<std::vector<std::uint8_t>> ts;
  for (unsigned i = 0; i < n; ++i) {
    std::vector<std::uint8_t> unit(n, 0);
    unit[i] = 1;
    ts.push_back(std::move(unit));
  }
  for (std::size_t e = 0; e < extra; ++e) {
    std::vector<std::uint8_t> v(n);
    for (unsigned i = 0; i < n; ++i) v[i] = rng.chance(0.5);
    ts.push_back(std::move(v));
  }
  return ts;
}

}  // namespace

TEST_CASE("exact data recovers the planted coefficients") {
  std::vector<std::vector<std::uint8_t>> all4 = {{0, 0}, {0, 1}, {1, 0}, {1, 1}};
  auto samples = planted_samples({2.0, 7.0}, all4);
  FitResult fit = fit_macromodel(samples);
  CHECK(fit.coeffs[0] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(fit.coeffs[1] == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(fit.residual_rms <= 1e-12);
  CHECK(fit.warnings.empty());
}

TEST_CASE("noiseless planted data reproduces every sample power") {
  test::Rng rng(11);
  for (int iter = 0; iter < 20; ++iter) {
    unsigned n = rng.range(2, 32);
    std::vector<double> planted;
    for (unsigned i = 0; i < n; ++i) planted.push_back(rng.uniform() * 3);
    auto samples = planted_samples(planted, full_rank_vectors(rng, n, n));
    FitResult fit = fit_macromodel(samples);
    for (const CharacterizationSample& s : samples) {
      double predicted = 0;
      for (unsigned i = 0; i < n; ++i)
        if (s.transitions[i]) predicted += fit.coeffs[i];
      CHECK(std::fabs(predicted - s.power) <= 1e-9);
    }
  }
}

TEST_CASE("rank deficiency is reported with the dependent columns") {
  SUBCASE("all-zero transition vectors carry no information") {
    std::vector<CharacterizationSample> samples(4);
    for (auto& s : samples) s.transitions.assign(3, 0);
    CHECK_THROWS_WITH_AS(fit_macromodel(samples),
                         doctest::Contains("rank deficiency"), Error);
  }
  SUBCASE("duplicated column is flagged") {
    // column 1 always equals column 0
    std::vector<std::vector<std::uint8_t>> ts = {{1, 1, 0}, {1, 1, 1}, {0, 0, 1},
                                                 {1, 1, 0}, {0, 0, 0}};
    auto samples = planted_samples({1.0, 1.0, 2.0}, ts);
    CHECK_THROWS_WITH_AS(fit_macromodel(samples), doctest::Contains("column 1"),
                         Error);
  }
}

TEST_CASE("fewer samples than coefficients") {
  std::vector<CharacterizationSample> samples(3);
  for (auto& s : samples) s.transitions.assign(4, 1);
  CHECK_THROWS_WITH_AS(fit_macromodel(samples), doctest::Contains("fewer samples"),
                       Error);
}

TEST_CASE("noisy recovery within 1e-2") {
  test::Rng rng(1234);
  const unsigned n = 8;
  std::vector<double> planted;
  for (unsigned i = 0; i < n; ++i) planted.push_back(rng.uniform() * 2);
  auto ts = full_rank_vectors(rng, n, 1000 - n);
  auto samples = planted_samples(planted, ts, &rng, 1e-3);
  FitResult fit = fit_macromodel(samples);
  for (unsigned i = 0; i < n; ++i)
    CHECK(std::fabs(fit.coeffs[i] - planted[i]) <= 1e-2);
  CHECK(fit.residual_rms <= 1e-3);
}

TEST_CASE("negative solution clamps to zero, residual reported unclamped") {
  // power = 5*t0 - 1*t1 fits these exactly; t1 never fires alone so power >= 0
  std::vector<CharacterizationSample> samples;
  samples.push_back({{1, 0}, 5.0});
  samples.push_back({{1, 1}, 4.0});
  samples.push_back({{0, 0}, 0.0});
  FitResult fit = fit_macromodel(samples);
  CHECK(fit.raw_coeffs[0] == doctest::Approx(5.0));
  CHECK(fit.raw_coeffs[1] == doctest::Approx(-1.0));
  CHECK(fit.coeffs[1] == 0.0);
  REQUIRE(fit.warnings.size() == 1);
  CHECK(fit.warnings[0].find("clamped") != std::string::npos);
  CHECK(fit.residual_rms <= 1e-12);  // over the unclamped solution
}

TEST_CASE("samples csv round trip and rejections") {
  std::vector<CharacterizationSample> samples = {{{1, 0, 1}, 2.25},
                                                 {{0, 0, 0}, 0.0}};
  std::string csv = write_samples_csv(samples, {"a[0]", "a[1]", "y[0]"});
  auto parsed = parse_samples_csv(csv);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].transitions == samples[0].transitions);
  CHECK(parsed[0].power == doctest::Approx(2.25));

  CHECK_THROWS_WITH_AS(parse_samples_csv("a,power\n2,1.0\n"),
                       doctest::Contains("not 0/1"), Error);
  CHECK_THROWS_WITH_AS(parse_samples_csv("a,power\n1,-1.0\n"),
                       doctest::Contains("negative power"), Error);
  CHECK_THROWS_WITH_AS(parse_samples_csv("a,b\n"), doctest::Contains("power column"),
                       Error);
  CHECK_THROWS_WITH_AS(parse_samples_csv("a,power\n1\n"),
                       doctest::Contains("columns"), Error);
}
