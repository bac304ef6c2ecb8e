#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "oracle.hpp"
#include "skincal/error.hpp"
#include "skincal/polyfit.hpp"

using namespace skincal;

namespace {

double rel_diff(const PolyCoeffs& a, const PolyCoeffs& b) {
  double scale = 1.0;
  for (double v : b) scale = std::max(scale, std::fabs(v));
  double worst = 0.0;
  for (int i = 0; i < kNumCoeffs; ++i)
    worst = std::max(worst, std::fabs(a[i] - b[i]) / scale);
  return worst;
}

std::vector<FitPoint> sample_poly(const PolyCoeffs& coeffs,
                                  std::span<const double> cs) {
  std::vector<FitPoint> pts;
  for (double c : cs) pts.push_back({c, evaluate_polynomial(coeffs, c)});
  return pts;
}

// Random instance with stratified abscissae: one node jittered inside each of
// k equal slices of [-1, 1], so the Vandermonde system stays comfortably
// conditioned (far below 1e6) by construction.
std::vector<FitPoint> random_instance(std::mt19937_64& rng, int k) {
  std::uniform_real_distribution<double> jitter(0.05, 0.95);
  std::uniform_real_distribution<double> up(500.0, 70000.0);
  std::vector<FitPoint> pts;
  for (int i = 0; i < k; ++i) {
    const double c = -1.0 + 2.0 * (i + jitter(rng)) / k;
    pts.push_back({c, up(rng)});
  }
  return pts;
}

}  // namespace

TEST_CASE("normalize_capacitance") {
  CHECK(normalize_capacitance(40, 40, 200) == doctest::Approx(-1.0));
  CHECK(normalize_capacitance(200, 40, 200) == doctest::Approx(1.0));
  CHECK(normalize_capacitance(120, 40, 200) == doctest::Approx(0.0));
  SUBCASE("values outside the range clamp") {
    CHECK(normalize_capacitance(20, 40, 200) == -1.0);
    CHECK(normalize_capacitance(250, 40, 200) == 1.0);
  }
  SUBCASE("degenerate range") {
    CHECK_THROWS_AS(normalize_capacitance(10, 50, 50), DegenerateRangeError);
    CHECK_THROWS_AS(normalize_capacitance(10, 60, 50), DegenerateRangeError);
  }
}

TEST_CASE("build_regressor") {
  const auto zero = build_regressor(0.0);
  CHECK(zero == std::array<double, 6>{1, 0, 0, 0, 0, 0});
  const auto one = build_regressor(1.0);
  CHECK(one == std::array<double, 6>{1, 1, 1, 1, 1, 1});
  const auto minus = build_regressor(-1.0);
  CHECK(minus == std::array<double, 6>{1, -1, 1, -1, 1, -1});
}

TEST_CASE("evaluate_polynomial") {
  CHECK(evaluate_polynomial({7.5, 0, 0, 0, 0, 0}, 0.83) == doctest::Approx(7.5));
  CHECK(evaluate_polynomial({0, 1, 0, 0, 0, 0}, 0.5) == doctest::Approx(0.5));
  // 3 + 2c - c^3 at c = 0.3: 3 + 0.6 - 0.027
  CHECK(evaluate_polynomial({3, 2, 0, -1, 0, 0}, 0.3) ==
        doctest::Approx(3.573).epsilon(1e-12));
}

TEST_CASE("exact polynomial recovery") {
  const PolyCoeffs truth{3, 2, 0, -1, 0, 0};
  const double cs[] = {-1.0, -0.7, -0.4, -0.1, 0.2, 0.5, 0.8, 1.0};
  const auto pts = sample_poly(truth, cs);
  const auto fit = fit_polynomial(pts);
  CHECK(rel_diff(fit.coeffs, truth) <= 1e-8);
  CHECK(fit.residual_rms_pa <= 1e-8);
}

TEST_CASE("all-zero pressures give the zero polynomial") {
  std::vector<FitPoint> pts;
  for (double c : {-0.9, -0.5, -0.1, 0.2, 0.6, 1.0}) pts.push_back({c, 0.0});
  const auto fit = fit_polynomial(pts);
  for (double v : fit.coeffs) CHECK(v == 0.0);
  CHECK(fit.residual_rms_pa == 0.0);
}

TEST_CASE("noisy fit matches the normal-equations oracle") {
  std::mt19937_64 rng(2024);
  const PolyCoeffs truth{12000, 30000, -4000, 9000, 1500, -2500};
  std::uniform_real_distribution<double> uc(-1.0, 1.0);
  std::normal_distribution<double> noise(0.0, 200.0);
  std::vector<FitPoint> pts;
  for (int i = 0; i < 40; ++i) {
    const double c = uc(rng);
    pts.push_back({c, evaluate_polynomial(truth, c) + noise(rng)});
  }
  const auto fit = fit_polynomial(pts);
  const auto ref = oracle::normal_equations_fit(pts);
  for (int i = 0; i < kNumCoeffs; ++i)
    CHECK(std::fabs(fit.coeffs[i] - ref[i]) <= 1e-6);
}

TEST_CASE("rank deficiency and bad input") {
  SUBCASE("fewer than six points") {
    std::vector<FitPoint> pts = {{-1, 1}, {0, 2}, {1, 3}};
    CHECK_THROWS_AS(fit_polynomial(pts), RankDeficientError);
  }
  SUBCASE("six points, five distinct abscissae") {
    std::vector<FitPoint> pts = {{-1, 1}, {-0.5, 2}, {0, 3},
                                 {0.5, 4}, {1, 5},   {1, 6}};
    CHECK_THROWS_AS(fit_polynomial(pts), RankDeficientError);
  }
  SUBCASE("non-finite input") {
    std::vector<FitPoint> pts = {{-1, 1}, {-0.5, 2}, {0, 3},
                                 {0.3, 4}, {0.7, 5}, {1, NAN}};
    CHECK_THROWS_AS(fit_polynomial(pts), InvalidDataError);
    pts[5] = {INFINITY, 5};
    CHECK_THROWS_AS(fit_polynomial(pts), InvalidDataError);
  }
}

TEST_CASE("property: fit idempotence") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ucoef(-100.0, 100.0);
  for (int trial = 0; trial < 25; ++trial) {
    PolyCoeffs truth;
    for (auto& v : truth) v = ucoef(rng);
    const double cs[] = {-1.0, -0.8, -0.5, -0.2, 0.0, 0.3, 0.6, 0.9, 1.0};
    const auto fit = fit_polynomial(sample_poly(truth, cs));
    CHECK(rel_diff(fit.coeffs, truth) <= 1e-8);
  }
}

TEST_CASE("property: permutation invariance") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    auto pts = random_instance(rng, 30);
    const auto base = fit_polynomial(pts).coeffs;
    std::shuffle(pts.begin(), pts.end(), rng);
    const auto shuffled = fit_polynomial(pts).coeffs;
    CHECK(rel_diff(shuffled, base) <= 1e-10);
  }
}

TEST_CASE("property: residual orthogonality") {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = random_instance(rng, 50);
    const auto fit = fit_polynomial(pts);
    double atr[kNumCoeffs] = {};
    double atp[kNumCoeffs] = {};
    for (const auto& p : pts) {
      const auto row = build_regressor(p.c_norm);
      const double r = p.pressure_pa - evaluate_polynomial(fit.coeffs, p.c_norm);
      for (int j = 0; j < kNumCoeffs; ++j) {
        atr[j] += row[j] * r;
        atp[j] += row[j] * p.pressure_pa;
      }
    }
    for (int j = 0; j < kNumCoeffs; ++j)
      CHECK(std::fabs(atr[j]) <= 1e-6 * std::fabs(atp[j]));
  }
}

TEST_CASE("property: oracle equivalence on random instances") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = random_instance(rng, 20 + trial);
    const auto fit = fit_polynomial(pts);
    const auto ref = oracle::normal_equations_fit(pts);
    for (int i = 0; i < kNumCoeffs; ++i)
      CHECK(std::fabs(fit.coeffs[i] - ref[i]) <= 1e-6);
  }
}
