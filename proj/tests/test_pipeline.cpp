#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <vector>

#include "oracle.hpp"
#include "skincal/error.hpp"
#include "skincal/pipeline.hpp"
#include "skincal/sim.hpp"

using namespace skincal;

namespace {

bool bit_equal(double a, double b) {
  return std::memcmp(&a, &b, sizeof a) == 0;
}

// Single-taxel dataset sampled exactly from a quintic in normalized counts,
// strictly increasing so the loading-branch invariant holds.
CalibrationDataset quintic_dataset(const PolyCoeffs& coeffs, RawCount c_lo,
                                   RawCount c_hi, RawCount step) {
  const auto g = make_geometry(1, 1, kDefaultTaxelArea);
  std::vector<CalibrationSample> samples;
  for (RawCount c = c_lo; c <= c_hi; c += step) {
    const double cn = normalize_capacitance(c, c_lo, c_hi);
    samples.push_back({evaluate_polynomial(coeffs, cn), {c}});
  }
  return {g, std::move(samples)};
}

const PolyCoeffs kMonotoneQuintic{35000, 30000, 0, 4000, 0, 500};

}  // namespace

TEST_CASE("taxel_series") {
  const auto g = make_geometry(1, 2, 1e-5);
  CalibrationDataset ds(g, {{0.0, {5, 50}}, {100.0, {7, 60}}, {250.0, {9, 70}}});

  SUBCASE("projects one taxel in sample order") {
    const auto s = taxel_series(ds, 1);
    REQUIRE(s.size() == 3);
    CHECK(s[0] == std::pair<double, RawCount>{0.0, 50});
    CHECK(s[1] == std::pair<double, RawCount>{100.0, 60});
    CHECK(s[2] == std::pair<double, RawCount>{250.0, 70});
  }
  SUBCASE("empty dataset gives an empty series") {
    CalibrationDataset empty(g, {});
    CHECK(taxel_series(empty, 0).empty());
  }
  SUBCASE("taxel out of range") {
    CHECK_THROWS_AS(taxel_series(ds, 2), IndexError);
    CHECK_THROWS_AS(taxel_series(ds, -1), IndexError);
  }
  SUBCASE("noiseless sweep gives non-decreasing raw values") {
    auto skin = make_default_skin(make_geometry(2, 10, kDefaultTaxelArea), 99,
                                  {.dead_fraction = 0.0, .noise_sigma = 0.0});
    const auto sweep =
        skin.generate_sweep(PressureSchedule::uniform(0, 70e3, 1e3, 1));
    for (TaxelId t = 0; t < 20; ++t) {
      const auto s = taxel_series(sweep, t);
      for (std::size_t i = 1; i < s.size(); ++i)
        CHECK(s[i].second >= s[i - 1].second);
    }
  }
}

TEST_CASE("average_duplicates") {
  SUBCASE("same-bin samples merge to their means") {
    std::vector<std::pair<double, RawCount>> series = {{1000, 10}, {1000, 12}};
    const auto out = average_duplicates(series, 500.0);
    REQUIRE(out.size() == 1);
    CHECK(out[0].pressure_pa == doctest::Approx(1000.0));
    CHECK(out[0].mean_raw == doctest::Approx(11.0));
  }
  SUBCASE("distinct bins stay distinct") {
    std::vector<std::pair<double, RawCount>> series = {{0, 5}, {700, 6}};
    const auto out = average_duplicates(series, 500.0);
    REQUIRE(out.size() == 2);
    CHECK(out[0].pressure_pa == doctest::Approx(0.0));
    CHECK(out[0].mean_raw == doctest::Approx(5.0));
    CHECK(out[1].pressure_pa == doctest::Approx(700.0));
    CHECK(out[1].mean_raw == doctest::Approx(6.0));
  }
  SUBCASE("grouping matches the hash-on-bin-index oracle") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> up(0.0, 70000.0);
    std::uniform_int_distribution<int> uc(0, 255);
    std::vector<std::pair<double, RawCount>> series;
    for (int i = 0; i < 500; ++i) series.push_back({up(rng), uc(rng)});
    std::sort(series.begin(), series.end());

    const double width = 250.0;
    const auto out = average_duplicates(series, width);
    const auto groups = oracle::group_by_bin(series, width);
    REQUIRE(out.size() == groups.size());
    for (const auto& pt : out) {
      const long long bin =
          static_cast<long long>(std::floor(pt.pressure_pa / width));
      REQUIRE(groups.count(bin) == 1);
      double psum = 0.0, csum = 0.0;
      for (std::size_t idx : groups.at(bin)) {
        psum += series[idx].first;
        csum += series[idx].second;
      }
      const double n = static_cast<double>(groups.at(bin).size());
      CHECK(pt.pressure_pa == doctest::Approx(psum / n).epsilon(1e-12));
      CHECK(pt.mean_raw == doctest::Approx(csum / n).epsilon(1e-12));
    }
    for (std::size_t i = 1; i < out.size(); ++i)
      CHECK(out[i].pressure_pa >= out[i - 1].pressure_pa);
  }
}

TEST_CASE("amplitude") {
  SUBCASE("min and max of the raw counts") {
    std::vector<std::pair<double, RawCount>> s = {{0, 10}, {1, 20}, {2, 15}};
    CHECK(amplitude(s) == std::pair<RawCount, RawCount>{10, 20});
  }
  SUBCASE("single point") {
    std::vector<std::pair<double, RawCount>> s = {{0, 42}};
    CHECK(amplitude(s) == std::pair<RawCount, RawCount>{42, 42});
  }
  SUBCASE("empty series") {
    std::vector<std::pair<double, RawCount>> s;
    CHECK_THROWS_AS(amplitude(s), EmptyDataError);
  }
  SUBCASE("dead taxel with sub-count noise stays within 2 counts") {
    GroundTruthTaxel dead{.gain = 0.0, .offset = 40, .noise_sigma = 0.3,
                          .dead = true};
    SimSkin skin(make_geometry(1, 1, kDefaultTaxelArea), {dead}, 5);
    const auto sweep =
        skin.generate_sweep(PressureSchedule::uniform(0, 70e3, 1e3, 3));
    const auto [lo, hi] = amplitude(taxel_series(sweep, 0));
    CHECK(hi - lo <= 2);
  }
}

TEST_CASE("calibrate on the default simulated skin") {
  const auto g = make_geometry(23, 10, kDefaultTaxelArea);
  auto skin = make_default_skin(g, 42);
  const auto sweep =
      skin.generate_sweep(PressureSchedule::uniform(0, 70e3, 1e3, 3));
  const auto model = calibrate(sweep, {});

  std::set<TaxelId> dead;
  for (TaxelId t = 0; t < g.n_taxels(); ++t)
    if (skin.taxels()[t].dead) dead.insert(t);
  // The seed should produce a populated dead set near the 5 % default.
  REQUIRE(dead.size() >= 4);

  SUBCASE("excluded set is exactly the dead set") {
    std::set<TaxelId> excluded;
    for (const auto& tm : model.taxels)
      if (tm.excluded) excluded.insert(tm.taxel);
    CHECK(excluded == dead);
    for (const auto& tm : model.taxels)
      if (tm.excluded) CHECK(tm.reason == ExclusionReason::low_amplitude);
  }

  SUBCASE("live taxels fit below the noise scale") {
    // Count noise of sigma=1 maps to pressure through the shallowest slope of
    // the response, ~1.6 kPa per count at 70 kPa for the default population.
    for (const auto& tm : model.taxels) {
      if (tm.excluded) continue;
      CHECK(tm.residual_rms_pa > 0.0);
      CHECK(tm.residual_rms_pa < 1600.0);
    }
  }

  SUBCASE("left-edge prediction stays near the sweep start") {
    for (const auto& tm : model.taxels) {
      if (tm.excluded) continue;
      const double p_left = evaluate_polynomial(tm.coeffs, -1.0);
      CHECK(std::fabs(p_left - 0.0) <= 3.0 * tm.residual_rms_pa);
    }
  }

  SUBCASE("exclusion is monotone in the amplitude threshold") {
    CalibrationConfig strict;
    strict.amplitude_threshold = 60;
    const auto model2 = calibrate(sweep, strict);
    for (TaxelId t = 0; t < g.n_taxels(); ++t)
      if (model.taxels[t].excluded) CHECK(model2.taxels[t].excluded);
  }

  SUBCASE("calibration is deterministic") {
    const auto again = calibrate(sweep, {});
    for (TaxelId t = 0; t < g.n_taxels(); ++t) {
      CHECK(again.taxels[t].excluded == model.taxels[t].excluded);
      for (int i = 0; i < kNumCoeffs; ++i)
        CHECK(bit_equal(again.taxels[t].coeffs[i], model.taxels[t].coeffs[i]));
      CHECK(bit_equal(again.taxels[t].residual_rms_pa,
                      model.taxels[t].residual_rms_pa));
    }
  }

  SUBCASE("count spread across taxels widens with pressure") {
    auto spread = [&](std::size_t sample_idx) {
      const auto& frame = sweep.samples()[sample_idx].frame;
      double mean = 0.0;
      for (RawCount c : frame) mean += c;
      mean /= static_cast<double>(frame.size());
      double var = 0.0;
      for (RawCount c : frame) var += (c - mean) * (c - mean);
      return std::sqrt(var / static_cast<double>(frame.size()));
    };
    CHECK(spread(sweep.size() - 1) > spread(0));
  }
}

TEST_CASE("calibrate recovers an exact quintic taxel") {
  const auto ds = quintic_dataset(kMonotoneQuintic, 40, 200, 5);
  const auto model = calibrate(ds, {});
  REQUIRE(model.taxels.size() == 1);
  const auto& tm = model.taxels[0];
  REQUIRE_FALSE(tm.excluded);
  CHECK(tm.c_min == 40);
  CHECK(tm.c_max == 200);
  for (RawCount c = 40; c <= 200; c += 5) {
    const double cn = normalize_capacitance(c, 40, 200);
    CHECK(std::fabs(evaluate_polynomial(tm.coeffs, cn) -
                    evaluate_polynomial(kMonotoneQuintic, cn)) <= 1e-6);
  }
}

TEST_CASE("calibrate error paths") {
  SUBCASE("all-dead skin yields an empty model") {
    const auto g = make_geometry(1, 4, kDefaultTaxelArea);
    std::vector<GroundTruthTaxel> taxels(
        4, GroundTruthTaxel{.gain = 0.0, .offset = 35, .noise_sigma = 0.3,
                            .dead = true});
    SimSkin skin(g, taxels, 8);
    const auto sweep =
        skin.generate_sweep(PressureSchedule::uniform(0, 70e3, 1e3, 3));
    CHECK_THROWS_AS(calibrate(sweep, {}), EmptyModelError);
  }
  SUBCASE("too few samples") {
    const auto ds = quintic_dataset(kMonotoneQuintic, 40, 200, 40);  // 5 points
    CHECK_THROWS_AS(calibrate(ds, {}), InsufficientDataError);
  }
  SUBCASE("empty dataset") {
    CalibrationDataset ds(make_geometry(1, 1, 1e-5), {});
    CHECK_THROWS_AS(calibrate(ds, {}), InsufficientDataError);
  }
  SUBCASE("invalid config") {
    const auto ds = quintic_dataset(kMonotoneQuintic, 40, 200, 5);
    CalibrationConfig bad;
    bad.pressure_bin_width_pa = 0.0;
    CHECK_THROWS_AS(calibrate(ds, bad), InvalidDataError);
    bad = {};
    bad.min_points = 5;
    CHECK_THROWS_AS(calibrate(ds, bad), InvalidDataError);
    bad = {};
    bad.amplitude_threshold = -1;
    CHECK_THROWS_AS(calibrate(ds, bad), InvalidDataError);
  }
}
