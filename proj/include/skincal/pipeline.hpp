#pragma once

#include <span>
#include <utility>
#include <vector>

#include "skincal/polyfit.hpp"
#include "skincal/types.hpp"

namespace skincal {

struct CalibrationConfig {
  RawCount amplitude_threshold = 10;   // taxels with a smaller sweep amplitude are excluded
  RawCount activation_threshold = 6;   // stamped into the model for runtime use
  double pressure_bin_width_pa = 100.0;
  int min_points = kNumCoeffs;         // fit points required after duplicate averaging
};

/// (pressure, raw count) pairs of one taxel across the sweep, in sample order.
std::vector<std::pair<double, RawCount>> taxel_series(
    const CalibrationDataset& dataset, TaxelId taxel);

/// One averaged fit point: samples sharing a pressure bin collapse to their
/// mean pressure and mean raw count.
struct FitPointRaw {
  double pressure_pa = 0.0;
  double mean_raw = 0.0;
};

/// Merges samples whose pressures fall in the same bin (floor(P / bin_width));
/// output is sorted by pressure ascending.
std::vector<FitPointRaw> average_duplicates(
    std::span<const std::pair<double, RawCount>> series, double bin_width_pa);

/// (c_min, c_max) of the series. Throws EmptyDataError on an empty series.
std::pair<RawCount, RawCount> amplitude(
    std::span<const std::pair<double, RawCount>> series);

/// Full calibration: per taxel, measure the amplitude, exclude taxels below
/// the amplitude threshold, average duplicate pressures, normalize and fit
/// the quintic. Taxels whose fit is rank deficient are excluded with that
/// reason recorded. Throws InsufficientDataError when fewer than min_points
/// fit points survive averaging and EmptyModelError when no taxel remains.
SkinModel calibrate(const CalibrationDataset& dataset,
                    const CalibrationConfig& config);

}  // namespace skincal
