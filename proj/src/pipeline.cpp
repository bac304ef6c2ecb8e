#include "skincal/pipeline.hpp"

#include <cmath>
#include <map>
#include <string>

#include "skincal/error.hpp"

namespace skincal {

std::vector<std::pair<double, RawCount>> taxel_series(
    const CalibrationDataset& dataset, TaxelId taxel) {
  if (taxel < 0 || taxel >= dataset.geometry().n_taxels())
    throw IndexError("taxel " + std::to_string(taxel) + " outside [0, " +
                     std::to_string(dataset.geometry().n_taxels()) + ")");
  std::vector<std::pair<double, RawCount>> series;
  series.reserve(dataset.size());
  for (const auto& s : dataset.samples())
    series.emplace_back(s.pressure_pa, s.frame[static_cast<std::size_t>(taxel)]);
  return series;
}

std::vector<FitPointRaw> average_duplicates(
    std::span<const std::pair<double, RawCount>> series, double bin_width_pa) {
  if (!(bin_width_pa > 0.0))
    throw InvalidDataError("average_duplicates: bin width must be positive");

  struct Acc {
    double pressure = 0.0;
    double raw = 0.0;
    int n = 0;
  };
  std::map<long long, Acc> bins;  // keyed by bin index, so already ordered
  for (const auto& [pressure, raw] : series) {
    auto& acc = bins[static_cast<long long>(std::floor(pressure / bin_width_pa))];
    acc.pressure += pressure;
    acc.raw += raw;
    acc.n += 1;
  }
  std::vector<FitPointRaw> out;
  out.reserve(bins.size());
  for (const auto& [bin, acc] : bins)
    out.push_back({acc.pressure / acc.n, acc.raw / acc.n});
  return out;
}

std::pair<RawCount, RawCount> amplitude(
    std::span<const std::pair<double, RawCount>> series) {
  if (series.empty()) throw EmptyDataError("amplitude: empty taxel series");
  RawCount lo = series.front().second;
  RawCount hi = lo;
  for (const auto& [pressure, raw] : series) {
    lo = std::min(lo, raw);
    hi = std::max(hi, raw);
  }
  return {lo, hi};
}

SkinModel calibrate(const CalibrationDataset& dataset,
                    const CalibrationConfig& config) {
  if (config.amplitude_threshold < 0 || config.activation_threshold < 0)
    throw InvalidDataError("calibrate: thresholds must be non-negative");
  if (!(config.pressure_bin_width_pa > 0.0))
    throw InvalidDataError("calibrate: bin width must be positive");
  if (config.min_points < kNumCoeffs)
    throw InvalidDataError("calibrate: min_points must be at least " +
                           std::to_string(kNumCoeffs));

  const auto& geometry = dataset.geometry();

  // Bins depend only on the shared pressure column, so the fit-point count is
  // the same for every taxel; check it once up front.
  {
    std::vector<std::pair<double, RawCount>> pressures;
    pressures.reserve(dataset.size());
    for (const auto& s : dataset.samples()) pressures.emplace_back(s.pressure_pa, 0);
    const auto binned = average_duplicates(pressures, config.pressure_bin_width_pa);
    if (binned.size() < static_cast<std::size_t>(config.min_points))
      throw InsufficientDataError(
          "calibrate: " + std::to_string(binned.size()) +
          " fit points after duplicate averaging, need " +
          std::to_string(config.min_points));
  }

  SkinModel model;
  model.geometry = geometry;
  model.activation_threshold = config.activation_threshold;
  model.amplitude_threshold = config.amplitude_threshold;
  model.taxels.resize(static_cast<std::size_t>(geometry.n_taxels()));

  int accepted = 0;
  for (TaxelId t = 0; t < geometry.n_taxels(); ++t) {
    const auto series = taxel_series(dataset, t);
    auto& tm = model.taxels[static_cast<std::size_t>(t)];
    tm.taxel = t;
    const auto [c_min, c_max] = amplitude(series);
    tm.c_min = c_min;
    tm.c_max = c_max;

    if (c_max - c_min < config.amplitude_threshold) {
      tm.excluded = true;
      tm.reason = ExclusionReason::low_amplitude;
      continue;
    }
    if (c_min == c_max) {
      // Only reachable with amplitude_threshold == 0: nothing to normalize.
      tm.excluded = true;
      tm.reason = ExclusionReason::rank_deficient;
      continue;
    }

    const auto averaged = average_duplicates(series, config.pressure_bin_width_pa);
    std::vector<FitPoint> points;
    points.reserve(averaged.size());
    for (const auto& p : averaged)
      points.push_back({normalize_capacitance(p.mean_raw, c_min, c_max),
                        p.pressure_pa});
    try {
      const auto fit = fit_polynomial(points);
      tm.coeffs = fit.coeffs;
      tm.residual_rms_pa = fit.residual_rms_pa;
      ++accepted;
    } catch (const RankDeficientError&) {
      tm.excluded = true;
      tm.reason = ExclusionReason::rank_deficient;
    }
  }

  if (accepted == 0)
    throw EmptyModelError("calibrate: every taxel was excluded");
  return model;
}

}  // namespace skincal
