#include "skincal/sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "skincal/error.hpp"

namespace skincal {

double true_capacitance_counts(const GroundTruthTaxel& taxel,
                               double pressure_pa, double taxel_area_m2) {
  if (!std::isfinite(pressure_pa) || pressure_pa < 0.0)
    throw InvalidDataError("simulator: pressure must be finite and >= 0");
  if (!(taxel_area_m2 > 0.0))
    throw InvalidDataError("simulator: taxel area must be positive");
  if (taxel.dead || taxel.gain <= 0.0) return taxel.offset;

  // Half-compression pressure of the dielectric column. At small load the
  // displacement is the linear-spring P*A/k; toward full compression the foam
  // stiffens and the count swing saturates at `gain`.
  const double half_compression_pa =
      taxel.stiffness_n_per_m * taxel.rest_gap_m / taxel_area_m2;
  const double compression = pressure_pa / (pressure_pa + half_compression_pa);
  return taxel.offset + taxel.gain * compression;
}

PressureSchedule::PressureSchedule(std::vector<double> levels_pa,
                                   int dwell_samples)
    : levels_pa_(std::move(levels_pa)), dwell_samples_(dwell_samples) {
  if (dwell_samples_ < 1)
    throw InvalidDataError("schedule: dwell_samples must be >= 1");
  for (std::size_t i = 0; i < levels_pa_.size(); ++i) {
    if (!std::isfinite(levels_pa_[i]) || levels_pa_[i] < 0.0)
      throw InvalidDataError("schedule: levels must be finite and >= 0");
    if (i > 0 && levels_pa_[i] < levels_pa_[i - 1])
      throw ProtocolError("schedule: levels must be non-decreasing "
                          "(loading branch only)");
  }
}

PressureSchedule PressureSchedule::uniform(double lo_pa, double hi_pa,
                                           double step_pa, int dwell_samples) {
  if (!(step_pa > 0.0) || hi_pa < lo_pa)
    throw InvalidDataError("schedule: bad uniform grid");
  std::vector<double> levels;
  for (double p = lo_pa; p <= hi_pa + 1e-9 * step_pa; p += step_pa)
    levels.push_back(std::min(p, hi_pa));
  return {std::move(levels), dwell_samples};
}

SimSkin::SimSkin(SkinGeometry geometry, std::vector<GroundTruthTaxel> taxels,
                 std::uint64_t seed)
    : geometry_(geometry), taxels_(std::move(taxels)), seed_(seed), rng_(seed) {
  make_geometry(geometry_.n_triangles, geometry_.taxels_per_triangle,
                geometry_.taxel_area_m2);
  if (taxels_.size() != static_cast<std::size_t>(geometry_.n_taxels()))
    throw InvalidDataError("simulator: need one ground-truth taxel per taxel");
  for (const auto& t : taxels_) {
    if (!(t.stiffness_n_per_m > 0.0) || !(t.rest_gap_m > 0.0))
      throw InvalidDataError("simulator: stiffness and rest gap must be positive");
    if (t.gain < 0.0 || t.noise_sigma < 0.0)
      throw InvalidDataError("simulator: gain and noise must be non-negative");
    if (t.offset < kCountMin || t.offset > kCountMax)
      throw InvalidDataError("simulator: offset outside [0, 255]");
    if (t.dead && t.gain != 0.0)
      throw InvalidDataError("simulator: dead taxels must have zero gain");
  }
}

void SimSkin::reseed(std::uint64_t seed) {
  seed_ = seed;
  rng_.seed(seed);
}

CalibrationSample SimSkin::sample_frame(double pressure_pa) {
  CalibrationSample sample;
  sample.pressure_pa = pressure_pa;
  sample.frame.reserve(taxels_.size());
  std::normal_distribution<double> unit_noise(0.0, 1.0);
  for (const auto& t : taxels_) {
    double counts = true_capacitance_counts(t, pressure_pa, geometry_.taxel_area_m2);
    if (t.noise_sigma > 0.0) counts += t.noise_sigma * unit_noise(rng_);
    const long quantized = std::lround(counts);
    sample.frame.push_back(static_cast<RawCount>(
        std::clamp(quantized, static_cast<long>(kCountMin),
                   static_cast<long>(kCountMax))));
  }
  return sample;
}

CalibrationDataset SimSkin::generate_sweep(const PressureSchedule& schedule) {
  std::vector<CalibrationSample> samples;
  samples.reserve(schedule.levels_pa().size() *
                  static_cast<std::size_t>(schedule.dwell_samples()));
  for (double level : schedule.levels_pa())
    for (int d = 0; d < schedule.dwell_samples(); ++d)
      samples.push_back(sample_frame(level));
  return {geometry_, std::move(samples)};
}

ValidationFrame SimSkin::generate_validation_frame(
    double mass_kg, std::span<const TaxelId> patch,
    const BaselineFrame& baseline) {
  if (patch.empty())
    throw InvalidPatchError("validation: patch must not be empty");
  std::set<TaxelId> unique(patch.begin(), patch.end());
  for (TaxelId t : unique)
    if (t < 0 || t >= geometry_.n_taxels())
      throw InvalidPatchError("validation: taxel " + std::to_string(t) +
                              " outside the geometry");
  if (baseline.counts.size() != static_cast<std::size_t>(geometry_.n_taxels()))
    throw FrameShapeError("validation: baseline does not match the geometry");
  if (!(mass_kg > 0.0) || !std::isfinite(mass_kg))
    throw InvalidDataError("validation: mass must be positive");

  ValidationFrame out;
  out.true_force_n = mass_kg * kGravity;
  const double patch_pressure =
      out.true_force_n /
      (static_cast<double>(unique.size()) * geometry_.taxel_area_m2);

  // One noisy read per taxel: patch taxels under the weight, the rest at rest.
  std::normal_distribution<double> unit_noise(0.0, 1.0);
  out.frame.counts.reserve(taxels_.size());
  for (TaxelId t = 0; t < geometry_.n_taxels(); ++t) {
    const auto& gt = taxels_[static_cast<std::size_t>(t)];
    const double pressure = unique.count(t) ? patch_pressure : 0.0;
    double counts = true_capacitance_counts(gt, pressure, geometry_.taxel_area_m2);
    if (gt.noise_sigma > 0.0) counts += gt.noise_sigma * unit_noise(rng_);
    const long quantized = std::lround(counts);
    out.frame.counts.push_back(static_cast<RawCount>(
        std::clamp(quantized, static_cast<long>(kCountMin),
                   static_cast<long>(kCountMax))));
  }
  return out;
}

SimSkin make_default_skin(const SkinGeometry& geometry, std::uint64_t seed,
                          const DefaultSkinParams& params) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> offset(params.offset_min, params.offset_max);
  std::uniform_real_distribution<double> gain(params.gain_min, params.gain_max);
  std::uniform_real_distribution<double> modulus(params.modulus_min_pa,
                                                 params.modulus_max_pa);
  std::uniform_real_distribution<double> dead_draw(0.0, 1.0);

  std::vector<GroundTruthTaxel> taxels;
  taxels.reserve(static_cast<std::size_t>(geometry.n_taxels()));
  for (int i = 0; i < geometry.n_taxels(); ++i) {
    GroundTruthTaxel t;
    t.rest_gap_m = params.rest_gap_m;
    // Draw the half-compression pressure and fold it back into a spring
    // constant for this area and gap.
    t.stiffness_n_per_m =
        modulus(rng) * geometry.taxel_area_m2 / params.rest_gap_m;
    t.gain = gain(rng);
    t.offset = offset(rng);
    t.noise_sigma = params.noise_sigma;
    t.dead = dead_draw(rng) < params.dead_fraction;
    if (t.dead) t.gain = 0.0;
    taxels.push_back(t);
  }
  return {geometry, std::move(taxels), seed};
}

}  // namespace skincal
