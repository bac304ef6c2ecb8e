#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "skincal/types.hpp"

namespace skincal {

inline constexpr double kGravity = 9.81;  // m/s^2

/// Hidden per-taxel physics. The pressure response is
///
///   counts(P) = offset + gain * P / (P + E),   E = stiffness * rest_gap / area
///
/// i.e. the dielectric compresses linearly at small load (displacement
/// P*area/stiffness) and stiffens toward full compression, so the count swing
/// saturates at `gain`. E is the differential pressure at which the dielectric
/// reaches half compression. Dead taxels have gain pinned to 0 and only emit
/// their offset plus noise.
struct GroundTruthTaxel {
  double stiffness_n_per_m = 450.0;  // spring constant of the dielectric column
  double rest_gap_m = 2.0e-3;        // dielectric thickness at rest
  double gain = 0.0;                 // count swing at full compression
  RawCount offset = 0;               // rest-state counts
  double noise_sigma = 0.0;          // Gaussian count noise before quantization
  bool dead = false;
};

/// Real-valued counts before noise and quantization. Strictly increasing in
/// pressure for live taxels, equal to the offset at zero load.
double true_capacitance_counts(const GroundTruthTaxel& taxel,
                               double pressure_pa, double taxel_area_m2);

/// Loading-branch pressure schedule: levels must be non-decreasing, each held
/// for dwell_samples frames.
class PressureSchedule {
 public:
  PressureSchedule(std::vector<double> levels_pa, int dwell_samples);

  /// Inclusive uniform grid lo, lo+step, ..., hi.
  static PressureSchedule uniform(double lo_pa, double hi_pa, double step_pa,
                                  int dwell_samples);

  const std::vector<double>& levels_pa() const { return levels_pa_; }
  int dwell_samples() const { return dwell_samples_; }

 private:
  std::vector<double> levels_pa_;
  int dwell_samples_;
};

struct ValidationFrame {
  CapacitanceFrame frame;
  double true_force_n = 0.0;
};

/// Synthetic skin with known ground truth. Frame generation consumes the
/// seeded generator, so one instance is single-threaded; identical seeds give
/// identical outputs.
class SimSkin {
 public:
  SimSkin(SkinGeometry geometry, std::vector<GroundTruthTaxel> taxels,
          std::uint64_t seed);

  const SkinGeometry& geometry() const { return geometry_; }
  const std::vector<GroundTruthTaxel>& taxels() const { return taxels_; }
  std::uint64_t seed() const { return seed_; }

  /// Rewinds the generator to a fresh stream.
  void reseed(std::uint64_t seed);

  /// One uniform-pressure frame: per taxel clamp(round(true + noise), 0, 255),
  /// carrying the commanded pressure.
  CalibrationSample sample_frame(double pressure_pa);

  /// Full sweep over the schedule: levels x dwell_samples frames.
  CalibrationDataset generate_sweep(const PressureSchedule& schedule);

  /// A known mass resting on a patch: uniform pressure mass*g/(|patch|*area)
  /// on the patch taxels, rest state elsewhere. Returns the frame and the
  /// ground-truth force.
  ValidationFrame generate_validation_frame(double mass_kg,
                                            std::span<const TaxelId> patch,
                                            const BaselineFrame& baseline);

 private:
  SkinGeometry geometry_;
  std::vector<GroundTruthTaxel> taxels_;
  std::uint64_t seed_;
  std::mt19937_64 rng_;
};

/// Population parameters for make_default_skin. Offsets and gains spread so
/// the across-taxel count std grows roughly five-fold between rest and 70 kPa,
/// matching what a real forearm skin shows.
struct DefaultSkinParams {
  double dead_fraction = 0.05;
  double noise_sigma = 1.0;          // counts
  RawCount offset_min = 30;
  RawCount offset_max = 50;
  double gain_min = 140.0;
  double gain_max = 230.0;
  double modulus_min_pa = 30e3;      // half-compression pressure spread
  double modulus_max_pa = 60e3;
  double rest_gap_m = 2.0e-3;
};

SimSkin make_default_skin(const SkinGeometry& geometry, std::uint64_t seed,
                          const DefaultSkinParams& params = {});

}  // namespace skincal
