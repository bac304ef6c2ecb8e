#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace skincal {

/// Dense taxel ordinal in [0, n_taxels).
using TaxelId = int;

/// Raw capacitance reading in ADC counts. The acquisition chain is 8 bit, so
/// parsers and constructors enforce [0, 255]; the type stays a plain int so
/// wider ADCs keep working.
using RawCount = int;

inline constexpr RawCount kCountMin = 0;
inline constexpr RawCount kCountMax = 255;

/// Default taxel area in m^2. The area is never measured by the acquisition
/// chain; it is a configuration input and gets recorded in the model file.
inline constexpr double kDefaultTaxelArea = 2.0e-5;

struct SkinGeometry {
  int n_triangles = 0;
  int taxels_per_triangle = 0;
  double taxel_area_m2 = 0.0;

  int n_taxels() const { return n_triangles * taxels_per_triangle; }
};

/// Builds a geometry, rejecting non-positive arguments.
SkinGeometry make_geometry(int n_triangles, int taxels_per_triangle,
                           double taxel_area_m2);

/// One sweep sample: the commanded differential pressure and the raw counts
/// of every taxel at that pressure.
struct CalibrationSample {
  double pressure_pa = 0.0;
  std::vector<RawCount> frame;
};

/// A pressure sweep recorded on the loading branch only. Construction
/// enforces that every frame matches the geometry, counts lie in [0, 255],
/// and pressures are non-negative and non-decreasing.
class CalibrationDataset {
 public:
  CalibrationDataset(SkinGeometry geometry,
                     std::vector<CalibrationSample> samples);

  const SkinGeometry& geometry() const { return geometry_; }
  const std::vector<CalibrationSample>& samples() const { return samples_; }
  std::size_t size() const { return samples_.size(); }

 private:
  SkinGeometry geometry_;
  std::vector<CalibrationSample> samples_;
};

enum class ExclusionReason { none, low_amplitude, rank_deficient };

const char* to_string(ExclusionReason reason);

/// Calibrated per-taxel model: quintic coefficients in normalized-capacitance
/// space plus the (c_min, c_max) range the normalization is anchored to.
/// When excluded is set the coefficients carry no meaning and every consumer
/// ignores them.
struct TaxelModel {
  TaxelId taxel = 0;
  std::array<double, 6> coeffs{};  // constant term first
  RawCount c_min = 0;
  RawCount c_max = 0;
  bool excluded = false;
  ExclusionReason reason = ExclusionReason::none;
  double residual_rms_pa = 0.0;
};

/// The persisted calibration artifact: one TaxelModel per taxel plus the
/// thresholds the model was built with.
struct SkinModel {
  SkinGeometry geometry;
  std::vector<TaxelModel> taxels;
  RawCount activation_threshold = 0;  // counts delta vs baseline
  RawCount amplitude_threshold = 0;   // minimum usable sweep amplitude
};

/// One runtime snapshot of every taxel.
struct CapacitanceFrame {
  std::vector<RawCount> counts;
};

/// Rest-state reference frame captured with no contact; activation is
/// judged against it.
struct BaselineFrame {
  std::vector<RawCount> counts;
};

}  // namespace skincal
