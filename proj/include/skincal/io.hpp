#pragma once

#include <span>
#include <string>
#include <vector>

#include "skincal/pipeline.hpp"
#include "skincal/sim.hpp"
#include "skincal/types.hpp"

namespace skincal {

// All pressures cross the file boundary in kPa; internally everything is Pa.
// Numeric fields are serialized at full precision (17 significant digits) so
// every value parses back bit-exact. Writes go through a temp file + rename,
// so an interrupted run never leaves a half-written file behind.

/// Reads a sweep CSV (`pressure_kpa,c_0,...,c_{N-1}`). The triangle split is
/// reporting metadata only: N taxels are grouped as N/taxels_per_triangle
/// triangles when divisible, as a single triangle otherwise.
CalibrationDataset parse_sweep_csv(const std::string& path,
                                   double taxel_area_m2 = kDefaultTaxelArea,
                                   int taxels_per_triangle = 10);

void write_sweep_csv(const CalibrationDataset& dataset,
                     const std::string& path);

/// Frame CSV (`c_0,...,c_{N-1}`, one row per frame). Pass expected_taxels < 0
/// to accept any width.
std::vector<CapacitanceFrame> parse_frames_csv(const std::string& path,
                                               int expected_taxels = -1);

void write_frames_csv(std::span<const CapacitanceFrame> frames,
                      const std::string& path);

BaselineFrame load_baseline(const std::string& path, int expected_taxels = -1);
void write_baseline(const BaselineFrame& baseline, const std::string& path);

/// Versioned model file: header (version, geometry, thresholds, creation
/// timestamp) plus one record per taxel. load(write(m)) == m including
/// coefficient bit patterns.
void write_model_file(const SkinModel& model, const std::string& path);
SkinModel load_model_file(const std::string& path);

/// Simulator ground-truth sidecar. Kept separate from the sweep CSV so the
/// calibration path only ever sees what real hardware would provide.
void write_truth_file(const SimSkin& skin, const std::string& path);
SimSkin load_truth_file(const std::string& path);

/// Atomic text write (temp file + rename).
void write_text_file(const std::string& path, const std::string& content);

struct ReportOptions {
  bool per_taxel_plots = false;  // emit one SVG per accepted taxel
};

/// Writes summary.txt, curves.csv (per accepted taxel: averaged points and
/// the fitted pressure at each), average.csv (taxel-averaged raw counts vs
/// pressure) and optional per-taxel plots into out_dir.
void write_report(const SkinModel& model, const CalibrationDataset& dataset,
                  const CalibrationConfig& config, const std::string& out_dir,
                  const ReportOptions& options = {});

}  // namespace skincal
