// Command-line front end: simulate -> calibrate -> baseline -> estimate ->
// validate. Exit codes: 0 success, 1 runtime error, 2 usage error.

#include <CLI11.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "skincal/error.hpp"
#include "skincal/force.hpp"
#include "skincal/io.hpp"
#include "skincal/pipeline.hpp"
#include "skincal/sim.hpp"

using namespace skincal;

namespace {

// "lo:hi:step" -> inclusive grid.
std::vector<double> parse_range(const std::string& spec) {
  double lo = 0, hi = 0, step = 0;
  char trailing = 0;
  if (std::sscanf(spec.c_str(), "%lf:%lf:%lf%c", &lo, &hi, &step, &trailing) != 3 ||
      !(step > 0) || hi < lo)
    throw ValueError("bad range '" + spec + "', expected lo:hi:step");
  std::vector<double> values;
  for (double v = lo; v <= hi + 1e-9 * step; v += step)
    values.push_back(std::min(v, hi));
  return values;
}

// TAXEL_CALIB_SEED beats the flag, so CI can pin runs without editing configs.
std::uint64_t effective_seed(std::uint64_t flag_seed) {
  if (const char* env = std::getenv("TAXEL_CALIB_SEED")) {
    char* end = nullptr;
    const std::uint64_t v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0') return v;
    throw ValueError(std::string("TAXEL_CALIB_SEED is not an integer: '") +
                     env + "'");
  }
  return flag_seed;
}

BaselineFrame averaged_rest_baseline(SimSkin& skin, int frames) {
  const int n = skin.geometry().n_taxels();
  std::vector<double> acc(static_cast<std::size_t>(n), 0.0);
  for (int r = 0; r < frames; ++r) {
    const auto rest = skin.sample_frame(0.0);
    for (int t = 0; t < n; ++t) acc[static_cast<std::size_t>(t)] += rest.frame[static_cast<std::size_t>(t)];
  }
  BaselineFrame baseline;
  baseline.counts.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t)
    baseline.counts.push_back(static_cast<RawCount>(
        std::lround(acc[static_cast<std::size_t>(t)] / frames)));
  return baseline;
}

struct SimulateArgs {
  std::uint64_t seed = 42;
  int triangles = 23;
  int taxels_per_triangle = 10;
  double area = kDefaultTaxelArea;
  std::string levels = "0:70:1";  // kPa
  int dwell = 3;
  double dead_fraction = 0.05;
  double noise = 1.0;
  std::string out = "sweep.csv";
  std::string truth = "truth.csv";
};

int run_simulate(const SimulateArgs& args) {
  const auto geometry =
      make_geometry(args.triangles, args.taxels_per_triangle, args.area);
  DefaultSkinParams params;
  params.dead_fraction = args.dead_fraction;
  params.noise_sigma = args.noise;
  auto skin = make_default_skin(geometry, effective_seed(args.seed), params);

  std::vector<double> levels_pa;
  for (double kpa : parse_range(args.levels)) levels_pa.push_back(kpa * 1000.0);
  const auto sweep = skin.generate_sweep(PressureSchedule(levels_pa, args.dwell));

  write_truth_file(skin, args.truth);
  write_sweep_csv(sweep, args.out);
  std::cout << "simulated " << sweep.size() << " samples over "
            << levels_pa.size() << " pressure levels for "
            << geometry.n_taxels() << " taxels\n"
            << "sweep written to " << args.out << ", ground truth to "
            << args.truth << "\n";
  return 0;
}

struct CalibrateArgs {
  std::string sweep;
  std::string model = "model.txt";
  std::string report_dir;
  bool plots = false;
  double area = kDefaultTaxelArea;
  int taxels_per_triangle = 10;
  int amplitude_threshold = 10;
  int activation_threshold = 6;
  double bin_width_kpa = 0.1;
  int min_points = 6;
};

int run_calibrate(const CalibrateArgs& args) {
  const auto dataset =
      parse_sweep_csv(args.sweep, args.area, args.taxels_per_triangle);
  CalibrationConfig config;
  config.amplitude_threshold = args.amplitude_threshold;
  config.activation_threshold = args.activation_threshold;
  config.pressure_bin_width_pa = args.bin_width_kpa * 1000.0;
  config.min_points = args.min_points;

  const auto model = calibrate(dataset, config);
  write_model_file(model, args.model);

  int excluded = 0;
  for (const auto& tm : model.taxels) excluded += tm.excluded ? 1 : 0;
  std::cout << "calibrated " << model.geometry.n_taxels() - excluded << "/"
            << model.geometry.n_taxels() << " taxels (" << excluded
            << " excluded); model written to " << args.model << "\n";

  if (!args.report_dir.empty()) {
    write_report(model, dataset, config, args.report_dir,
                 {.per_taxel_plots = args.plots});
    std::cout << "report written to " << args.report_dir << "\n";
  }
  return 0;
}

struct BaselineArgs {
  std::string frames;
  std::string out = "baseline.csv";
};

int run_baseline(const BaselineArgs& args) {
  const auto frames = parse_frames_csv(args.frames);
  if (frames.empty())
    throw EmptyDataError(args.frames + ": no frames to average");
  const std::size_t n = frames[0].counts.size();
  std::vector<double> acc(n, 0.0);
  for (const auto& f : frames)
    for (std::size_t t = 0; t < n; ++t) acc[t] += f.counts[t];
  BaselineFrame baseline;
  for (std::size_t t = 0; t < n; ++t)
    baseline.counts.push_back(static_cast<RawCount>(
        std::lround(acc[t] / static_cast<double>(frames.size()))));
  write_baseline(baseline, args.out);
  std::cout << "baseline averaged from " << frames.size()
            << " frames written to " << args.out << "\n";
  return 0;
}

struct EstimateArgs {
  std::string model;
  std::string baseline;
  std::string frames;
  std::string out;
};

int run_estimate(const EstimateArgs& args) {
  const auto model = load_model_file(args.model);
  const auto baseline =
      load_baseline(args.baseline, model.geometry.n_taxels());
  const auto frames = parse_frames_csv(args.frames, model.geometry.n_taxels());

  std::string csv = "frame,total_force_n,n_activated,n_clamped\n";
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const auto est = estimate_force(frames[i], baseline, model);
    std::printf("frame %zu: total force %.3f N (%zu taxels activated", i,
                est.total_force_n, est.n_activated);
    if (!est.clamped.empty())
      std::printf(", %zu beyond calibrated range", est.clamped.size());
    std::printf(")\n");
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%zu,%zu\n", i, est.total_force_n,
                  est.n_activated, est.clamped.size());
    csv += buf;
  }
  if (!args.out.empty()) write_text_file(args.out, csv);
  return 0;
}

struct ValidateArgs {
  std::string model;
  std::string truth;
  std::uint64_t seed = 1;
  std::string masses = "0.2:1.0:0.2";  // kg
  int trials = 20;
  int patch_size = 30;
  std::string out;
};

int run_validate(const ValidateArgs& args) {
  const auto model = load_model_file(args.model);
  auto skin = load_truth_file(args.truth);
  if (skin.geometry().n_taxels() != model.geometry.n_taxels())
    throw FrameShapeError("model and ground truth disagree on the taxel count");
  if (args.trials < 1) throw ValueError("--trials must be positive");
  if (args.patch_size < 1 || args.patch_size > skin.geometry().n_taxels())
    throw ValueError("--patch-size must be in [1, n_taxels]");

  const std::uint64_t seed = effective_seed(args.seed);
  skin.reseed(seed);
  const auto baseline = averaged_rest_baseline(skin, 16);
  const auto masses = parse_range(args.masses);

  std::mt19937_64 patch_rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_int_distribution<int> start_of(
      0, skin.geometry().n_taxels() - args.patch_size);

  std::string csv = "trial,mass_kg,true_force_n,est_force_n,rel_error,n_activated,n_clamped\n";
  double abs_rel_sum = 0.0;
  for (int trial = 0; trial < args.trials; ++trial) {
    const double mass = masses[static_cast<std::size_t>(trial) % masses.size()];
    const int start = start_of(patch_rng);
    std::vector<TaxelId> patch(static_cast<std::size_t>(args.patch_size));
    std::iota(patch.begin(), patch.end(), start);

    const auto vf = skin.generate_validation_frame(mass, patch, baseline);
    const auto est = estimate_force(vf.frame, baseline, model);
    const double rel =
        (est.total_force_n - vf.true_force_n) / vf.true_force_n;
    abs_rel_sum += std::fabs(rel);

    std::printf(
        "trial %2d: mass %.2f kg on taxels [%d, %d): true %6.3f N, estimated "
        "%6.3f N (%+5.1f%%)\n",
        trial, mass, start, start + args.patch_size, vf.true_force_n,
        est.total_force_n, 100.0 * rel);
    char buf[192];
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%zu,%zu\n",
                  trial, mass, vf.true_force_n, est.total_force_n, rel,
                  est.n_activated, est.clamped.size());
    csv += buf;
  }
  const double mean_abs_rel = abs_rel_sum / args.trials;
  std::printf("mean absolute relative force error: %.2f%% over %d trials\n",
              100.0 * mean_abs_rel, args.trials);
  if (!args.out.empty()) write_text_file(args.out, csv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Calibration toolkit for capacitive tactile-sensor arrays"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand(
      "simulate", "Generate a synthetic pressure sweep with known ground truth");
  simulate->add_option("--seed", sim.seed, "Random seed");
  simulate->add_option("--triangles", sim.triangles, "Triangle count");
  simulate->add_option("--taxels-per-triangle", sim.taxels_per_triangle,
                       "Taxels per triangle");
  simulate->add_option("--area", sim.area, "Taxel area [m^2]");
  simulate->add_option("--levels", sim.levels, "Pressure levels lo:hi:step [kPa]");
  simulate->add_option("--dwell", sim.dwell, "Frames per pressure level");
  simulate->add_option("--dead-fraction", sim.dead_fraction,
                       "Fraction of dead taxels");
  simulate->add_option("--noise", sim.noise, "Count noise sigma");
  simulate->add_option("--out", sim.out, "Sweep CSV path");
  simulate->add_option("--truth", sim.truth, "Ground-truth sidecar path");

  CalibrateArgs cal;
  auto* calibrate_cmd = app.add_subcommand(
      "calibrate", "Fit per-taxel polynomials from a sweep CSV");
  calibrate_cmd->add_option("--sweep", cal.sweep, "Sweep CSV path")->required();
  calibrate_cmd->add_option("--model", cal.model, "Output model path");
  calibrate_cmd->add_option("--report-dir", cal.report_dir,
                            "Write a calibration report here");
  calibrate_cmd->add_flag("--plots", cal.plots, "Per-taxel SVG plots in the report");
  calibrate_cmd->add_option("--area", cal.area, "Taxel area [m^2]");
  calibrate_cmd->add_option("--taxels-per-triangle", cal.taxels_per_triangle,
                            "Taxels per triangle (layout metadata)");
  calibrate_cmd->add_option("--amplitude-threshold", cal.amplitude_threshold,
                            "Exclude taxels below this sweep amplitude [counts]");
  calibrate_cmd->add_option("--activation-threshold", cal.activation_threshold,
                            "Activation threshold stored in the model [counts]");
  calibrate_cmd->add_option("--bin-width", cal.bin_width_kpa,
                            "Duplicate-pressure bin width [kPa]");
  calibrate_cmd->add_option("--min-points", cal.min_points,
                            "Fit points required after averaging");

  BaselineArgs base;
  auto* baseline_cmd = app.add_subcommand(
      "baseline", "Average rest frames into a baseline file");
  baseline_cmd->add_option("--frames", base.frames, "Rest frames CSV")->required();
  baseline_cmd->add_option("--out", base.out, "Baseline output path");

  EstimateArgs est;
  auto* estimate_cmd = app.add_subcommand(
      "estimate", "Estimate total normal force for each frame");
  estimate_cmd->add_option("--model", est.model, "Model file")->required();
  estimate_cmd->add_option("--baseline", est.baseline, "Baseline file")->required();
  estimate_cmd->add_option("--frames", est.frames, "Frames CSV")->required();
  estimate_cmd->add_option("--out", est.out, "Per-frame results CSV");

  ValidateArgs val;
  auto* validate_cmd = app.add_subcommand(
      "validate", "Run known-mass trials against the simulator ground truth");
  validate_cmd->add_option("--model", val.model, "Model file")->required();
  validate_cmd->add_option("--truth", val.truth, "Ground-truth sidecar")->required();
  validate_cmd->add_option("--seed", val.seed, "Random seed for trials");
  validate_cmd->add_option("--masses", val.masses, "Masses lo:hi:step [kg]");
  validate_cmd->add_option("--trials", val.trials, "Number of trials");
  validate_cmd->add_option("--patch-size", val.patch_size,
                           "Contiguous taxels under each weight");
  validate_cmd->add_option("--out", val.out, "Per-trial results CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    if (simulate->parsed()) return run_simulate(sim);
    if (calibrate_cmd->parsed()) return run_calibrate(cal);
    if (baseline_cmd->parsed()) return run_baseline(base);
    if (estimate_cmd->parsed()) return run_estimate(est);
    if (validate_cmd->parsed()) return run_validate(val);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
