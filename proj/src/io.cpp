#include "skincal/io.hpp"

#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "skincal/error.hpp"

namespace skincal {

namespace fs = std::filesystem;

namespace {

constexpr const char* kModelMagic = "skincal-model";
constexpr const char* kTruthMagic = "skincal-truth";
constexpr const char* kFormatVersion = "v1";

std::string fmt_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// All writers assemble the whole file first and then go through a temp file
// plus rename, so a crash never leaves a truncated file at the target path.
void atomic_write(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw IoError("write failed for " + tmp);
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw IoError("cannot move " + tmp + " to " + path);
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  fields.push_back(cur);
  return fields;
}

double parse_double(const std::string& field, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(field.c_str(), &end);
  if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE ||
      !std::isfinite(v))
    throw ValueError(where + ": '" + field + "' is not a finite number");
  return v;
}

long parse_int(const std::string& field, const std::string& where) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(field.c_str(), &end, 10);
  if (field.empty() || end != field.c_str() + field.size() || errno == ERANGE)
    throw ValueError(where + ": '" + field + "' is not an integer");
  return v;
}

RawCount parse_count(const std::string& field, const std::string& where) {
  const long v = parse_int(field, where);
  if (v < kCountMin || v > kCountMax)
    throw ValueError(where + ": count " + std::to_string(v) +
                     " outside [0, 255]");
  return static_cast<RawCount>(v);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

// Validates a counts header c_0,...,c_{N-1} starting at fields[first].
int check_count_header(const std::vector<std::string>& fields,
                       std::size_t first, const std::string& path) {
  if (fields.size() <= first)
    throw FormatError(path + ": missing or malformed header");
  for (std::size_t i = first; i < fields.size(); ++i)
    if (fields[i] != "c_" + std::to_string(i - first))
      throw FormatError(path + ": missing or malformed header");
  return static_cast<int>(fields.size() - first);
}

SkinGeometry geometry_for_columns(int n_taxels, double taxel_area_m2,
                                  int taxels_per_triangle) {
  if (taxels_per_triangle > 0 && n_taxels % taxels_per_triangle == 0)
    return make_geometry(n_taxels / taxels_per_triangle, taxels_per_triangle,
                         taxel_area_m2);
  return make_geometry(1, n_taxels, taxel_area_m2);
}

std::string timestamp_utc() {
  char buf[32];
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Reads "key value" and returns the value; throws FormatError otherwise.
std::string expect_kv(std::istream& in, const std::string& key,
                      const std::string& path) {
  std::string line;
  if (!std::getline(in, line))
    throw FormatError(path + ": truncated file, expected '" + key + "'");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto space = line.find(' ');
  if (space == std::string::npos || line.substr(0, space) != key)
    throw FormatError(path + ": expected '" + key + "', got '" + line + "'");
  return line.substr(space + 1);
}

void check_version_line(std::istream& in, const std::string& magic,
                        const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto space = line.find(' ');
  const std::string got_magic =
      space == std::string::npos ? line : line.substr(0, space);
  if (got_magic != magic)
    throw FormatError(path + ": not a " + magic + " file");
  const std::string version =
      space == std::string::npos ? "" : line.substr(space + 1);
  if (version != kFormatVersion)
    throw IncompatibleModelError(path + ": format version '" + version +
                                 "' not supported (expected " +
                                 std::string(kFormatVersion) + ")");
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  atomic_write(path, content);
}

CalibrationDataset parse_sweep_csv(const std::string& path,
                                   double taxel_area_m2,
                                   int taxels_per_triangle) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line))
    throw FormatError(path + ": missing or malformed header");
  const auto header = split_csv(line);
  if (header.empty() || header[0] != "pressure_kpa")
    throw FormatError(path + ": missing or malformed header");
  const int n_taxels = check_count_header(header, 1, path);

  std::vector<CalibrationSample> samples;
  double prev_pa = 0.0;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv(line);
    if (fields.size() != static_cast<std::size_t>(n_taxels) + 1)
      throw FormatError(path + ": row " + std::to_string(row) + " has " +
                        std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(n_taxels + 1));
    CalibrationSample s;
    const std::string where = path + ": row " + std::to_string(row);
    const double kpa = parse_double(fields[0], where + ", pressure_kpa");
    if (kpa < 0.0)
      throw ValueError(where + ": pressure must be non-negative");
    s.pressure_pa = kpa * 1000.0;
    if (!samples.empty() && s.pressure_pa < prev_pa)
      throw ProtocolError(where +
                          ": pressure decreases; sweeps must be recorded on "
                          "the loading branch only");
    prev_pa = s.pressure_pa;
    s.frame.reserve(static_cast<std::size_t>(n_taxels));
    for (int c = 0; c < n_taxels; ++c)
      s.frame.push_back(parse_count(fields[static_cast<std::size_t>(c) + 1],
                                    where + ", column c_" + std::to_string(c)));
    samples.push_back(std::move(s));
  }
  return {geometry_for_columns(n_taxels, taxel_area_m2, taxels_per_triangle),
          std::move(samples)};
}

void write_sweep_csv(const CalibrationDataset& dataset,
                     const std::string& path) {
  std::string out = "pressure_kpa";
  for (int c = 0; c < dataset.geometry().n_taxels(); ++c)
    out += ",c_" + std::to_string(c);
  out += '\n';
  for (const auto& s : dataset.samples()) {
    out += fmt_g17(s.pressure_pa / 1000.0);
    for (RawCount c : s.frame) out += ',' + std::to_string(c);
    out += '\n';
  }
  atomic_write(path, out);
}

std::vector<CapacitanceFrame> parse_frames_csv(const std::string& path,
                                               int expected_taxels) {
  auto in = open_input(path);
  std::string line;
  if (!std::getline(in, line))
    throw FormatError(path + ": missing or malformed header");
  const int n_taxels = check_count_header(split_csv(line), 0, path);
  if (expected_taxels >= 0 && n_taxels != expected_taxels)
    throw FrameShapeError(path + ": frames have " + std::to_string(n_taxels) +
                          " taxels, expected " +
                          std::to_string(expected_taxels));
  std::vector<CapacitanceFrame> frames;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto fields = split_csv(line);
    if (fields.size() != static_cast<std::size_t>(n_taxels))
      throw FormatError(path + ": row " + std::to_string(row) +
                        " has the wrong number of fields");
    CapacitanceFrame f;
    f.counts.reserve(static_cast<std::size_t>(n_taxels));
    for (int c = 0; c < n_taxels; ++c)
      f.counts.push_back(
          parse_count(fields[static_cast<std::size_t>(c)],
                      path + ": row " + std::to_string(row) + ", column c_" +
                          std::to_string(c)));
    frames.push_back(std::move(f));
  }
  return frames;
}

void write_frames_csv(std::span<const CapacitanceFrame> frames,
                      const std::string& path) {
  if (frames.empty())
    throw EmptyDataError("write_frames_csv: no frames to write");
  std::string out;
  for (std::size_t c = 0; c < frames[0].counts.size(); ++c)
    out += (c ? ",c_" : "c_") + std::to_string(c);
  out += '\n';
  for (const auto& f : frames) {
    for (std::size_t c = 0; c < f.counts.size(); ++c)
      out += (c ? "," : "") + std::to_string(f.counts[c]);
    out += '\n';
  }
  atomic_write(path, out);
}

BaselineFrame load_baseline(const std::string& path, int expected_taxels) {
  const auto frames = parse_frames_csv(path, expected_taxels);
  if (frames.size() != 1)
    throw FormatError(path + ": baseline file must hold exactly one frame");
  return {frames[0].counts};
}

void write_baseline(const BaselineFrame& baseline, const std::string& path) {
  const CapacitanceFrame frame{baseline.counts};
  write_frames_csv(std::span(&frame, 1), path);
}

void write_model_file(const SkinModel& model, const std::string& path) {
  std::string out;
  out += std::string(kModelMagic) + " " + kFormatVersion + "\n";
  out += "n_taxels " + std::to_string(model.geometry.n_taxels()) + "\n";
  out += "n_triangles " + std::to_string(model.geometry.n_triangles) + "\n";
  out += "taxels_per_triangle " +
         std::to_string(model.geometry.taxels_per_triangle) + "\n";
  out += "taxel_area " + fmt_g17(model.geometry.taxel_area_m2) + "\n";
  out += "amplitude_threshold " + std::to_string(model.amplitude_threshold) + "\n";
  out += "activation_threshold " + std::to_string(model.activation_threshold) + "\n";
  out += "created " + timestamp_utc() + "\n";
  out += "taxels id,excluded,reason,c_min,c_max,a,b,c,d,e,f,residual_rms_pa\n";
  for (const auto& tm : model.taxels) {
    out += std::to_string(tm.taxel);
    out += tm.excluded ? ",1," : ",0,";
    out += to_string(tm.reason);
    out += ',' + std::to_string(tm.c_min) + ',' + std::to_string(tm.c_max);
    for (double v : tm.coeffs) out += ',' + fmt_g17(v);
    out += ',' + fmt_g17(tm.residual_rms_pa) + '\n';
  }
  atomic_write(path, out);
}

SkinModel load_model_file(const std::string& path) {
  auto in = open_input(path);
  check_version_line(in, kModelMagic, path);

  const long n_taxels = parse_int(expect_kv(in, "n_taxels", path), path);
  const long n_triangles = parse_int(expect_kv(in, "n_triangles", path), path);
  const long per_triangle =
      parse_int(expect_kv(in, "taxels_per_triangle", path), path);
  const double area = parse_double(expect_kv(in, "taxel_area", path), path);
  const long amp = parse_int(expect_kv(in, "amplitude_threshold", path), path);
  const long act = parse_int(expect_kv(in, "activation_threshold", path), path);
  expect_kv(in, "created", path);
  expect_kv(in, "taxels", path);

  SkinModel model;
  model.geometry = make_geometry(static_cast<int>(n_triangles),
                                 static_cast<int>(per_triangle), area);
  if (model.geometry.n_taxels() != n_taxels)
    throw FormatError(path + ": n_taxels does not match the triangle layout");
  if (amp < 0 || act < 0)
    throw FormatError(path + ": thresholds must be non-negative");
  model.amplitude_threshold = static_cast<RawCount>(amp);
  model.activation_threshold = static_cast<RawCount>(act);

  std::string line;
  int record = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (record >= n_taxels)
      throw FormatError(path + ": more records than n_taxels");
    const auto f = split_csv(line);
    const std::string where = path + ": taxel record " + std::to_string(record);
    if (f.size() != 12) throw FormatError(where + ": expected 12 fields");

    TaxelModel tm;
    tm.taxel = static_cast<TaxelId>(parse_int(f[0], where));
    if (tm.taxel != record)
      throw FormatError(where + ": ids must be dense and ordered");
    const long excluded = parse_int(f[1], where);
    if (excluded != 0 && excluded != 1)
      throw FormatError(where + ": excluded flag must be 0 or 1");
    tm.excluded = excluded == 1;
    if (f[2] == "")
      tm.reason = ExclusionReason::none;
    else if (f[2] == "low-amplitude")
      tm.reason = ExclusionReason::low_amplitude;
    else if (f[2] == "rank-deficient")
      tm.reason = ExclusionReason::rank_deficient;
    else
      throw FormatError(where + ": unknown exclusion reason '" + f[2] + "'");
    if (tm.excluded != (tm.reason != ExclusionReason::none))
      throw FormatError(where + ": exclusion flag and reason disagree");
    tm.c_min = parse_count(f[3], where);
    tm.c_max = parse_count(f[4], where);
    if (tm.c_min > tm.c_max)
      throw FormatError(where + ": c_min exceeds c_max");
    for (int i = 0; i < kNumCoeffs; ++i)
      tm.coeffs[static_cast<std::size_t>(i)] =
          parse_double(f[static_cast<std::size_t>(5 + i)], where);
    tm.residual_rms_pa = parse_double(f[11], where);
    if (tm.residual_rms_pa < 0.0)
      throw FormatError(where + ": residual rms must be non-negative");
    model.taxels.push_back(tm);
    ++record;
  }
  if (record != n_taxels)
    throw FormatError(path + ": truncated file: " + std::to_string(record) +
                      " records, header promises " + std::to_string(n_taxels));
  return model;
}

void write_truth_file(const SimSkin& skin, const std::string& path) {
  std::string out;
  out += std::string(kTruthMagic) + " " + kFormatVersion + "\n";
  out += "seed " + std::to_string(skin.seed()) + "\n";
  out += "n_triangles " + std::to_string(skin.geometry().n_triangles) + "\n";
  out += "taxels_per_triangle " +
         std::to_string(skin.geometry().taxels_per_triangle) + "\n";
  out += "taxel_area " + fmt_g17(skin.geometry().taxel_area_m2) + "\n";
  out += "taxels id,stiffness_n_per_m,rest_gap_m,gain,offset,noise_sigma,dead\n";
  for (std::size_t i = 0; i < skin.taxels().size(); ++i) {
    const auto& t = skin.taxels()[i];
    out += std::to_string(i);
    out += ',' + fmt_g17(t.stiffness_n_per_m);
    out += ',' + fmt_g17(t.rest_gap_m);
    out += ',' + fmt_g17(t.gain);
    out += ',' + std::to_string(t.offset);
    out += ',' + fmt_g17(t.noise_sigma);
    out += t.dead ? ",1\n" : ",0\n";
  }
  atomic_write(path, out);
}

SimSkin load_truth_file(const std::string& path) {
  auto in = open_input(path);
  check_version_line(in, kTruthMagic, path);
  const std::string seed_field = expect_kv(in, "seed", path);
  errno = 0;
  char* seed_end = nullptr;
  const std::uint64_t seed =
      std::strtoull(seed_field.c_str(), &seed_end, 10);
  if (seed_field.empty() || seed_end != seed_field.c_str() + seed_field.size() ||
      errno == ERANGE)
    throw FormatError(path + ": bad seed '" + seed_field + "'");
  const long n_triangles = parse_int(expect_kv(in, "n_triangles", path), path);
  const long per_triangle =
      parse_int(expect_kv(in, "taxels_per_triangle", path), path);
  const double area = parse_double(expect_kv(in, "taxel_area", path), path);
  expect_kv(in, "taxels", path);

  const auto geometry = make_geometry(static_cast<int>(n_triangles),
                                      static_cast<int>(per_triangle), area);
  std::vector<GroundTruthTaxel> taxels;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_csv(line);
    const std::string where =
        path + ": taxel record " + std::to_string(taxels.size());
    if (f.size() != 7) throw FormatError(where + ": expected 7 fields");
    if (parse_int(f[0], where) != static_cast<long>(taxels.size()))
      throw FormatError(where + ": ids must be dense and ordered");
    GroundTruthTaxel t;
    t.stiffness_n_per_m = parse_double(f[1], where);
    t.rest_gap_m = parse_double(f[2], where);
    t.gain = parse_double(f[3], where);
    t.offset = parse_count(f[4], where);
    t.noise_sigma = parse_double(f[5], where);
    const long dead = parse_int(f[6], where);
    if (dead != 0 && dead != 1)
      throw FormatError(where + ": dead flag must be 0 or 1");
    t.dead = dead == 1;
    taxels.push_back(t);
  }
  if (taxels.size() != static_cast<std::size_t>(geometry.n_taxels()))
    throw FormatError(path + ": truncated file: " +
                      std::to_string(taxels.size()) + " records for " +
                      std::to_string(geometry.n_taxels()) + " taxels");
  return {geometry, std::move(taxels), seed};
}

namespace {

std::string svg_taxel_plot(const TaxelModel& tm,
                           std::span<const FitPointRaw> points) {
  constexpr double w = 640, h = 480, margin = 48;
  double p_max = 1.0;
  for (const auto& p : points) p_max = std::max(p_max, p.pressure_pa);
  const double c_lo = tm.c_min, c_hi = tm.c_max;

  auto x_of = [&](double raw) {
    return margin + (raw - c_lo) / (c_hi - c_lo) * (w - 2 * margin);
  };
  auto y_of = [&](double pa) {
    return h - margin - pa / p_max * (h - 2 * margin);
  };

  std::ostringstream svg;
  svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << w << "' height='"
      << h << "'>\n";
  svg << "<rect width='100%' height='100%' fill='white'/>\n";
  svg << "<line x1='" << margin << "' y1='" << h - margin << "' x2='"
      << w - margin << "' y2='" << h - margin << "' stroke='black'/>\n";
  svg << "<line x1='" << margin << "' y1='" << margin << "' x2='" << margin
      << "' y2='" << h - margin << "' stroke='black'/>\n";
  svg << "<text x='" << w / 2 << "' y='" << h - 10
      << "' text-anchor='middle' font-size='13'>raw counts (" << tm.c_min
      << ".." << tm.c_max << ")</text>\n";
  svg << "<text x='14' y='" << h / 2 << "' font-size='13' text-anchor='middle'"
      << " transform='rotate(-90 14 " << h / 2 << ")'>pressure ["
      << fmt_g17(p_max / 1000.0) << " kPa full scale]</text>\n";
  svg << "<text x='" << w / 2 << "' y='20' text-anchor='middle'"
      << " font-size='14'>taxel " << tm.taxel << " (rms "
      << std::lround(tm.residual_rms_pa) << " Pa)</text>\n";

  for (const auto& p : points)
    svg << "<circle cx='" << x_of(p.mean_raw) << "' cy='" << y_of(p.pressure_pa)
        << "' r='2.5' fill='steelblue'/>\n";

  svg << "<polyline fill='none' stroke='crimson' stroke-width='1.5' points='";
  for (int i = 0; i <= 100; ++i) {
    const double raw = c_lo + (c_hi - c_lo) * i / 100.0;
    const double pa = evaluate_polynomial(
        tm.coeffs, normalize_capacitance(raw, tm.c_min, tm.c_max));
    svg << x_of(raw) << ',' << y_of(std::max(0.0, pa)) << ' ';
  }
  svg << "'/>\n</svg>\n";
  return svg.str();
}

}  // namespace

void write_report(const SkinModel& model, const CalibrationDataset& dataset,
                  const CalibrationConfig& config, const std::string& out_dir,
                  const ReportOptions& options) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir))
    throw IoError("cannot create report directory " + out_dir);

  int fitted = 0;
  int low_amplitude = 0;
  int rank_deficient = 0;
  std::vector<double> rms;
  for (const auto& tm : model.taxels) {
    if (!tm.excluded) {
      ++fitted;
      rms.push_back(tm.residual_rms_pa);
    } else if (tm.reason == ExclusionReason::low_amplitude) {
      ++low_amplitude;
    } else {
      ++rank_deficient;
    }
  }
  std::sort(rms.begin(), rms.end());

  // summary.txt
  {
    std::ostringstream s;
    s << "calibration summary\n";
    s << "taxels:               " << model.geometry.n_taxels() << " ("
      << model.geometry.n_triangles << " triangles x "
      << model.geometry.taxels_per_triangle << ")\n";
    s << "taxel area:           " << fmt_g17(model.geometry.taxel_area_m2)
      << " m^2\n";
    s << "sweep samples:        " << dataset.size() << "\n";
    s << "amplitude threshold:  " << model.amplitude_threshold << " counts\n";
    s << "activation threshold: " << model.activation_threshold << " counts\n";
    s << "pressure bin width:   " << fmt_g17(config.pressure_bin_width_pa)
      << " Pa\n";
    s << "fitted:               " << fitted << "\n";
    s << "excluded:             " << low_amplitude + rank_deficient
      << " (low-amplitude " << low_amplitude << ", rank-deficient "
      << rank_deficient << ")\n";
    if (!rms.empty()) {
      s << "residual rms [Pa]:    min " << fmt_g17(rms.front()) << ", median "
        << fmt_g17(rms[rms.size() / 2]) << ", max " << fmt_g17(rms.back())
        << "\n";
    }
    atomic_write(out_dir + "/summary.txt", s.str());
  }

  // curves.csv: per accepted taxel the averaged sweep points and the fit.
  {
    std::string out = "taxel,pressure_kpa,mean_raw,fitted_pressure_kpa\n";
    for (const auto& tm : model.taxels) {
      if (tm.excluded) continue;
      const auto series = taxel_series(dataset, tm.taxel);
      const auto points =
          average_duplicates(series, config.pressure_bin_width_pa);
      for (const auto& p : points) {
        const double fitted_pa = evaluate_polynomial(
            tm.coeffs, normalize_capacitance(p.mean_raw, tm.c_min, tm.c_max));
        out += std::to_string(tm.taxel);
        out += ',' + fmt_g17(p.pressure_pa / 1000.0);
        out += ',' + fmt_g17(p.mean_raw);
        out += ',' + fmt_g17(fitted_pa / 1000.0) + '\n';
      }
    }
    atomic_write(out_dir + "/curves.csv", out);
  }

  // average.csv: taxel-averaged raw counts vs pressure over the same bins.
  {
    std::vector<std::pair<double, RawCount>> pseudo;
    pseudo.reserve(dataset.size());
    std::vector<double> frame_means;
    frame_means.reserve(dataset.size());
    for (const auto& s : dataset.samples()) {
      double mean = 0.0;
      for (RawCount c : s.frame) mean += c;
      frame_means.push_back(mean / static_cast<double>(s.frame.size()));
      pseudo.emplace_back(s.pressure_pa, 0);
    }
    // Reuse the bin layout, then average the per-frame means inside each bin.
    struct Acc {
      double p = 0, raw = 0;
      int n = 0;
    };
    std::map<long long, Acc> bins;
    for (std::size_t i = 0; i < pseudo.size(); ++i) {
      auto& acc = bins[static_cast<long long>(
          std::floor(pseudo[i].first / config.pressure_bin_width_pa))];
      acc.p += pseudo[i].first;
      acc.raw += frame_means[i];
      acc.n += 1;
    }
    std::string out = "pressure_kpa,mean_raw\n";
    for (const auto& [bin, acc] : bins)
      out += fmt_g17(acc.p / acc.n / 1000.0) + ',' + fmt_g17(acc.raw / acc.n) +
             '\n';
    atomic_write(out_dir + "/average.csv", out);
  }

  if (options.per_taxel_plots) {
    for (const auto& tm : model.taxels) {
      if (tm.excluded) continue;
      const auto points = average_duplicates(taxel_series(dataset, tm.taxel),
                                             config.pressure_bin_width_pa);
      char name[32];
      std::snprintf(name, sizeof name, "taxel_%03d.svg", tm.taxel);
      atomic_write(out_dir + "/" + name, svg_taxel_plot(tm, points));
    }
  }
}

}  // namespace skincal
