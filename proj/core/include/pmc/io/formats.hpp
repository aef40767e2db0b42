#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "pmc/purcell.hpp"
#include "pmc/spectral_analysis.hpp"
#include "pmc/transmission.hpp"

// CSV/JSON output. Numbers use 12 significant digits, '.' decimals and LF
// line endings, so identical inputs give byte-identical files.
namespace pmc::io {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string format_number(double v);
double round_significant(double v);
double parse_number(std::string_view text);

/// Writes to a sibling temp file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);
std::string read_file(const std::filesystem::path& path);

// spectrum: freq_Hz,re,im,mag,mag_dB
std::string spectrum_csv(const ComplexSpectrum& spec, double db_reference = 1.0);
ComplexSpectrum parse_spectrum_csv(std::string_view text);

// map (long format): H_Oe,freq_Hz,mag_dB
struct MapTable {
  std::vector<double> fields;
  FrequencyGrid grid;
  std::vector<std::vector<double>> mag_db;  // [field][frequency]
};
std::string map_csv(const FieldSweepMap& map, double db_reference = 1.0);
std::string map_csv(const MapTable& table);
MapTable parse_map_csv(std::string_view text);
MapTable to_table(const FieldSweepMap& map, double db_reference = 1.0);

// time: t_s,mag
std::string time_csv(const TimeTrace& trace);
TimeTrace parse_time_csv(std::string_view text);

// eigen: alpha,re_plus_Hz,im_plus_Hz,re_minus_Hz,im_minus_Hz,gap_Hz
struct EigenRow {
  double alpha = 0.0;
  Complex upper_hz;
  Complex lower_hz;
  double gap_hz = 0.0;
};
EigenRow make_eigen_row(const HybridSystem& sys);
std::string eigen_csv(std::span<const EigenRow> rows);
std::vector<EigenRow> parse_eigen_csv(std::string_view text);

// phase: alpha,beta,g_Hz,re_delta_Hz,purcell
std::string phase_csv(const PhaseDiagram& pd);
PhaseDiagram parse_phase_csv(std::string_view text);

// spin: thickness_um,N,g_Hz
std::string spin_csv(std::span<const SpinEntry> entries);
std::vector<SpinEntry> parse_spin_csv(std::string_view text);

// verdict JSON
struct VerdictRow {
  double alpha = 0.0;
  RegimeVerdict verdict;
};
struct VerdictReport {
  std::optional<RegimeVerdict> single;
  std::vector<VerdictRow> rows;
};
std::string verdict_json(const VerdictReport& report);
VerdictReport parse_verdict_json(std::string_view text);

// fit JSON
std::string fit_json(const FitResult& fit);
FitResult parse_fit_json(std::string_view text);

}  // namespace pmc::io
