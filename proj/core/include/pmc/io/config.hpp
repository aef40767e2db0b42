#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pmc/purcell.hpp"
#include "pmc/spectral_analysis.hpp"
#include "pmc/transmission.hpp"

namespace pmc::io {

/// Malformed or out-of-range configuration. The message carries
/// `source:line: [section] key: reason`.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raw `[section]` / `key = value` document with line numbers retained.
class ConfigDocument {
 public:
  struct Entry {
    std::string value;
    int line = 0;
  };

  static ConfigDocument parse(std::istream& in, std::string source_name);
  static ConfigDocument load(const std::filesystem::path& path);

  const std::string& source() const { return source_; }
  bool has_section(const std::string& section) const;
  const Entry* find(const std::string& section, const std::string& key) const;

 private:
  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, int> section_lines_;
};

struct ClassifyInput {
  double K_m_hz = 0.0;
  double K_c_hz = 0.0;
  double g_hz = 0.0;
};

struct FitInput {
  std::filesystem::path data;
  FreeMask free;
  int max_iter = 200;
};

struct SpinInput {
  std::vector<double> thicknesses_um;
  double area_mm2 = 9.0;
  double density_m3 = kYigSpinDensity;
  std::optional<double> reference_thickness_um;
  std::optional<double> reference_spins;
  double reference_g_hz = 0.0;

  SpinReference reference() const;
};

struct OutputNames {
  std::string eigen = "eigen.csv";
  std::string spectrum = "spectrum.csv";
  std::string map = "map.csv";
  std::string time = "time.csv";
  std::string verdict = "verdict.json";
  std::string fit = "fit.json";
  std::string phase = "phase.csv";
  std::string spin = "spin.csv";
};

/// Everything a pmc run needs, already converted to module units (rad/s for
/// rates, Hz where the modules ask for Hz).
struct RunConfig {
  std::filesystem::path source;

  std::optional<HybridSystem> system;
  KittelParams kittel;
  FrequencyGrid grid;

  std::vector<double> sweep_alphas;
  std::vector<double> sweep_betas;   // empty, or one per alpha
  std::vector<double> sweep_g;       // rad/s; empty, or one per alpha
  std::vector<double> sweep_fields;  // Oe

  std::vector<DampingRow> table;
  std::optional<ClassifyInput> classify;
  Dispersion dispersion = Dispersion::anti_crossing;

  Window window = Window::none;
  int pad_factor = 4;

  std::optional<FitInput> fit;

  std::vector<double> phase_alphas;
  std::vector<double> phase_betas;
  std::vector<double> phase_g_hz;

  std::optional<SpinInput> spin;

  CouplingConvention convention = CouplingConvention::half_gap;
  double prominence = 0.05;

  std::optional<std::filesystem::path> output_dir;
  OutputNames output;
  double db_reference = 1.0;
};

RunConfig build_run_config(const ConfigDocument& doc,
                           const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace pmc::io
