#include "pmc/io/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "pmc/errors.hpp"
#include "pmc/units.hpp"

namespace pmc::io {

namespace {

using units::angular;
using units::from_ghz;
using units::from_mhz;

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s{
      {"photon", {"frequency_GHz", "damping", "extrinsic_MHz"}},
      {"magnon", {"frequency_GHz", "field_Oe", "damping", "extrinsic_MHz"}},
      {"coupling", {"g_MHz"}},
      {"kittel", {"gyromagnetic_MHz_per_Oe", "magnetization_G"}},
      {"grid", {"start_GHz", "stop_GHz", "points"}},
      {"sweep", {"alphas", "betas", "g_MHz", "fields_Oe"}},
      {"table", {"alphas", "K_c_MHz", "g_MHz", "photon_GHz", "magnon_GHz"}},
      {"classify", {"K_m_MHz", "K_c_MHz", "g_MHz", "dispersion"}},
      {"timedomain", {"window", "pad_factor"}},
      {"fit", {"data", "free", "max_iter"}},
      {"phase", {"alphas", "betas", "g_MHz"}},
      {"spin",
       {"thicknesses_um", "area_mm2", "density_m3", "reference_thickness_um",
        "reference_N", "reference_g_MHz"}},
      {"analysis", {"coupling_convention", "prominence"}},
      {"output",
       {"dir", "eigen", "spectrum", "map", "time", "verdict", "fit", "phase", "spin",
        "db_reference"}},
  };
  return s;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

[[noreturn]] void fail(const std::string& source, int line, std::string_view section,
                       std::string_view key, std::string_view reason) {
  std::ostringstream os;
  os << source << ':' << line << ": [" << section << "]";
  if (!key.empty()) os << ' ' << key;
  os << ": " << reason;
  throw ConfigError(os.str());
}

// Typed access to one document, with errors addressed to the offending line.
class Reader {
 public:
  explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

  bool has(const std::string& section) const { return doc_.has_section(section); }
  bool has(const std::string& section, const std::string& key) const {
    return doc_.find(section, key) != nullptr;
  }

  std::optional<double> number(const std::string& section, const std::string& key) const {
    const auto* e = doc_.find(section, key);
    if (!e) return std::nullopt;
    return parse_double(*e, section, key, e->value);
  }

  double number_or(const std::string& section, const std::string& key, double fallback) const {
    return number(section, key).value_or(fallback);
  }

  double require_number(const std::string& section, const std::string& key) const {
    if (auto v = number(section, key)) return *v;
    fail(doc_.source(), 0, section, key, "required key is missing");
  }

  std::vector<double> list(const std::string& section, const std::string& key) const {
    const auto* e = doc_.find(section, key);
    if (!e) return {};
    std::vector<double> out;
    std::string_view rest = e->value;
    if (trim(rest).empty()) return out;
    while (true) {
      const auto comma = rest.find(',');
      const std::string item = trim(rest.substr(0, comma));
      out.push_back(parse_double(*e, section, key, item));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  std::optional<std::string> text(const std::string& section, const std::string& key) const {
    const auto* e = doc_.find(section, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  [[noreturn]] void reject(const std::string& section, const std::string& key,
                           std::string_view reason) const {
    const auto* e = doc_.find(section, key);
    fail(doc_.source(), e ? e->line : 0, section, key, reason);
  }

  void require_min(const std::string& section, const std::string& key, double v,
                   double lo, bool inclusive) const {
    if (inclusive ? v < lo : v <= lo) {
      std::ostringstream os;
      os << "value " << v << " must be " << (inclusive ? ">= " : "> ") << lo;
      reject(section, key, os.str());
    }
  }

  void require_list_min(const std::string& section, const std::string& key,
                        const std::vector<double>& v, double lo, bool inclusive) const {
    for (double x : v) require_min(section, key, x, lo, inclusive);
  }

 private:
  double parse_double(const ConfigDocument::Entry& e, std::string_view section,
                      std::string_view key, std::string_view text) const {
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (!text.empty() && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v)) {
      std::ostringstream os;
      os << "'" << text << "' is not a finite number";
      fail(doc_.source(), e.line, section, key, os.str());
    }
    return v;
  }

  const ConfigDocument& doc_;
};

HybridSystem read_system(const Reader& r, const KittelParams& kp) {
  const double fc = r.require_number("photon", "frequency_GHz");
  r.require_min("photon", "frequency_GHz", fc, 0.0, false);
  const double beta = r.number_or("photon", "damping", 0.0);
  r.require_min("photon", "damping", beta, 0.0, true);
  const double gc = r.number_or("photon", "extrinsic_MHz", 0.0);
  r.require_min("photon", "extrinsic_MHz", gc, 0.0, true);

  if (r.has("magnon", "frequency_GHz") && r.has("magnon", "field_Oe"))
    r.reject("magnon", "field_Oe", "give either frequency_GHz or field_Oe, not both");
  double omega_m = angular(from_ghz(fc));
  if (auto fm = r.number("magnon", "frequency_GHz")) {
    r.require_min("magnon", "frequency_GHz", *fm, 0.0, false);
    omega_m = angular(from_ghz(*fm));
  } else if (auto h = r.number("magnon", "field_Oe")) {
    r.require_min("magnon", "field_Oe", *h, 0.0, false);
    omega_m = kittel_frequency(*h, kp);
  }
  const double alpha = r.number_or("magnon", "damping", 0.0);
  r.require_min("magnon", "damping", alpha, 0.0, true);
  const double gm = r.number_or("magnon", "extrinsic_MHz", 0.0);
  r.require_min("magnon", "extrinsic_MHz", gm, 0.0, true);

  const double g = r.number_or("coupling", "g_MHz", 0.0);
  r.require_min("coupling", "g_MHz", g, 0.0, true);

  HybridSystem sys{
      .photon = {angular(from_ghz(fc)), beta, angular(from_mhz(gc))},
      .magnon = {omega_m, alpha, angular(from_mhz(gm))},
      .g = angular(from_mhz(g)),
  };
  sys.validate();
  return sys;
}

FreeMask parse_free(const Reader& r, const std::string& value) {
  static const std::map<std::string, FitParameter> names{
      {"g", FitParameter::g},
      {"alpha", FitParameter::alpha},
      {"beta", FitParameter::beta},
      {"gamma_c", FitParameter::gamma_c},
      {"gamma_m", FitParameter::gamma_m},
  };
  FreeMask mask;
  std::string_view rest = value;
  while (!trim(rest).empty()) {
    const auto comma = rest.find(',');
    const std::string name = trim(rest.substr(0, comma));
    const auto it = names.find(name);
    if (it == names.end())
      r.reject("fit", "free", "unknown parameter '" + name +
                                  "' (expected g, alpha, beta, gamma_c, gamma_m)");
    mask.free[static_cast<std::size_t>(it->second)] = true;
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (mask.count() == 0) r.reject("fit", "free", "at least one free parameter is required");
  return mask;
}

}  // namespace

ConfigDocument ConfigDocument::parse(std::istream& in, std::string source_name) {
  ConfigDocument doc;
  doc.source_ = std::move(source_name);
  std::string raw;
  std::string section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view view = raw;
    if (const auto hash = view.find('#'); hash != std::string_view::npos)
      view = view.substr(0, hash);
    const std::string content = trim(view);
    if (content.empty() || content.front() == ';') continue;

    if (content.front() == '[') {
      if (content.back() != ']') fail(doc.source_, line, content, "", "unterminated section header");
      section = trim(std::string_view(content).substr(1, content.size() - 2));
      if (!schema().contains(section)) fail(doc.source_, line, section, "", "unknown section");
      if (doc.section_lines_.contains(section))
        fail(doc.source_, line, section, "", "section appears twice");
      doc.section_lines_[section] = line;
      doc.sections_[section];
      continue;
    }

    const auto eq = content.find('=');
    if (eq == std::string::npos) fail(doc.source_, line, section, content, "expected key = value");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (section.empty()) fail(doc.source_, line, "", key, "key outside of any section");
    if (!schema().at(section).contains(key)) fail(doc.source_, line, section, key, "unknown key");
    auto& entries = doc.sections_[section];
    if (entries.contains(key)) fail(doc.source_, line, section, key, "key appears twice");
    entries[key] = Entry{value, line};
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  return parse(in, path.string());
}

bool ConfigDocument::has_section(const std::string& section) const {
  return sections_.contains(section);
}

const ConfigDocument::Entry* ConfigDocument::find(const std::string& section,
                                                  const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

SpinReference SpinInput::reference() const {
  double spins = 0.0;
  if (reference_spins) {
    spins = *reference_spins;
  } else if (reference_thickness_um) {
    spins = spin_count(*reference_thickness_um, area_mm2, density_m3);
  } else if (!thicknesses_um.empty()) {
    spins = spin_count(thicknesses_um.front(), area_mm2, density_m3);
  }
  return {spins, reference_g_hz};
}

RunConfig build_run_config(const ConfigDocument& doc, const std::filesystem::path& base_dir) {
  const Reader r(doc);
  RunConfig cfg;
  cfg.source = doc.source();

  const double gyro = r.number_or("kittel", "gyromagnetic_MHz_per_Oe", 2.8);
  r.require_min("kittel", "gyromagnetic_MHz_per_Oe", gyro, 0.0, false);
  const double ms = r.number_or("kittel", "magnetization_G", 1750.0);
  r.require_min("kittel", "magnetization_G", ms, 0.0, false);
  cfg.kittel = {angular(from_mhz(gyro)), ms};

  if (r.has("photon")) cfg.system = read_system(r, cfg.kittel);

  // Grid
  cfg.grid.start = from_ghz(r.number_or("grid", "start_GHz", 4.8));
  cfg.grid.stop = from_ghz(r.number_or("grid", "stop_GHz", 5.9));
  const double points = r.number_or("grid", "points", 2001);
  if (points < 2 || points != std::floor(points) || points > 1e8)
    r.reject("grid", "points", "must be an integer >= 2");
  cfg.grid.points = static_cast<std::size_t>(points);
  if (!(cfg.grid.start > 0.0)) r.reject("grid", "start_GHz", "must be > 0");
  if (!(cfg.grid.start < cfg.grid.stop)) r.reject("grid", "stop_GHz", "must exceed start_GHz");

  // Sweep
  cfg.sweep_alphas = r.list("sweep", "alphas");
  r.require_list_min("sweep", "alphas", cfg.sweep_alphas, 0.0, true);
  cfg.sweep_betas = r.list("sweep", "betas");
  r.require_list_min("sweep", "betas", cfg.sweep_betas, 0.0, true);
  if (!cfg.sweep_betas.empty() && cfg.sweep_betas.size() != cfg.sweep_alphas.size())
    r.reject("sweep", "betas", "must list one value per alpha");
  for (double g : r.list("sweep", "g_MHz")) {
    r.require_min("sweep", "g_MHz", g, 0.0, true);
    cfg.sweep_g.push_back(angular(from_mhz(g)));
  }
  if (!cfg.sweep_g.empty() && cfg.sweep_g.size() != cfg.sweep_alphas.size())
    r.reject("sweep", "g_MHz", "must list one value per alpha");
  cfg.sweep_fields = r.list("sweep", "fields_Oe");
  r.require_list_min("sweep", "fields_Oe", cfg.sweep_fields, 0.0, false);

  // Table
  if (r.has("table")) {
    const auto alphas = r.list("table", "alphas");
    const auto kc = r.list("table", "K_c_MHz");
    const auto g = r.list("table", "g_MHz");
    auto fc = r.list("table", "photon_GHz");
    auto fm = r.list("table", "magnon_GHz");
    r.require_list_min("table", "alphas", alphas, 0.0, true);
    r.require_list_min("table", "K_c_MHz", kc, 0.0, true);
    r.require_list_min("table", "g_MHz", g, 0.0, true);
    r.require_list_min("table", "photon_GHz", fc, 0.0, false);
    r.require_list_min("table", "magnon_GHz", fm, 0.0, false);
    if (kc.size() != alphas.size()) r.reject("table", "K_c_MHz", "must list one value per alpha");
    if (g.size() != alphas.size()) r.reject("table", "g_MHz", "must list one value per alpha");
    const double default_f = cfg.system ? units::hertz(cfg.system->photon.omega) * 1e-9 : 5.33;
    if (fc.empty()) fc.assign(alphas.size(), default_f);
    if (fm.empty()) fm = fc;
    if (fc.size() != alphas.size()) r.reject("table", "photon_GHz", "must list one value per alpha");
    if (fm.size() != alphas.size()) r.reject("table", "magnon_GHz", "must list one value per alpha");
    for (std::size_t i = 0; i < alphas.size(); ++i)
      cfg.table.push_back({alphas[i], angular(from_ghz(fc[i])), angular(from_ghz(fm[i])),
                           angular(from_mhz(kc[i])), angular(from_mhz(g[i]))});
  }

  // Classification
  if (auto d = r.text("classify", "dispersion")) {
    if (*d == "anti_crossing") cfg.dispersion = Dispersion::anti_crossing;
    else if (*d == "crossing") cfg.dispersion = Dispersion::crossing;
    else r.reject("classify", "dispersion", "expected anti_crossing or crossing");
  }
  if (r.has("classify", "K_m_MHz") || r.has("classify", "K_c_MHz") || r.has("classify", "g_MHz")) {
    ClassifyInput c;
    c.K_m_hz = from_mhz(r.require_number("classify", "K_m_MHz"));
    c.K_c_hz = from_mhz(r.require_number("classify", "K_c_MHz"));
    c.g_hz = from_mhz(r.require_number("classify", "g_MHz"));
    r.require_min("classify", "K_m_MHz", c.K_m_hz, 0.0, true);
    r.require_min("classify", "K_c_MHz", c.K_c_hz, 0.0, true);
    r.require_min("classify", "g_MHz", c.g_hz, 0.0, true);
    cfg.classify = c;
  }

  // Time domain
  if (auto w = r.text("timedomain", "window")) {
    if (*w == "none") cfg.window = Window::none;
    else if (*w == "hann") cfg.window = Window::hann;
    else r.reject("timedomain", "window", "expected none or hann");
  }
  const double pad = r.number_or("timedomain", "pad_factor", 4);
  if (pad < 1 || pad != std::floor(pad) || pad > 1024)
    r.reject("timedomain", "pad_factor", "must be an integer in [1, 1024]");
  cfg.pad_factor = static_cast<int>(pad);

  // Fit
  if (r.has("fit")) {
    FitInput fit;
    const auto data = r.text("fit", "data");
    if (!data || data->empty()) r.reject("fit", "data", "path to a spectrum CSV is required");
    fit.data = std::filesystem::path(*data);
    if (fit.data.is_relative()) fit.data = base_dir / fit.data;
    fit.free = parse_free(r, r.text("fit", "free").value_or("g,alpha,beta"));
    const double it = r.number_or("fit", "max_iter", 200);
    if (it < 1 || it != std::floor(it) || it > 1e6)
      r.reject("fit", "max_iter", "must be a positive integer");
    fit.max_iter = static_cast<int>(it);
    cfg.fit = fit;
  }

  // Phase diagram
  cfg.phase_alphas = r.list("phase", "alphas");
  cfg.phase_betas = r.list("phase", "betas");
  for (double g : r.list("phase", "g_MHz")) cfg.phase_g_hz.push_back(from_mhz(g));
  r.require_list_min("phase", "alphas", cfg.phase_alphas, 0.0, true);
  r.require_list_min("phase", "betas", cfg.phase_betas, 0.0, true);
  r.require_list_min("phase", "g_MHz", cfg.phase_g_hz, 0.0, true);
  auto increasing = [&](const char* key, const std::vector<double>& v) {
    if (!std::is_sorted(v.begin(), v.end()) ||
        std::adjacent_find(v.begin(), v.end()) != v.end())
      r.reject("phase", key, "axis must be strictly increasing");
  };
  increasing("alphas", cfg.phase_alphas);
  increasing("betas", cfg.phase_betas);
  increasing("g_MHz", cfg.phase_g_hz);

  // Spin scaling
  if (r.has("spin")) {
    SpinInput s;
    s.thicknesses_um = r.list("spin", "thicknesses_um");
    r.require_list_min("spin", "thicknesses_um", s.thicknesses_um, 0.0, false);
    s.area_mm2 = r.number_or("spin", "area_mm2", 9.0);
    r.require_min("spin", "area_mm2", s.area_mm2, 0.0, false);
    s.density_m3 = r.number_or("spin", "density_m3", kYigSpinDensity);
    r.require_min("spin", "density_m3", s.density_m3, 0.0, false);
    s.reference_thickness_um = r.number("spin", "reference_thickness_um");
    if (s.reference_thickness_um)
      r.require_min("spin", "reference_thickness_um", *s.reference_thickness_um, 0.0, false);
    s.reference_spins = r.number("spin", "reference_N");
    if (s.reference_spins) r.require_min("spin", "reference_N", *s.reference_spins, 0.0, false);
    if (s.reference_spins && s.reference_thickness_um)
      r.reject("spin", "reference_N", "give either reference_N or reference_thickness_um");
    s.reference_g_hz = from_mhz(r.require_number("spin", "reference_g_MHz"));
    r.require_min("spin", "reference_g_MHz", s.reference_g_hz, 0.0, false);
    cfg.spin = s;
  }

  // Analysis
  if (auto c = r.text("analysis", "coupling_convention")) {
    if (*c == "half_gap") cfg.convention = CouplingConvention::half_gap;
    else if (*c == "full_gap") cfg.convention = CouplingConvention::full_gap;
    else r.reject("analysis", "coupling_convention", "expected half_gap or full_gap");
  }
  cfg.prominence = r.number_or("analysis", "prominence", 0.05);
  if (!(cfg.prominence > 0.0 && cfg.prominence < 1.0))
    r.reject("analysis", "prominence", "must lie in (0, 1)");

  // Output
  if (auto d = r.text("output", "dir")) {
    std::filesystem::path p(*d);
    cfg.output_dir = p.is_relative() ? base_dir / p : p;
  }
  auto name = [&](const char* key, std::string& slot) {
    if (auto v = r.text("output", key)) {
      if (v->empty() || v->find('/') != std::string::npos)
        r.reject("output", key, "must be a plain file name");
      slot = *v;
    }
  };
  name("eigen", cfg.output.eigen);
  name("spectrum", cfg.output.spectrum);
  name("map", cfg.output.map);
  name("time", cfg.output.time);
  name("verdict", cfg.output.verdict);
  name("fit", cfg.output.fit);
  name("phase", cfg.output.phase);
  name("spin", cfg.output.spin);
  cfg.db_reference = r.number_or("output", "db_reference", 1.0);
  r.require_min("output", "db_reference", cfg.db_reference, 0.0, false);

  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  const auto doc = ConfigDocument::load(path);
  try {
    return build_run_config(doc, path.parent_path());
  } catch (const InvalidParameter& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace pmc::io
