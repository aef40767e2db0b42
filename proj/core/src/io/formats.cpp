#include "pmc/io/formats.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <system_error>

#include "json.hpp"

#include "pmc/errors.hpp"
#include "pmc/units.hpp"

namespace pmc::io {

namespace {

using nlohmann::json;

constexpr int kDigits = 12;

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  while (true) {
    const auto p = s.find(sep);
    out.push_back(s.substr(0, p));
    if (p == std::string_view::npos) break;
    s.remove_prefix(p + 1);
  }
  return out;
}

struct Csv {
  std::vector<std::vector<double>> rows;
};

// Parses a numeric CSV whose header must equal `header` exactly.
Csv parse_csv(std::string_view text, std::string_view header,
              std::size_t text_column = std::string_view::npos,
              std::vector<std::string>* text_values = nullptr) {
  Csv csv;
  std::size_t line_no = 0;
  bool seen_header = false;
  const std::size_t columns = split(header, ',').size();
  for (auto line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header)
        throw FormatError("line 1: expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    const auto cells = split(line, ',');
    if (cells.size() != columns)
      throw FormatError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(columns) + " columns");
    std::vector<double> row;
    row.reserve(columns);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (c == text_column) {
        text_values->emplace_back(cells[c]);
        row.push_back(0.0);
        continue;
      }
      try {
        row.push_back(parse_number(cells[c]));
      } catch (const FormatError& e) {
        throw FormatError("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    csv.rows.push_back(std::move(row));
  }
  if (!seen_header) throw FormatError("missing header '" + std::string(header) + "'");
  return csv;
}

// Rebuilds a uniform grid from its sample frequencies.
FrequencyGrid grid_from(const std::vector<double>& f) {
  if (f.size() < 2) throw FormatError("a frequency grid needs at least 2 points");
  FrequencyGrid g{f.front(), f.back(), f.size()};
  const double tol = 1e-9 * std::max(std::abs(g.stop), std::abs(g.start)) + 1e-6 * g.step();
  for (std::size_t i = 0; i < f.size(); ++i)
    if (std::abs(f[i] - g.at(i)) > tol)
      throw FormatError("frequency column is not a uniform ascending grid");
  return g;
}

std::vector<double> unique_sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

std::size_t position(const std::vector<double>& axis, double v) {
  const auto it = std::lower_bound(axis.begin(), axis.end(), v);
  return static_cast<std::size_t>(it - axis.begin());
}

json number(double v) { return round_significant(v); }

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key))
    throw FormatError(std::string("missing JSON member '") + key + "'");
  return j.at(key);
}

double member_number(const json& j, const char* key) {
  const auto& v = member(j, key);
  if (!v.is_number()) throw FormatError(std::string("member '") + key + "' is not a number");
  return v.get<double>();
}

Regime regime_from(const std::string& s) {
  if (s == "strong_coupling") return Regime::strong_coupling;
  if (s == "purcell") return Regime::purcell;
  if (s == "weak") return Regime::weak;
  throw FormatError("unknown regime '" + s + "'");
}

Dispersion dispersion_from(const std::string& s) {
  if (s == "anti_crossing") return Dispersion::anti_crossing;
  if (s == "crossing") return Dispersion::crossing;
  throw FormatError("unknown dispersion '" + s + "'");
}

json verdict_object(const RegimeVerdict& v) {
  return json{{"K_m_Hz", number(v.terms.K_m)}, {"K_c_Hz", number(v.terms.K_c)},
              {"g_Hz", number(v.terms.g)},     {"lhs_Hz", number(v.terms.lhs)},
              {"regime", to_string(v.regime)}, {"dispersion", to_string(v.dispersion)},
              {"purcell", v.purcell() ? "Yes" : "No"}};
}

RegimeVerdict verdict_from(const json& j) {
  RegimeVerdict v;
  v.terms = {member_number(j, "K_m_Hz"), member_number(j, "K_c_Hz"),
             member_number(j, "g_Hz"), member_number(j, "lhs_Hz")};
  v.regime = regime_from(member(j, "regime").get<std::string>());
  v.dispersion = dispersion_from(member(j, "dispersion").get<std::string>());
  const auto p = member(j, "purcell").get<std::string>();
  if ((p == "Yes") != v.purcell() || (p != "Yes" && p != "No"))
    throw FormatError("purcell flag '" + p + "' disagrees with regime");
  return v;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace

std::string format_number(double v) {
  if (!std::isfinite(v)) throw FormatError("cannot format non-finite value");
  if (v == 0.0) return "0";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, kDigits);
  return std::string(buf, r.ptr);
}

double round_significant(double v) {
  if (!std::isfinite(v) || v == 0.0) return v;
  return parse_number(format_number(v));
}

double parse_number(std::string_view text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last || first == last || !std::isfinite(v))
    throw FormatError("'" + std::string(text) + "' is not a finite number");
  return v;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  std::random_device rd;
  const fs::path tmp =
      path.parent_path() / ("." + path.filename().string() + ".tmp" + std::to_string(rd()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError(tmp.string() + ": cannot open for writing");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      throw FormatError(tmp.string() + ": write failed");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw FormatError(path.string() + ": " + ec.message());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError(path.string() + ": cannot open for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// ---------------------------------------------------------------------------

std::string spectrum_csv(const ComplexSpectrum& spec, double db_reference) {
  spec.validate();
  for (std::size_t i = 0; i < spec.samples.size(); ++i)
    if (spec.samples[i] == Complex{})
      throw DegenerateInput("spectrum_csv: |S21| = 0 at f = " + format_number(spec.grid.at(i)) +
                            " Hz, so mag_dB is undefined (are both extrinsic rates zero?)");
  const auto db = spec.magnitudes_db(db_reference);
  std::string out = "freq_Hz,re,im,mag,mag_dB\n";
  for (std::size_t i = 0; i < spec.samples.size(); ++i) {
    const auto s = spec.samples[i];
    out += format_number(spec.grid.at(i)) + ',' + format_number(s.real()) + ',' +
           format_number(s.imag()) + ',' + format_number(std::abs(s)) + ',' +
           format_number(db[i]) + '\n';
  }
  return out;
}

ComplexSpectrum parse_spectrum_csv(std::string_view text) {
  const auto csv = parse_csv(text, "freq_Hz,re,im,mag,mag_dB");
  std::vector<double> f;
  ComplexSpectrum spec;
  for (const auto& r : csv.rows) {
    f.push_back(r[0]);
    spec.samples.emplace_back(r[1], r[2]);
  }
  spec.grid = grid_from(f);
  return spec;
}

MapTable to_table(const FieldSweepMap& map, double db_reference) {
  MapTable t;
  t.fields = map.fields;
  for (std::size_t h = 0; h < map.spectra.size(); ++h)
    for (const auto& s : map.spectra[h].samples)
      if (s == Complex{})
        throw DegenerateInput("map_csv: |S21| = 0 at H = " + format_number(map.fields[h]) +
                              " Oe, so mag_dB is undefined");
  if (!map.spectra.empty()) t.grid = map.spectra.front().grid;
  for (const auto& s : map.spectra) t.mag_db.push_back(s.magnitudes_db(db_reference));
  return t;
}

std::string map_csv(const MapTable& t) {
  std::string out = "H_Oe,freq_Hz,mag_dB\n";
  for (std::size_t h = 0; h < t.fields.size(); ++h) {
    const std::string field = format_number(t.fields[h]) + ',';
    for (std::size_t i = 0; i < t.mag_db[h].size(); ++i)
      out += field + format_number(t.grid.at(i)) + ',' + format_number(t.mag_db[h][i]) + '\n';
  }
  return out;
}

std::string map_csv(const FieldSweepMap& map, double db_reference) {
  return map_csv(to_table(map, db_reference));
}

MapTable parse_map_csv(std::string_view text) {
  const auto csv = parse_csv(text, "H_Oe,freq_Hz,mag_dB");
  MapTable t;
  std::vector<double> freqs;
  for (const auto& r : csv.rows) {
    if (t.fields.empty() || r[0] != t.fields.back()) {
      t.fields.push_back(r[0]);
      t.mag_db.emplace_back();
    }
    if (t.fields.size() == 1) freqs.push_back(r[1]);
    t.mag_db.back().push_back(r[2]);
  }
  if (t.fields.empty()) return t;
  t.grid = grid_from(freqs);
  for (const auto& row : t.mag_db)
    if (row.size() != t.grid.points) throw FormatError("map rows have unequal lengths");
  return t;
}

std::string time_csv(const TimeTrace& trace) {
  std::string out = "t_s,mag\n";
  for (std::size_t i = 0; i < trace.times.size(); ++i)
    out += format_number(trace.times[i]) + ',' + format_number(trace.magnitudes[i]) + '\n';
  return out;
}

TimeTrace parse_time_csv(std::string_view text) {
  const auto csv = parse_csv(text, "t_s,mag");
  TimeTrace t;
  for (const auto& r : csv.rows) {
    t.times.push_back(r[0]);
    t.magnitudes.push_back(r[1]);
  }
  return t;
}

EigenRow make_eigen_row(const HybridSystem& sys) {
  const auto e = eigenmodes(sys);
  EigenRow row;
  row.alpha = sys.magnon.intrinsic_damping;
  row.upper_hz = e.upper / units::kTwoPi;
  row.lower_hz = e.lower / units::kTwoPi;
  row.gap_hz = (row.upper_hz - row.lower_hz).real();
  return row;
}

std::string eigen_csv(std::span<const EigenRow> rows) {
  std::string out = "alpha,re_plus_Hz,im_plus_Hz,re_minus_Hz,im_minus_Hz,gap_Hz\n";
  for (const auto& r : rows)
    out += format_number(r.alpha) + ',' + format_number(r.upper_hz.real()) + ',' +
           format_number(r.upper_hz.imag()) + ',' + format_number(r.lower_hz.real()) + ',' +
           format_number(r.lower_hz.imag()) + ',' + format_number(r.gap_hz) + '\n';
  return out;
}

std::vector<EigenRow> parse_eigen_csv(std::string_view text) {
  const auto csv =
      parse_csv(text, "alpha,re_plus_Hz,im_plus_Hz,re_minus_Hz,im_minus_Hz,gap_Hz");
  std::vector<EigenRow> rows;
  for (const auto& r : csv.rows)
    rows.push_back({r[0], {r[1], r[2]}, {r[3], r[4]}, r[5]});
  return rows;
}

std::string phase_csv(const PhaseDiagram& pd) {
  std::string out = "alpha,beta,g_Hz,re_delta_Hz,purcell\n";
  for (std::size_t i = 0; i < pd.alpha_axis.size(); ++i)
    for (std::size_t j = 0; j < pd.beta_axis.size(); ++j)
      for (std::size_t k = 0; k < pd.g_axis.size(); ++k)
        out += format_number(pd.alpha_axis[i]) + ',' + format_number(pd.beta_axis[j]) + ',' +
               format_number(pd.g_axis[k]) + ',' + format_number(pd.re_delta_at(i, j, k)) +
               ',' + (pd.purcell_at(i, j, k) ? "1" : "0") + '\n';
  return out;
}

PhaseDiagram parse_phase_csv(std::string_view text) {
  const auto csv = parse_csv(text, "alpha,beta,g_Hz,re_delta_Hz,purcell");
  PhaseDiagram pd;
  std::vector<double> a, b, g;
  for (const auto& r : csv.rows) {
    a.push_back(r[0]);
    b.push_back(r[1]);
    g.push_back(r[2]);
    if (r[4] != 0.0 && r[4] != 1.0) throw FormatError("purcell column must be 0 or 1");
  }
  pd.alpha_axis = unique_sorted(a);
  pd.beta_axis = unique_sorted(b);
  pd.g_axis = unique_sorted(g);
  const std::size_t n = pd.alpha_axis.size() * pd.beta_axis.size() * pd.g_axis.size();
  if (n != csv.rows.size()) throw FormatError("phase table is not a full grid");
  pd.re_delta.assign(n, 0.0);
  pd.purcell_mask.assign(n, 0);
  std::vector<bool> seen(n, false);
  for (const auto& r : csv.rows) {
    const auto idx = pd.index(position(pd.alpha_axis, r[0]), position(pd.beta_axis, r[1]),
                              position(pd.g_axis, r[2]));
    if (seen[idx]) throw FormatError("phase table repeats a grid point");
    seen[idx] = true;
    pd.re_delta[idx] = r[3];
    pd.purcell_mask[idx] = r[4] != 0.0 ? 1 : 0;
  }
  return pd;
}

std::string spin_csv(std::span<const SpinEntry> entries) {
  std::string out = "thickness_um,N,g_Hz\n";
  for (const auto& e : entries)
    out += format_number(e.thickness_um) + ',' + format_number(e.spins) + ',' +
           format_number(e.g_hz) + '\n';
  return out;
}

std::vector<SpinEntry> parse_spin_csv(std::string_view text) {
  const auto csv = parse_csv(text, "thickness_um,N,g_Hz");
  std::vector<SpinEntry> out;
  for (const auto& r : csv.rows) out.push_back({r[0], r[1], r[2]});
  return out;
}

// ---------------------------------------------------------------------------

std::string verdict_json(const VerdictReport& report) {
  json j = json::object();
  if (report.single) {
    j = verdict_object(*report.single);
  }
  json rows = json::array();
  json column = json::array();
  for (const auto& r : report.rows) {
    json o = verdict_object(r.verdict);
    o["alpha"] = number(r.alpha);
    rows.push_back(std::move(o));
    column.push_back(r.verdict.purcell() ? "Yes" : "No");
  }
  j["rows"] = std::move(rows);
  j["purcell_column"] = std::move(column);
  return j.dump(2) + '\n';
}

VerdictReport parse_verdict_json(std::string_view text) {
  const json j = parse_json(text);
  VerdictReport rep;
  try {
    if (j.contains("regime")) rep.single = verdict_from(j);
    const auto& rows = member(j, "rows");
    const auto& column = member(j, "purcell_column");
    if (!rows.is_array() || !column.is_array() || rows.size() != column.size())
      throw FormatError("rows and purcell_column must be arrays of equal length");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      VerdictRow r{member_number(rows[i], "alpha"), verdict_from(rows[i])};
      if ((column[i].get<std::string>() == "Yes") != r.verdict.purcell())
        throw FormatError("purcell_column disagrees with rows");
      rep.rows.push_back(r);
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed verdict JSON: ") + e.what());
  }
  return rep;
}

std::string fit_json(const FitResult& fit) {
  const auto& p = fit.params;
  json params{
      {"photon_frequency_Hz", number(units::hertz(p.photon.omega))},
      {"photon_damping", number(p.photon.intrinsic_damping)},
      {"photon_extrinsic_Hz", number(units::hertz(p.photon.extrinsic_rate))},
      {"magnon_frequency_Hz", number(units::hertz(p.magnon.omega))},
      {"magnon_damping", number(p.magnon.intrinsic_damping)},
      {"magnon_extrinsic_Hz", number(units::hertz(p.magnon.extrinsic_rate))},
      {"g_Hz", number(units::hertz(p.g))},
  };
  json history = json::array();
  for (double r : fit.residual_history) history.push_back(number(r));
  json j{{"params", std::move(params)},
         {"residual_norm", number(fit.residual_norm)},
         {"iterations", fit.iterations},
         {"converged", fit.converged},
         {"gradient_fallbacks", fit.gradient_fallbacks},
         {"residual_history", std::move(history)}};
  return j.dump(2) + '\n';
}

FitResult parse_fit_json(std::string_view text) {
  const json j = parse_json(text);
  FitResult fit;
  try {
    const auto& p = member(j, "params");
    fit.params.photon = {units::angular(member_number(p, "photon_frequency_Hz")),
                         member_number(p, "photon_damping"),
                         units::angular(member_number(p, "photon_extrinsic_Hz"))};
    fit.params.magnon = {units::angular(member_number(p, "magnon_frequency_Hz")),
                         member_number(p, "magnon_damping"),
                         units::angular(member_number(p, "magnon_extrinsic_Hz"))};
    fit.params.g = units::angular(member_number(p, "g_Hz"));
    fit.residual_norm = member_number(j, "residual_norm");
    fit.iterations = member(j, "iterations").get<int>();
    fit.converged = member(j, "converged").get<bool>();
    fit.gradient_fallbacks = member(j, "gradient_fallbacks").get<int>();
    if (j.contains("residual_history"))
      for (const auto& r : j.at("residual_history")) fit.residual_history.push_back(r.get<double>());
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed fit JSON: ") + e.what());
  }
  return fit;
}

}  // namespace pmc::io
