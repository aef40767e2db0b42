#include "commands.hpp"

#include <cstdlib>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <string>

#include "pmc/errors.hpp"
#include "pmc/io/config.hpp"
#include "pmc/io/formats.hpp"
#include "pmc/purcell.hpp"
#include "pmc/spectral_analysis.hpp"
#include "pmc/transmission.hpp"
#include "pmc/units.hpp"

namespace pmc::cli {

namespace fs = std::filesystem;
using io::ConfigError;
using io::RunConfig;

namespace {

struct Context {
  RunConfig cfg;
  fs::path out_dir;
  std::ostream& out;
};

const HybridSystem& need_system(const RunConfig& cfg) {
  if (!cfg.system) throw ConfigError(cfg.source.string() + ": [photon] section is required");
  return *cfg.system;
}

void emit(const Context& ctx, const std::string& name, const std::string& content) {
  const auto path = ctx.out_dir / name;
  io::write_file_atomic(path, content);
  ctx.out << "wrote " << path.string() << '\n';
}

void cmd_eigen(Context& ctx) {
  const auto& cfg = ctx.cfg;
  std::vector<io::EigenRow> rows;
  if (!cfg.table.empty()) {
    const HybridSystem base = cfg.system.value_or(HybridSystem{});
    for (const auto& r : cfg.table) {
      HybridSystem sys = base;
      sys.photon.omega = r.omega_c;
      sys.photon.intrinsic_damping = damping_constant(r.K_c, r.omega_c);
      sys.magnon.omega = r.omega_m;
      sys.magnon.intrinsic_damping = r.alpha;
      sys.g = r.g;
      sys.validate();
      rows.push_back(io::make_eigen_row(sys));
    }
  } else if (!cfg.sweep_alphas.empty()) {
    const auto& base = need_system(cfg);
    for (std::size_t i = 0; i < cfg.sweep_alphas.size(); ++i) {
      HybridSystem sys = base;
      sys.magnon.intrinsic_damping = cfg.sweep_alphas[i];
      if (!cfg.sweep_betas.empty()) sys.photon.intrinsic_damping = cfg.sweep_betas[i];
      if (!cfg.sweep_g.empty()) sys.g = cfg.sweep_g[i];
      sys.validate();
      rows.push_back(io::make_eigen_row(sys));
    }
  }
  emit(ctx, cfg.output.eigen, io::eigen_csv(rows));
}

void cmd_spectrum(Context& ctx) {
  const auto spec = spectrum(need_system(ctx.cfg), ctx.cfg.grid);
  emit(ctx, ctx.cfg.output.spectrum, io::spectrum_csv(spec, ctx.cfg.db_reference));
  const auto report = find_peaks(spec, ctx.cfg.prominence);
  ctx.out << "peaks " << report.peaks.size() << '\n';
  if (report.gap) ctx.out << "gap_Hz " << io::format_number(*report.gap) << '\n';
}

void cmd_map(Context& ctx) {
  const auto& cfg = ctx.cfg;
  FieldSweepMap map;
  if (!cfg.sweep_fields.empty())
    map = field_sweep(need_system(cfg), cfg.kittel, cfg.sweep_fields, cfg.grid);
  emit(ctx, cfg.output.map, io::map_csv(map, cfg.db_reference));
}

void cmd_timedomain(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto spec = spectrum(need_system(cfg), cfg.grid);
  const auto trace = time_domain(spec, cfg.window, cfg.pad_factor);
  emit(ctx, cfg.output.time, io::time_csv(trace));
  const double rate = envelope_decay_rate(trace);
  ctx.out << "decay_rate_per_s " << io::format_number(rate) << '\n'
          << "decay_time_s " << io::format_number(1.0 / rate) << '\n'
          << "decay_rate_Hz " << io::format_number(units::hertz(rate)) << '\n'
          << "edge_warning " << (trace.edge_warning ? "yes" : "no") << '\n';
}

void cmd_classify(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.classify && cfg.table.empty())
    throw ConfigError(cfg.source.string() + ": classify needs a [classify] or [table] section");
  io::VerdictReport report;
  if (cfg.classify)
    report.single = classify(cfg.classify->K_m_hz, cfg.classify->K_c_hz, cfg.classify->g_hz,
                             cfg.dispersion);
  const auto verdicts = classify_table(cfg.table, cfg.dispersion);
  for (std::size_t i = 0; i < verdicts.size(); ++i)
    report.rows.push_back({cfg.table[i].alpha, verdicts[i]});
  emit(ctx, cfg.output.verdict, io::verdict_json(report));
  if (report.single) ctx.out << "regime " << to_string(report.single->regime) << '\n';
  if (!report.rows.empty()) {
    ctx.out << "purcell";
    for (const auto& r : report.rows) ctx.out << ' ' << (r.verdict.purcell() ? "Yes" : "No");
    ctx.out << '\n';
  }
}

void cmd_fit(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.fit) throw ConfigError(cfg.source.string() + ": fit needs a [fit] section");
  const auto& init = need_system(cfg);
  const auto data = io::parse_spectrum_csv(io::read_file(cfg.fit->data));
  const auto mags = data.magnitudes();
  const auto result = fit_model(data.grid, mags, init, cfg.fit->free, cfg.fit->max_iter);
  emit(ctx, cfg.output.fit, io::fit_json(result));
  ctx.out << "converged " << (result.converged ? "yes" : "no") << '\n'
          << "iterations " << result.iterations << '\n'
          << "residual_norm " << io::format_number(result.residual_norm) << '\n';
}

void cmd_phase(Context& ctx) {
  const auto& cfg = ctx.cfg;
  const auto pd = phase_diagram(cfg.phase_alphas, cfg.phase_betas, cfg.phase_g_hz,
                                need_system(cfg).photon.omega);
  emit(ctx, cfg.output.phase, io::phase_csv(pd));
  std::size_t inside = 0;
  for (auto m : pd.purcell_mask) inside += m;
  ctx.out << "points " << pd.re_delta.size() << '\n' << "purcell_points " << inside << '\n';
}

void cmd_spinscale(Context& ctx) {
  const auto& cfg = ctx.cfg;
  if (!cfg.spin) throw ConfigError(cfg.source.string() + ": spinscale needs a [spin] section");
  const auto& s = *cfg.spin;
  const auto result = spin_scaling(s.thicknesses_um, s.area_mm2, s.density_m3, s.reference());
  emit(ctx, cfg.output.spin, io::spin_csv(result.entries));
  ctx.out << "g0_Hz " << io::format_number(result.g0_hz) << '\n'
          << "fit_g0_Hz " << io::format_number(result.fit.g0_hz) << '\n'
          << "fit_residual " << io::format_number(result.fit.residual) << '\n';
}

using Handler = std::function<void(Context&)>;

const std::map<std::string_view, Handler>& handlers() {
  static const std::map<std::string_view, Handler> h{
      {"eigen", cmd_eigen},         {"spectrum", cmd_spectrum}, {"map", cmd_map},
      {"timedomain", cmd_timedomain}, {"classify", cmd_classify}, {"fit", cmd_fit},
      {"phase", cmd_phase},         {"spinscale", cmd_spinscale},
  };
  return h;
}

}  // namespace

const std::vector<CommandInfo>& commands() {
  static const std::vector<CommandInfo> list{
      {"eigen", "complex eigenfrequencies per damping row -> eigen CSV"},
      {"spectrum", "S21 over the frequency grid -> spectrum CSV"},
      {"map", "S21 magnitude over a bias-field sweep -> long-format map CSV"},
      {"timedomain", "impulse-response envelope of the spectrum -> time CSV"},
      {"classify", "regime verdicts for [classify] and [table] -> verdict JSON"},
      {"fit", "least-squares fit of a spectrum CSV -> fit JSON"},
      {"phase", "Re(gap) and Purcell mask over (alpha, beta, g) -> phase CSV"},
      {"spinscale", "g = g0 sqrt(N) over film thicknesses -> spin CSV"},
  };
  return list;
}

fs::path resolve_output_dir(const std::optional<fs::path>& flag,
                            const std::optional<fs::path>& config_dir) {
  if (flag) return *flag;
  if (const char* env = std::getenv("PMC_OUTPUT_DIR"); env && *env) return fs::path(env);
  if (config_dir) return *config_dir;
  return fs::current_path();
}

int run_command(std::string_view name, const fs::path& config,
                const std::optional<fs::path>& output_dir, std::ostream& out,
                std::ostream& err) {
  const auto it = handlers().find(name);
  if (it == handlers().end()) {
    err << "pmc: unknown command '" << name << "'\n";
    return kExitConfig;
  }
  try {
    Context ctx{io::load_run_config(config), {}, out};
    ctx.out_dir = resolve_output_dir(output_dir, ctx.cfg.output_dir);
    std::error_code ec;
    fs::create_directories(ctx.out_dir, ec);
    if (ec) throw io::FormatError(ctx.out_dir.string() + ": " + ec.message());
    try {
      it->second(ctx);
    } catch (const InvalidParameter& e) {
      // Parameter combinations assembled from valid fields, e.g. a table row.
      throw ConfigError(config.string() + ": " + e.what());
    }
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "pmc " << name << ": config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const io::FormatError& e) {
    err << "pmc " << name << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "pmc " << name << ": " << e.what() << '\n';
    return kExitConfig;
  } catch (const Error& e) {
    err << "pmc " << name << ": numeric error (config " << config.string()
        << "): " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace pmc::cli
