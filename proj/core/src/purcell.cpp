#include "pmc/purcell.hpp"

#include <cmath>
#include <sstream>

#include "detail/parallel.hpp"
#include "pmc/errors.hpp"

namespace pmc {

namespace {

void require_non_negative(std::string_view what, double v) {
  if (!std::isfinite(v) || v < 0.0) {
    std::ostringstream os;
    os << what << " = " << v << ": must be finite and >= 0";
    throw InvalidParameter(os.str());
  }
}

void require_axis(std::string_view name, std::span<const double> axis) {
  if (axis.empty()) {
    std::ostringstream os;
    os << "phase_diagram: " << name << " axis is empty";
    throw InvalidParameter(os.str());
  }
  for (std::size_t i = 0; i < axis.size(); ++i) {
    require_non_negative(name, axis[i]);
    if (i > 0 && !(axis[i] > axis[i - 1])) {
      std::ostringstream os;
      os << "phase_diagram: " << name << " axis must be strictly increasing (index " << i
         << ")";
      throw InvalidParameter(os.str());
    }
  }
}

}  // namespace

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::strong_coupling: return "strong_coupling";
    case Regime::purcell: return "purcell";
    case Regime::weak: return "weak";
  }
  return "unknown";
}

std::string_view to_string(Dispersion d) {
  return d == Dispersion::anti_crossing ? "anti_crossing" : "crossing";
}

RegimeVerdict classify(double K_m, double K_c, double g, Dispersion dispersion) {
  require_non_negative("classify: K_m", K_m);
  require_non_negative("classify: K_c", K_c);
  require_non_negative("classify: g", g);

  RegimeVerdict v;
  v.dispersion = dispersion;
  v.terms = {K_m, K_c, g, 0.5 * (K_m - K_c)};
  const double lhs = v.terms.lhs;

  const bool in_window = dispersion == Dispersion::anti_crossing
                             ? (lhs < g && g <= K_m)
                             : (lhs >= g && g > K_m);
  if (in_window) {
    v.regime = Regime::purcell;
  } else if (g > K_m && g > lhs) {
    v.regime = Regime::strong_coupling;
  } else {
    v.regime = Regime::weak;
  }
  return v;
}

std::vector<RegimeVerdict> classify_table(std::span<const DampingRow> rows,
                                          Dispersion dispersion) {
  std::vector<RegimeVerdict> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    require_non_negative("classify_table: alpha", row.alpha);
    if (!(row.omega_m > 0.0)) throw InvalidParameter("classify_table: omega_m must be > 0");
    const double K_m = units::hertz(hwhm_linewidth(row.alpha, row.omega_m));
    out.push_back(classify(K_m, units::hertz(row.K_c), units::hertz(row.g), dispersion));
  }
  return out;
}

PhaseDiagram phase_diagram(std::span<const double> alpha_axis,
                           std::span<const double> beta_axis,
                           std::span<const double> g_axis_hz, double omega_c,
                           unsigned threads) {
  require_axis("alpha", alpha_axis);
  require_axis("beta", beta_axis);
  require_axis("g", g_axis_hz);
  if (!std::isfinite(omega_c) || omega_c <= 0.0)
    throw InvalidParameter("phase_diagram: omega_c must be finite and > 0");

  PhaseDiagram pd;
  pd.alpha_axis.assign(alpha_axis.begin(), alpha_axis.end());
  pd.beta_axis.assign(beta_axis.begin(), beta_axis.end());
  pd.g_axis.assign(g_axis_hz.begin(), g_axis_hz.end());
  const std::size_t total = alpha_axis.size() * beta_axis.size() * g_axis_hz.size();
  pd.re_delta.resize(total);
  pd.purcell_mask.resize(total);

  const double omega_hz = units::hertz(omega_c);
  detail::parallel_for(
      alpha_axis.size(),
      [&](std::size_t i) {
        for (std::size_t j = 0; j < beta_axis.size(); ++j) {
          for (std::size_t k = 0; k < g_axis_hz.size(); ++k) {
            HybridSystem sys{.photon = {omega_c, beta_axis[j], 0.0},
                             .magnon = {omega_c, alpha_axis[i], 0.0},
                             .g = units::angular(g_axis_hz[k])};
            const std::size_t idx = pd.index(i, j, k);
            pd.re_delta[idx] = std::max(0.0, mode_gap(sys).real());
            const auto verdict = classify(alpha_axis[i] * omega_hz, beta_axis[j] * omega_hz,
                                          g_axis_hz[k], Dispersion::anti_crossing);
            pd.purcell_mask[idx] = verdict.purcell() ? 1 : 0;
          }
        }
      },
      threads);
  return pd;
}

double spin_count(double thickness_um, double area_mm2, double spin_density_m3) {
  if (!(thickness_um > 0.0) || !(area_mm2 > 0.0) || !(spin_density_m3 > 0.0) ||
      !std::isfinite(thickness_um) || !std::isfinite(area_mm2) ||
      !std::isfinite(spin_density_m3))
    throw InvalidParameter("spin_count: thickness, area and density must be finite and > 0");
  return spin_density_m3 * (area_mm2 * 1e-6) * (thickness_um * 1e-6);
}

SqrtLawFit fit_sqrt_law(std::span<const double> spins, std::span<const double> g_hz) {
  if (spins.empty() || spins.size() != g_hz.size())
    throw InvalidParameter("fit_sqrt_law: need matching, non-empty N and g lists");
  double num = 0.0, den = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < spins.size(); ++i) {
    if (!(spins[i] > 0.0)) throw InvalidParameter("fit_sqrt_law: N must be > 0");
    num += g_hz[i] * std::sqrt(spins[i]);
    den += spins[i];
    norm += g_hz[i] * g_hz[i];
  }
  SqrtLawFit fit;
  fit.g0_hz = num / den;
  double ss = 0.0;
  for (std::size_t i = 0; i < spins.size(); ++i) {
    const double r = g_hz[i] - fit.g0_hz * std::sqrt(spins[i]);
    ss += r * r;
  }
  fit.residual = norm > 0.0 ? std::sqrt(ss / norm) : std::sqrt(ss);
  return fit;
}

SpinScaling spin_scaling(std::span<const double> thicknesses_um, double area_mm2,
                         double spin_density_m3, SpinReference reference) {
  if (thicknesses_um.empty()) throw InvalidParameter("spin_scaling: no thicknesses");
  if (!(reference.spins > 0.0) || !(reference.g_hz > 0.0) ||
      !std::isfinite(reference.spins) || !std::isfinite(reference.g_hz))
    throw InvalidParameter("spin_scaling: reference N and g must be finite and > 0");

  SpinScaling out;
  out.g0_hz = reference.g_hz / std::sqrt(reference.spins);
  std::vector<double> n, g;
  for (std::size_t i = 0; i < thicknesses_um.size(); ++i) {
    if (i > 0 && !(thicknesses_um[i] > thicknesses_um[i - 1]))
      throw InvalidParameter("spin_scaling: thicknesses must be strictly increasing");
    const double spins = spin_count(thicknesses_um[i], area_mm2, spin_density_m3);
    const double gi = reference.g_hz * std::sqrt(spins / reference.spins);
    out.entries.push_back({thicknesses_um[i], spins, gi});
    n.push_back(spins);
    g.push_back(gi);
  }
  out.fit = fit_sqrt_law(n, g);
  return out;
}

}  // namespace pmc
