#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "pmc/core_model.hpp"

namespace pmc {

enum class Regime { strong_coupling, purcell, weak };
enum class Dispersion { anti_crossing, crossing };

std::string_view to_string(Regime r);
std::string_view to_string(Dispersion d);

struct RegimeTerms {
  double K_m = 0.0;  // magnon HWHM, Hz
  double K_c = 0.0;  // photon HWHM, Hz
  double g = 0.0;    // coupling, Hz
  double lhs = 0.0;  // (K_m − K_c)/2, Hz
};

struct RegimeVerdict {
  Regime regime = Regime::weak;
  RegimeTerms terms;
  Dispersion dispersion = Dispersion::anti_crossing;

  bool purcell() const { return regime == Regime::purcell; }
};

/// Purcell-window classification.
///
/// Anti-crossing: Purcell iff (K_m − K_c)/2 < g ≤ K_m, strong coupling iff g
/// exceeds both K_m and (K_m − K_c)/2, weak otherwise. Crossing uses the
/// mirrored window (K_m − K_c)/2 ≥ g > K_m. All inputs share one unit.
RegimeVerdict classify(double K_m, double K_c, double g,
                       Dispersion dispersion = Dispersion::anti_crossing);

/// One row of a damping table. Frequencies and rates are angular.
struct DampingRow {
  double alpha = 0.0;
  double omega_c = 0.0;
  double omega_m = 0.0;
  double K_c = 0.0;
  double g = 0.0;
};

/// Classifies each row with K_m = α·ω_m.
std::vector<RegimeVerdict> classify_table(std::span<const DampingRow> rows,
                                          Dispersion dispersion = Dispersion::anti_crossing);

/// Re(Δ) over an (α, β, g) grid at resonance with γ_c = γ_m = 0.
struct PhaseDiagram {
  std::vector<double> alpha_axis;
  std::vector<double> beta_axis;
  std::vector<double> g_axis;       // g/2π, Hz
  std::vector<double> re_delta;     // Hz, index(i, j, k)
  std::vector<std::uint8_t> purcell_mask;

  std::size_t index(std::size_t i, std::size_t j, std::size_t k) const {
    return (i * beta_axis.size() + j) * g_axis.size() + k;
  }
  double re_delta_at(std::size_t i, std::size_t j, std::size_t k) const {
    return re_delta[index(i, j, k)];
  }
  bool purcell_at(std::size_t i, std::size_t j, std::size_t k) const {
    return purcell_mask[index(i, j, k)] != 0;
  }
};

PhaseDiagram phase_diagram(std::span<const double> alpha_axis,
                           std::span<const double> beta_axis,
                           std::span<const double> g_axis_hz, double omega_c,
                           unsigned threads = 0);

// ---------------------------------------------------------------------------
// Collective g = g₀√N scaling

inline constexpr double kYigSpinDensity = 2.1e28;  // m⁻³

struct SpinReference {
  double spins = 0.0;  // N_ref
  double g_hz = 0.0;   // g_ref/2π
};

struct SpinEntry {
  double thickness_um = 0.0;
  double spins = 0.0;
  double g_hz = 0.0;
};

struct SqrtLawFit {
  double g0_hz = 0.0;     // argmin of Σ(g − g₀√N)²
  double residual = 0.0;  // ‖g − g₀√N‖ / ‖g‖
};

struct SpinScaling {
  std::vector<SpinEntry> entries;
  double g0_hz = 0.0;  // g_ref / √N_ref
  SqrtLawFit fit;
};

/// Number of spins in a film of the given thickness (µm) and area (mm²).
double spin_count(double thickness_um, double area_mm2, double spin_density_m3);

/// Least-squares g₀ through the origin for g against √N.
SqrtLawFit fit_sqrt_law(std::span<const double> spins, std::span<const double> g_hz);

SpinScaling spin_scaling(std::span<const double> thicknesses_um, double area_mm2,
                         double spin_density_m3, SpinReference reference);

}  // namespace pmc
