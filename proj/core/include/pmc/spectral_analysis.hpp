#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "pmc/transmission.hpp"

namespace pmc {

struct Peak {
  double center = 0.0;  // Hz
  double hwhm = 0.0;    // Hz
  double height = 0.0;  // |S21|
};

struct PeakReport {
  std::vector<Peak> peaks;    // sorted by center
  std::optional<double> gap;  // Hz, separation of the two tallest peaks
};

/// Local maxima of |S21| whose topographic prominence is at least
/// `prominence_frac`·max|S21|. Centres are refined with a 3-point parabola and
/// HWHM comes from linearly interpolated half-height crossings.
PeakReport find_peaks(const ComplexSpectrum& spec, double prominence_frac = 0.05);
PeakReport find_peaks(const FrequencyGrid& grid, std::span<const double> magnitudes,
                      double prominence_frac = 0.05);

/// How a resonant peak gap maps onto g/2π. In these transmission spectra the lossless
/// splitting is 2g, so half_gap is the default.
enum class CouplingConvention { half_gap, full_gap };

/// g/2π in Hz read off a spectrum taken at ω_c = ω_m; nullopt for one peak.
std::optional<double> extract_coupling(
    const ComplexSpectrum& spec_at_resonance,
    CouplingConvention convention = CouplingConvention::half_gap,
    double prominence_frac = 0.05);

// ---------------------------------------------------------------------------
// Model fitting

enum class FitParameter : std::size_t { g = 0, alpha, beta, gamma_c, gamma_m };
inline constexpr std::size_t kFitParameterCount = 5;

struct FreeMask {
  std::array<bool, kFitParameterCount> free{};

  static FreeMask of(std::initializer_list<FitParameter> params) {
    FreeMask m;
    for (auto p : params) m.free[static_cast<std::size_t>(p)] = true;
    return m;
  }
  bool operator[](FitParameter p) const { return free[static_cast<std::size_t>(p)]; }
  std::size_t count() const;
};

struct FitResult {
  HybridSystem params;
  double residual_norm = 0.0;  // ‖|S21|model − |S21|data‖₂
  int iterations = 0;
  bool converged = false;
  int gradient_fallbacks = 0;  // singular normal equations → gradient step
  std::vector<double> residual_history;  // residual after each accepted step
};

/// Damped Gauss–Newton (Levenberg–Marquardt) fit of |S21| data.
///
/// Free parameters are drawn from (g, α, β, γ_c, γ_m); frequencies stay at
/// `init`. Parameters are projected onto ≥ 0 after every step.
FitResult fit_model(const FrequencyGrid& grid, std::span<const double> data,
                    const HybridSystem& init, FreeMask mask, int max_iter = 200);

/// Get/set one fit parameter on a system (angular units for rates).
double get_parameter(const HybridSystem& sys, FitParameter p);
void set_parameter(HybridSystem& sys, FitParameter p, double value);

/// Jacobian of the |S21| residual with respect to the free parameters,
/// row-major (rows = grid points, cols = free parameters in enum order).
struct Jacobian {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;
  double operator()(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};
Jacobian forward_difference_jacobian(const FrequencyGrid& grid, const HybridSystem& at,
                                     FreeMask mask);
Jacobian central_difference_jacobian(const FrequencyGrid& grid, const HybridSystem& at,
                                     FreeMask mask);

/// Initial guess: β and γ_c from a bare-cavity line, α from a target magnon
/// HWHM (Hz) and g from the resonant peak gap.
HybridSystem initial_guess(const ComplexSpectrum& bare_cavity,
                           const ComplexSpectrum& coupled_at_resonance,
                           double magnon_hwhm_hz, double gamma_m,
                           CouplingConvention convention = CouplingConvention::half_gap);

// ---------------------------------------------------------------------------

struct LinewidthRow {
  double alpha = 0.0;
  std::vector<double> centers;  // Hz
  std::vector<double> fwhm;     // Hz
  std::optional<double> gap;    // Hz
};

/// Resonant spectra for each α on `grid`, summarised by peak centres and FWHM.
std::vector<LinewidthRow> linewidth_vs_alpha(std::span<const double> alphas,
                                             const HybridSystem& base,
                                             const FrequencyGrid& grid,
                                             double prominence_frac = 0.05);

}  // namespace pmc
