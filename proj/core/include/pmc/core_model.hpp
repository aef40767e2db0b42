#pragma once

#include <array>
#include <complex>
#include <string_view>

#include "pmc/units.hpp"

namespace pmc {

using Complex = std::complex<double>;
using Matrix2c = std::array<std::array<Complex, 2>, 2>;

/// One damped resonant mode (cavity photon or magnon).
///
/// `omega` is the angular resonance frequency, `intrinsic_damping` the
/// dimensionless loss (β for the photon, α for the magnon) and
/// `extrinsic_rate` the angular dissipation rate γ into the feed line.
struct ModeParams {
  double omega = 0.0;
  double intrinsic_damping = 0.0;
  double extrinsic_rate = 0.0;

  /// ω̃ = ω − i·damping·ω
  Complex complex_frequency() const {
    return {omega, -intrinsic_damping * omega};
  }
  /// ω̃′ = ω̃ − iγ, the diagonal entry of the effective Hamiltonian.
  Complex dressed_frequency() const {
    return {omega, -intrinsic_damping * omega - extrinsic_rate};
  }
  /// HWHM linewidth from intrinsic damping alone, rad/s.
  double intrinsic_linewidth() const { return intrinsic_damping * omega; }

  /// Throws InvalidParameter naming `which` if any field is out of domain.
  void validate(std::string_view which) const;
};

struct HybridSystem {
  ModeParams photon;
  ModeParams magnon;
  double g = 0.0;  // coherent coupling, rad/s

  /// g′ = g − i·√(γ_c·γ_m); always derived, never stored.
  Complex effective_coupling() const;
  void validate() const;
  bool at_resonance(double relative_tolerance = 1e-9) const;
};

/// In-plane film dispersion parameters.
struct KittelParams {
  double gyromagnetic_ratio = units::angular(2.8e6);  // rad/s per Oe
  double effective_magnetization = 1750.0;            // 4πM_s, G (= Oe)

  void validate() const;
};

/// Convenience for building a system from the Hz-based quantities people quote.
HybridSystem make_system(double photon_hz, double beta, double gamma_c_hz,
                         double magnon_hz, double alpha, double gamma_m_hz,
                         double g_hz);

/// Dimensionless damping constant from an HWHM linewidth: K / ω.
double damping_constant(double hwhm, double omega);
/// Inverse of damping_constant.
double hwhm_linewidth(double damping, double omega);

Matrix2c effective_hamiltonian(const HybridSystem& sys);

struct EigenPair {
  Complex upper;  // ω̃₊
  Complex lower;  // ω̃₋
};

/// Complex eigenfrequencies of the effective Hamiltonian, rad/s.
///
/// Uses the principal square root and orders the pair so that
/// Re(upper) ≥ Re(lower), breaking real-part ties by the imaginary part.
EigenPair eigenmodes(const HybridSystem& sys);

/// Complex splitting Δ at the anti-crossing centre, in Hz.
///
/// Requires |ω_c − ω_m| / ω_c ≤ `resonance_tolerance`; throws
/// PreconditionError otherwise. Re(Δ) is the observable splitting.
Complex mode_gap(const HybridSystem& sys, double resonance_tolerance = 1e-9);

/// Magnon angular frequency at bias field `field_oe`: γ·√(H(H + 4πM_s)).
double kittel_frequency(double field_oe, const KittelParams& kp = {});

/// Field (Oe) at which kittel_frequency equals 2π·`frequency_hz`.
double resonance_field(double frequency_hz, const KittelParams& kp = {});

}  // namespace pmc
