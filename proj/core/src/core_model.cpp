#include "pmc/core_model.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "pmc/errors.hpp"

namespace pmc {

namespace {

[[noreturn]] void invalid(std::string_view which, std::string_view field,
                          double value, std::string_view requirement) {
  std::ostringstream os;
  os << which << '.' << field << " = " << value << ": " << requirement;
  throw InvalidParameter(os.str());
}

void require_finite(std::string_view which, std::string_view field, double v) {
  if (!std::isfinite(v)) invalid(which, field, v, "must be finite");
}

// Branch ordering: larger real part first; real-part ties go to the larger
// imaginary part.
bool precedes(Complex a, Complex b) {
  const double scale = std::max(std::abs(a), std::abs(b));
  const double tol = 1e-12 * scale;
  if (std::abs(a.real() - b.real()) > tol) return a.real() > b.real();
  return a.imag() >= b.imag();
}

EigenPair ordered(Complex a, Complex b) {
  return precedes(a, b) ? EigenPair{a, b} : EigenPair{b, a};
}

}  // namespace

void ModeParams::validate(std::string_view which) const {
  require_finite(which, "omega", omega);
  require_finite(which, "intrinsic_damping", intrinsic_damping);
  require_finite(which, "extrinsic_rate", extrinsic_rate);
  if (omega <= 0.0) invalid(which, "omega", omega, "must be > 0");
  if (intrinsic_damping < 0.0)
    invalid(which, "intrinsic_damping", intrinsic_damping, "must be >= 0");
  if (extrinsic_rate < 0.0)
    invalid(which, "extrinsic_rate", extrinsic_rate, "must be >= 0");
}

Complex HybridSystem::effective_coupling() const {
  return {g, -std::sqrt(photon.extrinsic_rate * magnon.extrinsic_rate)};
}

void HybridSystem::validate() const {
  photon.validate("photon");
  magnon.validate("magnon");
  require_finite("system", "g", g);
  if (g < 0.0) invalid("system", "g", g, "must be >= 0");
}

bool HybridSystem::at_resonance(double relative_tolerance) const {
  return std::abs(photon.omega - magnon.omega) <=
         relative_tolerance * photon.omega;
}

void KittelParams::validate() const {
  require_finite("kittel", "gyromagnetic_ratio", gyromagnetic_ratio);
  require_finite("kittel", "effective_magnetization", effective_magnetization);
  if (gyromagnetic_ratio <= 0.0)
    invalid("kittel", "gyromagnetic_ratio", gyromagnetic_ratio, "must be > 0");
  if (effective_magnetization <= 0.0)
    invalid("kittel", "effective_magnetization", effective_magnetization,
            "must be > 0");
}

HybridSystem make_system(double photon_hz, double beta, double gamma_c_hz,
                         double magnon_hz, double alpha, double gamma_m_hz,
                         double g_hz) {
  using units::angular;
  HybridSystem sys{
      .photon = {angular(photon_hz), beta, angular(gamma_c_hz)},
      .magnon = {angular(magnon_hz), alpha, angular(gamma_m_hz)},
      .g = angular(g_hz),
  };
  sys.validate();
  return sys;
}

double damping_constant(double hwhm, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    invalid("damping_constant", "omega", omega, "must be finite and > 0");
  if (!(hwhm >= 0.0) || !std::isfinite(hwhm))
    invalid("damping_constant", "hwhm", hwhm, "must be finite and >= 0");
  return hwhm / omega;
}

double hwhm_linewidth(double damping, double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    invalid("hwhm_linewidth", "omega", omega, "must be finite and > 0");
  if (!(damping >= 0.0) || !std::isfinite(damping))
    invalid("hwhm_linewidth", "damping", damping, "must be finite and >= 0");
  return damping * omega;
}

Matrix2c effective_hamiltonian(const HybridSystem& sys) {
  sys.validate();
  const Complex off = sys.effective_coupling();
  return {{{sys.photon.dressed_frequency(), off},
           {off, sys.magnon.dressed_frequency()}}};
}

EigenPair eigenmodes(const HybridSystem& sys) {
  sys.validate();
  const Complex wc = sys.photon.dressed_frequency();
  const Complex wm = sys.magnon.dressed_frequency();
  const Complex gp = sys.effective_coupling();

  // Uncoupled (including the doubly degenerate case): the diagonal is exact.
  if (gp == Complex{}) return ordered(wc, wm);

  const Complex diff = wc - wm;
  const Complex root = std::sqrt(diff * diff + 4.0 * gp * gp);
  const Complex mean = 0.5 * (wc + wm);
  return ordered(mean + 0.5 * root, mean - 0.5 * root);
}

Complex mode_gap(const HybridSystem& sys, double resonance_tolerance) {
  sys.validate();
  if (!sys.at_resonance(resonance_tolerance)) {
    std::ostringstream os;
    os << "mode_gap requires omega_c == omega_m (relative tolerance "
       << resonance_tolerance << "), got omega_c = " << sys.photon.omega
       << ", omega_m = " << sys.magnon.omega;
    throw PreconditionError(os.str());
  }
  const double wc = sys.photon.omega;
  const Complex gp = sys.effective_coupling();
  // Written as the imaginary offset between the dressed diagonal entries so
  // the radicand matches the eigenvalue route term for term.
  const Complex detuning{
      0.0, -(sys.photon.intrinsic_damping * wc + sys.photon.extrinsic_rate) +
               (sys.magnon.intrinsic_damping * sys.magnon.omega +
                sys.magnon.extrinsic_rate)};
  const Complex radicand = detuning * detuning + 4.0 * gp * gp;
  return std::sqrt(radicand) / units::kTwoPi;
}

double kittel_frequency(double field_oe, const KittelParams& kp) {
  kp.validate();
  if (!std::isfinite(field_oe) || field_oe < 0.0)
    invalid("kittel_frequency", "field_oe", field_oe, "must be finite and >= 0");
  return kp.gyromagnetic_ratio *
         std::sqrt(field_oe * (field_oe + kp.effective_magnetization));
}

double resonance_field(double frequency_hz, const KittelParams& kp) {
  kp.validate();
  if (!std::isfinite(frequency_hz) || frequency_hz <= 0.0)
    invalid("resonance_field", "frequency_hz", frequency_hz,
            "must be finite and > 0");
  // H² + M·H − x² = 0 with x = ω/γ; rationalised root avoids cancellation
  // as f → 0.
  const double x = units::angular(frequency_hz) / kp.gyromagnetic_ratio;
  const double m = kp.effective_magnetization;
  return 2.0 * x * x / (m + std::sqrt(m * m + 4.0 * x * x));
}

}  // namespace pmc
