#include "pmc/transmission.hpp"

#include <cmath>
#include <sstream>

#include "detail/parallel.hpp"
#include "pmc/errors.hpp"

namespace pmc {

std::vector<double> FrequencyGrid::frequencies() const {
  std::vector<double> f(points);
  for (std::size_t i = 0; i < points; ++i) f[i] = at(i);
  return f;
}

void FrequencyGrid::validate() const {
  if (!std::isfinite(start) || !std::isfinite(stop))
    throw InvalidParameter("grid: start and stop must be finite");
  if (!(start < stop)) {
    std::ostringstream os;
    os << "grid: start (" << start << ") must be < stop (" << stop << ")";
    throw InvalidParameter(os.str());
  }
  if (points < 2) throw InvalidParameter("grid: points must be >= 2");
}

std::vector<double> ComplexSpectrum::magnitudes() const {
  std::vector<double> m(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) m[i] = std::abs(samples[i]);
  return m;
}

std::vector<double> ComplexSpectrum::magnitudes_db(double reference) const {
  if (!(reference > 0.0) || !std::isfinite(reference))
    throw InvalidParameter("dB reference must be finite and > 0");
  std::vector<double> db(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i)
    db[i] = 20.0 * std::log10(std::abs(samples[i]) / reference);
  return db;
}

void ComplexSpectrum::validate() const {
  grid.validate();
  if (samples.size() != grid.points)
    throw InvalidParameter("spectrum: sample count does not match grid points");
  for (const auto& s : samples)
    if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
      throw InvalidParameter("spectrum: samples must be finite");
}

Complex s21_at(const HybridSystem& sys, double omega) {
  if (!std::isfinite(omega)) throw InvalidParameter("s21_at: omega must be finite");

  const double wc = sys.photon.omega;
  const double wm = sys.magnon.omega;
  const double beta = sys.photon.intrinsic_damping;
  const double alpha = sys.magnon.intrinsic_damping;
  const double gc = sys.photon.extrinsic_rate;
  const double gm = sys.magnon.extrinsic_rate;
  const double g = sys.g;
  const double cross = std::sqrt(gc * gm);
  constexpr Complex i{0.0, 1.0};

  const Complex numerator = 2.0 * alpha * gc * wm + 2.0 * beta * gm * wc -
                            4.0 * i * g * cross - 2.0 * i * gc * (omega - wm) -
                            2.0 * i * gm * (omega - wc);
  const Complex coupling = i * g + cross;
  const Complex denominator =
      coupling * coupling + (i * beta * wc + i * gc + omega - wc) *
                                (i * alpha * wm + i * gm + omega - wm);
  if (std::abs(denominator) < 1e-300) {
    // With g′ = 0 and one port closed, the idle mode's factor divides out of
    // numerator and denominator; only its own zero is left to cancel.
    if (g == 0.0 && gm == 0.0 && gc > 0.0)
      return -2.0 * i * gc / (i * beta * wc + i * gc + omega - wc);
    if (g == 0.0 && gc == 0.0 && gm > 0.0)
      return -2.0 * i * gm / (i * alpha * wm + i * gm + omega - wm);
    std::ostringstream os;
    os << "s21_at: vanishing denominator at omega = " << omega
       << " rad/s (no damping channel is open)";
    throw SingularityError(os.str());
  }
  return numerator / denominator;
}

std::vector<Complex> s21_samples(const HybridSystem& sys,
                                 std::span<const double> frequencies_hz) {
  sys.validate();
  std::vector<Complex> out(frequencies_hz.size());
  for (std::size_t k = 0; k < frequencies_hz.size(); ++k) {
    try {
      out[k] = s21_at(sys, units::angular(frequencies_hz[k]));
    } catch (const SingularityError& e) {
      std::ostringstream os;
      os << e.what() << " [index " << k << ", f = " << frequencies_hz[k]
         << " Hz]";
      throw SingularityError(os.str(), k);
    }
  }
  return out;
}

ComplexSpectrum spectrum(const HybridSystem& sys, const FrequencyGrid& grid) {
  grid.validate();
  const auto f = grid.frequencies();
  return {grid, s21_samples(sys, f), sys};
}

FieldSweepMap field_sweep(const HybridSystem& sys_template,
                          const KittelParams& kp,
                          std::span<const double> fields_oe,
                          const FrequencyGrid& grid, unsigned threads) {
  sys_template.validate();
  kp.validate();
  grid.validate();
  if (fields_oe.empty()) throw InvalidParameter("field_sweep: no fields given");
  for (std::size_t k = 0; k < fields_oe.size(); ++k) {
    if (!std::isfinite(fields_oe[k]) || fields_oe[k] <= 0.0) {
      std::ostringstream os;
      os << "field_sweep: fields[" << k << "] = " << fields_oe[k]
         << " Oe must be > 0 (zero field has no magnon mode)";
      throw InvalidParameter(os.str());
    }
  }

  FieldSweepMap map;
  map.fields.assign(fields_oe.begin(), fields_oe.end());
  map.spectra.resize(fields_oe.size());
  detail::parallel_for(
      fields_oe.size(),
      [&](std::size_t k) {
        HybridSystem sys = sys_template;
        sys.magnon.omega = kittel_frequency(fields_oe[k], kp);
        map.spectra[k] = spectrum(sys, grid);
      },
      threads);
  return map;
}

}  // namespace pmc
