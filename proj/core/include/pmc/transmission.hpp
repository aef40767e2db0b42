#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pmc/core_model.hpp"

namespace pmc {

/// Uniform frequency grid in Hz, endpoints inclusive.
struct FrequencyGrid {
  double start = 4.8e9;
  double stop = 5.9e9;
  std::size_t points = 2001;

  double step() const { return (stop - start) / static_cast<double>(points - 1); }
  double span() const { return stop - start; }
  double center() const { return 0.5 * (start + stop); }
  double at(std::size_t i) const {
    return i + 1 == points ? stop : start + static_cast<double>(i) * step();
  }
  std::vector<double> frequencies() const;
  void validate() const;
};

struct ComplexSpectrum {
  FrequencyGrid grid;
  std::vector<Complex> samples;        // S21 at grid.at(i)
  std::optional<HybridSystem> system;  // generating parameters, if known

  std::vector<double> magnitudes() const;
  /// 20·log10(|S21| / reference).
  std::vector<double> magnitudes_db(double reference = 1.0) const;
  void validate() const;
};

struct FieldSweepMap {
  std::vector<double> fields;             // Oe
  std::vector<ComplexSpectrum> spectra;   // one per field, shared grid
};

enum class Window { none, hann };

struct TimeTrace {
  std::vector<double> times;       // s, uniform from 0
  std::vector<double> magnitudes;  // |h(t)| / scale
  double carrier = 0.0;            // Hz, baseband reference
  double scale = 1.0;              // divisor applied to the raw |h(t)|
  bool edge_warning = false;       // |S21| at a grid edge ≥ 10 % of max

  double time_step() const { return times.size() > 1 ? times[1] - times[0] : 0.0; }
};

/// Closed-form transmission coefficient at angular frequency `omega`.
/// Throws SingularityError if the denominator magnitude drops below 1e-300.
Complex s21_at(const HybridSystem& sys, double omega);

/// S21 at arbitrary (not necessarily ordered) frequencies in Hz.
std::vector<Complex> s21_samples(const HybridSystem& sys,
                                 std::span<const double> frequencies_hz);

ComplexSpectrum spectrum(const HybridSystem& sys, const FrequencyGrid& grid);

/// Spectra over a list of bias fields. Only the magnon frequency follows the
/// field. `threads` = 0 picks the hardware concurrency; output order always
/// follows `fields_oe`.
FieldSweepMap field_sweep(const HybridSystem& sys_template,
                          const KittelParams& kp,
                          std::span<const double> fields_oe,
                          const FrequencyGrid& grid, unsigned threads = 0);

/// Causal impulse response magnitude of a spectrum via zero-padded DFT.
TimeTrace time_domain(const ComplexSpectrum& spec, Window window = Window::none,
                      int pad_factor = 4);

/// Σ|w·S21|²·Δf, the quantity preserved by time_domain before normalisation.
double spectral_energy(const ComplexSpectrum& spec, Window window = Window::none);
/// Σ|h(t)|²·Δt using the raw (scale-restored) trace.
double trace_energy(const TimeTrace& trace);

/// Exponential envelope decay rate (1/s) from a log-linear fit over the part of
/// the trace between e^-0.5 and e^-3 of its peak. For a Lorentzian line this
/// equals the angular HWHM.
double envelope_decay_rate(const TimeTrace& trace);

/// First time after the peak at which the trace drops below `fraction`·peak,
/// linearly interpolated.
double time_to_fraction(const TimeTrace& trace, double fraction);

}  // namespace pmc
