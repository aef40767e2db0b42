#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>
#include <sstream>

#include "pmc/errors.hpp"
#include "pmc/transmission.hpp"

namespace pmc {

namespace {

// FFTW's planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(fftw_complex* p) const { fftw_free(p); }
};
using FftwBuffer = std::unique_ptr<fftw_complex[], FftwFree>;

class ForwardPlan {
 public:
  ForwardPlan(int n, fftw_complex* in, fftw_complex* out) {
    std::lock_guard lock(planner_mutex());
    plan_ = fftw_plan_dft_1d(n, in, out, FFTW_FORWARD, FFTW_ESTIMATE);
    if (!plan_) throw Error("time_domain: FFTW failed to create a plan");
  }
  ~ForwardPlan() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan_);
  }
  ForwardPlan(const ForwardPlan&) = delete;
  ForwardPlan& operator=(const ForwardPlan&) = delete;

  void execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_ = nullptr;
};

std::vector<double> window_weights(std::size_t n, Window window) {
  std::vector<double> w(n, 1.0);
  if (window == Window::hann && n > 1) {
    for (std::size_t k = 0; k < n; ++k)
      w[k] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                   static_cast<double>(n - 1)));
  }
  return w;
}

std::size_t peak_index(const TimeTrace& trace) {
  if (trace.magnitudes.empty()) throw DegenerateInput("empty time trace");
  // The second half of the periodic trace holds negative times.
  const auto half = trace.magnitudes.begin() +
                    static_cast<std::ptrdiff_t>((trace.magnitudes.size() + 1) / 2);
  return static_cast<std::size_t>(
      std::max_element(trace.magnitudes.begin(), half) - trace.magnitudes.begin());
}

}  // namespace

TimeTrace time_domain(const ComplexSpectrum& spec, Window window, int pad_factor) {
  spec.validate();
  if (pad_factor < 1) throw InvalidParameter("time_domain: pad_factor must be >= 1");

  const std::size_t n = spec.samples.size();
  const std::size_t m = n * static_cast<std::size_t>(pad_factor);
  const double df = spec.grid.step();
  const auto w = window_weights(n, window);

  double max_mag = 0.0;
  for (const auto& s : spec.samples) max_mag = std::max(max_mag, std::abs(s));
  if (max_mag == 0.0) throw DegenerateInput("time_domain: spectrum is identically zero");

  FftwBuffer in(fftw_alloc_complex(m));
  FftwBuffer out(fftw_alloc_complex(m));
  if (!in || !out) throw std::bad_alloc();
  ForwardPlan plan(static_cast<int>(m), in.get(), out.get());

  for (std::size_t k = 0; k < m; ++k) {
    const Complex v = k < n ? spec.samples[k] * w[k] : Complex{};
    in[k][0] = v.real();
    in[k][1] = v.imag();
  }
  // S21 follows the e^{-iωt} convention, so h(t) = ∫ S(f) e^{-2πi f t} df is
  // the forward transform. The baseband shift only adds a unit-modulus phase.
  plan.execute();

  TimeTrace trace;
  trace.carrier = spec.grid.center();
  trace.times.resize(m);
  trace.magnitudes.resize(m);
  const double dt = 1.0 / (static_cast<double>(m) * df);
  double peak = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    trace.times[j] = static_cast<double>(j) * dt;
    trace.magnitudes[j] = df * std::hypot(out[j][0], out[j][1]);
    peak = std::max(peak, trace.magnitudes[j]);
  }

  const double origin = trace.magnitudes.front();
  trace.scale = origin > 1e-12 * peak ? origin : peak;
  for (auto& v : trace.magnitudes) v /= trace.scale;

  const double edge = std::max(std::abs(spec.samples.front()), std::abs(spec.samples.back()));
  trace.edge_warning = edge >= 0.1 * max_mag;
  return trace;
}

double spectral_energy(const ComplexSpectrum& spec, Window window) {
  spec.validate();
  const auto w = window_weights(spec.samples.size(), window);
  double e = 0.0;
  for (std::size_t k = 0; k < spec.samples.size(); ++k)
    e += std::norm(spec.samples[k] * w[k]);
  return e * spec.grid.step();
}

double trace_energy(const TimeTrace& trace) {
  double e = 0.0;
  for (double v : trace.magnitudes) e += (v * trace.scale) * (v * trace.scale);
  return e * trace.time_step();
}

double envelope_decay_rate(const TimeTrace& trace) {
  const std::size_t ip = peak_index(trace);
  const double peak = trace.magnitudes[ip];
  const double upper = peak * std::exp(-0.5);
  const double lower = peak * std::exp(-3.0);

  // Least squares of ln|h| against t over the selected tail.
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t count = 0;
  for (std::size_t j = ip; j < trace.magnitudes.size(); ++j) {
    const double v = trace.magnitudes[j];
    if (v < lower) break;
    if (v > upper) continue;
    const double t = trace.times[j];
    const double y = std::log(v);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++count;
  }
  if (count < 3)
    throw DegenerateInput("envelope_decay_rate: fewer than 3 samples in the decay window");
  const double nd = static_cast<double>(count);
  const double slope = (nd * sty - st * sy) / (nd * stt - st * st);
  return -slope;
}

double time_to_fraction(const TimeTrace& trace, double fraction) {
  if (!(fraction > 0.0 && fraction < 1.0))
    throw InvalidParameter("time_to_fraction: fraction must lie in (0, 1)");
  const std::size_t ip = peak_index(trace);
  const double level = fraction * trace.magnitudes[ip];
  for (std::size_t j = ip + 1; j < trace.magnitudes.size(); ++j) {
    if (trace.magnitudes[j] < level) {
      const double a = trace.magnitudes[j - 1];
      const double b = trace.magnitudes[j];
      const double frac = (a - level) / (a - b);
      return trace.times[j - 1] + frac * (trace.times[j] - trace.times[j - 1]);
    }
  }
  std::ostringstream os;
  os << "time_to_fraction: trace never falls below " << fraction << " of its peak";
  throw DegenerateInput(os.str());
}

}  // namespace pmc
