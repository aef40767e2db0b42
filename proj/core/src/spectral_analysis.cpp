#include "pmc/spectral_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "pmc/errors.hpp"

namespace pmc {

namespace {

struct Candidate {
  std::size_t index;
  double prominence;
};

std::vector<Candidate> local_maxima(std::span<const double> m) {
  std::vector<Candidate> out;
  const std::size_t n = m.size();
  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(m[i] > m[i - 1])) continue;
    // Plateau: walk to its right end and use the middle sample.
    std::size_t j = i;
    while (j + 1 < n && m[j + 1] == m[i]) ++j;
    if (j + 1 >= n || !(m[j + 1] < m[i])) {
      i = j;
      continue;
    }
    const std::size_t top = (i + j) / 2;

    double left_min = m[i];
    for (std::size_t k = i; k-- > 0;) {
      if (m[k] > m[i]) break;
      left_min = std::min(left_min, m[k]);
    }
    double right_min = m[i];
    for (std::size_t k = j + 1; k < n; ++k) {
      if (m[k] > m[i]) break;
      right_min = std::min(right_min, m[k]);
    }
    out.push_back({top, m[i] - std::max(left_min, right_min)});
    i = j;
  }
  return out;
}

// Half-power crossing on one side, or nullopt if the flank turns upward
// (a neighbouring peak) or runs off the grid first.
std::optional<double> crossing(const FrequencyGrid& grid, std::span<const double> m,
                               std::size_t top, double half, int direction,
                               double& valley_distance) {
  const auto n = static_cast<std::ptrdiff_t>(m.size());
  std::ptrdiff_t k = static_cast<std::ptrdiff_t>(top);
  while (true) {
    const std::ptrdiff_t next = k + direction;
    if (next < 0 || next >= n) {
      valley_distance = std::abs(grid.at(static_cast<std::size_t>(k)) - grid.at(top));
      return std::nullopt;
    }
    const double a = m[static_cast<std::size_t>(k)];
    const double b = m[static_cast<std::size_t>(next)];
    if (b < half) {
      const double fa = grid.at(static_cast<std::size_t>(k));
      const double fb = grid.at(static_cast<std::size_t>(next));
      return fa + (a - half) / (a - b) * (fb - fa);
    }
    if (b > a) {
      valley_distance = std::abs(grid.at(static_cast<std::size_t>(k)) - grid.at(top));
      return std::nullopt;
    }
    k = next;
  }
}

}  // namespace

PeakReport find_peaks(const FrequencyGrid& grid, std::span<const double> m,
                      double prominence_frac) {
  grid.validate();
  if (m.size() != grid.points)
    throw InvalidParameter("find_peaks: magnitude count does not match grid points");
  if (!(prominence_frac > 0.0 && prominence_frac < 1.0))
    throw InvalidParameter("find_peaks: prominence_frac must lie in (0, 1)");

  PeakReport report;
  const double max_mag = *std::max_element(m.begin(), m.end());
  if (!(max_mag > 0.0)) return report;

  const double df = grid.step();
  for (const auto& c : local_maxima(m)) {
    if (c.prominence < prominence_frac * max_mag) continue;
    const std::size_t i = c.index;

    const double y0 = m[i - 1], y1 = m[i], y2 = m[i + 1];
    const double curvature = y0 - 2.0 * y1 + y2;
    double offset = 0.0;
    if (curvature < 0.0) offset = std::clamp(0.5 * (y0 - y2) / curvature, -0.5, 0.5);
    const double center = grid.at(i) + offset * df;
    const double height = y1 - 0.25 * (y0 - y2) * offset;

    // Half power: |S21| of a Lorentzian line falls to 1/√2 at one HWHM.
    const double half = height / std::sqrt(2.0);
    double left_valley = 0.0, right_valley = 0.0;
    const auto left = crossing(grid, m, i, half, -1, left_valley);
    const auto right = crossing(grid, m, i, half, +1, right_valley);
    double hwhm;
    if (left && right) {
      hwhm = 0.5 * (*right - *left);
    } else if (left) {
      hwhm = center - *left;
    } else if (right) {
      hwhm = *right - center;
    } else {
      hwhm = std::min(left_valley, right_valley);
    }
    if (!(hwhm > 0.0)) hwhm = 0.5 * df;
    report.peaks.push_back({center, hwhm, height});
  }

  if (report.peaks.size() >= 2) {
    std::vector<std::size_t> order(report.peaks.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return report.peaks[a].height > report.peaks[b].height;
    });
    report.gap = std::abs(report.peaks[order[0]].center - report.peaks[order[1]].center);
  }
  return report;
}

PeakReport find_peaks(const ComplexSpectrum& spec, double prominence_frac) {
  spec.validate();
  const auto m = spec.magnitudes();
  return find_peaks(spec.grid, m, prominence_frac);
}

std::optional<double> extract_coupling(const ComplexSpectrum& spec,
                                       CouplingConvention convention,
                                       double prominence_frac) {
  const auto report = find_peaks(spec, prominence_frac);
  if (!report.gap) return std::nullopt;
  return convention == CouplingConvention::half_gap ? 0.5 * *report.gap : *report.gap;
}

HybridSystem initial_guess(const ComplexSpectrum& bare_cavity,
                           const ComplexSpectrum& coupled_at_resonance,
                           double magnon_hwhm_hz, double gamma_m,
                           CouplingConvention convention) {
  const auto bare = find_peaks(bare_cavity);
  if (bare.peaks.empty()) throw DegenerateInput("initial_guess: bare-cavity spectrum has no peak");
  const Peak cavity = *std::max_element(
      bare.peaks.begin(), bare.peaks.end(),
      [](const Peak& a, const Peak& b) { return a.height < b.height; });

  // Single-mode line: HWHM κ = βω_c + γ_c and peak height 2γ_c/κ.
  const double omega_c = units::angular(cavity.center);
  const double kappa = units::angular(cavity.hwhm);
  const double gamma_c = std::min(0.5 * cavity.height * kappa, kappa);
  const double beta = (kappa - gamma_c) / omega_c;

  const auto g_hz = extract_coupling(coupled_at_resonance, convention);
  if (!g_hz) throw DegenerateInput("initial_guess: coupled spectrum shows a single peak");

  HybridSystem sys;
  sys.photon = {omega_c, beta, gamma_c};
  sys.magnon = {omega_c, damping_constant(units::angular(magnon_hwhm_hz), omega_c), gamma_m};
  sys.g = units::angular(*g_hz);
  sys.validate();
  return sys;
}

std::vector<LinewidthRow> linewidth_vs_alpha(std::span<const double> alphas,
                                             const HybridSystem& base,
                                             const FrequencyGrid& grid,
                                             double prominence_frac) {
  if (alphas.empty()) throw InvalidParameter("linewidth_vs_alpha: no alpha values");
  std::vector<LinewidthRow> rows;
  rows.reserve(alphas.size());
  for (double alpha : alphas) {
    HybridSystem sys = base;
    sys.magnon.omega = sys.photon.omega;
    sys.magnon.intrinsic_damping = alpha;
    const auto report = find_peaks(spectrum(sys, grid), prominence_frac);
    LinewidthRow row{alpha, {}, {}, report.gap};
    for (const auto& p : report.peaks) {
      row.centers.push_back(p.center);
      row.fwhm.push_back(2.0 * p.hwhm);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace pmc
