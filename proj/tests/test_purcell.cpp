#include <gtest/gtest.h>

#include <cmath>

#include "pmc/errors.hpp"
#include "pmc/purcell.hpp"

namespace pmc {
namespace {

TEST(Classify, WindowBoundaries) {
  // K_m = 100, K_c = 40: window is 30 < g ≤ 100
  EXPECT_EQ(classify(100, 40, 100).regime, Regime::purcell);
  EXPECT_EQ(classify(100, 40, 30.0001).regime, Regime::purcell);
  EXPECT_EQ(classify(100, 40, 30).regime, Regime::weak);
  EXPECT_EQ(classify(100, 40, 100.0001).regime, Regime::strong_coupling);
  EXPECT_EQ(classify(100, 40, 5).regime, Regime::weak);
  const auto v = classify(100, 40, 50);
  EXPECT_DOUBLE_EQ(v.terms.lhs, 30.0);
  EXPECT_TRUE(v.purcell());
}

TEST(Classify, CrossingBranchMirrorsWindow) {
  // (K_m − K_c)/2 ≥ g > K_m needs K_m < 0 for non-negative K_c, so it is empty.
  for (double g : {0.1, 10.0, 50.0, 200.0})
    EXPECT_FALSE(classify(100, 40, g, Dispersion::crossing).purcell());
  EXPECT_EQ(classify(100, 40, 50, Dispersion::crossing).dispersion, Dispersion::crossing);
}

TEST(Classify, RejectsNegativeOrNonFinite) {
  EXPECT_THROW(classify(-1, 1, 1), InvalidParameter);
  EXPECT_THROW(classify(1, 1, std::nan("")), InvalidParameter);
}

TEST(Classify, TableUsesAlphaTimesMagnonFrequency) {
  const double w = units::angular(5.33e9);
  const std::vector<DampingRow> rows{
      {2.1e-2, w, w, units::angular(43.5e6), units::angular(76.03e6)},
      {1.4e-5, w, w, units::angular(24.99e6), units::angular(127.3e6)},
  };
  const auto v = classify_table(rows);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_NEAR(v[0].terms.K_m, 111.93e6, 1e3);
  EXPECT_NEAR(v[0].terms.g, 76.03e6, 1e-3);
  EXPECT_EQ(v[0].regime, Regime::purcell);
  EXPECT_EQ(v[1].regime, Regime::strong_coupling);
}

TEST(Phase, MaskAgreesWithClassifyEverywhere) {
  const double w = units::angular(5.33e9);
  const std::vector<double> a{1e-4, 5e-3, 1e-2, 2e-2, 3e-2};
  const std::vector<double> b{1e-3, 5e-3, 9e-3};
  const std::vector<double> g{10e6, 50e6, 80e6, 120e6, 200e6};
  const auto pd = phase_diagram(a, b, g, w, 2);
  ASSERT_EQ(pd.re_delta.size(), a.size() * b.size() * g.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      for (std::size_t k = 0; k < g.size(); ++k) {
        const auto v = classify(a[i] * 5.33e9, b[j] * 5.33e9, g[k]);
        EXPECT_EQ(pd.purcell_at(i, j, k), v.purcell());
        EXPECT_GE(pd.re_delta_at(i, j, k), 0.0);
        // lossless gap: sqrt(4g² − (f(β − α))²), clamped at 0
        const double br = 5.33e9 * (b[j] - a[i]);
        const double rad = 4 * g[k] * g[k] - br * br;
        EXPECT_NEAR(pd.re_delta_at(i, j, k), rad > 0 ? std::sqrt(rad) : 0.0, 1.0);
      }
}

TEST(Phase, AxesMustIncrease) {
  const std::vector<double> ok{1e-3, 2e-3}, bad{2e-3, 1e-3}, empty;
  EXPECT_THROW(phase_diagram(bad, ok, ok, 1e10), InvalidParameter);
  EXPECT_THROW(phase_diagram(ok, empty, ok, 1e10), InvalidParameter);
}

TEST(Phase, ThreadCountDoesNotChangeOutput) {
  std::vector<double> a, b, g;
  for (int k = 0; k < 20; ++k) {
    a.push_back(1e-4 + 1.5e-3 * k);
    b.push_back(1e-3 + 5e-4 * k);
    g.push_back(5e6 + 10e6 * k);
  }
  const auto one = phase_diagram(a, b, g, 3e10, 1);
  const auto many = phase_diagram(a, b, g, 3e10, 7);
  EXPECT_EQ(one.re_delta, many.re_delta);
  EXPECT_EQ(one.purcell_mask, many.purcell_mask);
}

TEST(Spin, CountFromFilmGeometry) {
  EXPECT_NEAR(spin_count(20, 9, kYigSpinDensity), 3.78e18, 1e6);
  EXPECT_THROW(spin_count(-1, 9, kYigSpinDensity), InvalidParameter);
}

TEST(Spin, SquareRootLaw) {
  const std::vector<double> t{2, 5, 10, 20, 40};
  const SpinReference ref{spin_count(20, 9, kYigSpinDensity), 127.3e6};
  const auto s = spin_scaling(t, 9, kYigSpinDensity, ref);
  ASSERT_EQ(s.entries.size(), t.size());
  EXPECT_NEAR(s.entries[3].g_hz, 127.3e6, 1e-6);
  EXPECT_NEAR(s.entries[4].g_hz / s.entries[3].g_hz, std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(s.fit.g0_hz, s.g0_hz, 1e-12 * s.g0_hz);
  EXPECT_LT(s.fit.residual, 1e-12);
}

TEST(Spin, FitThroughOriginOnNoisyData) {
  const std::vector<double> n{1, 4, 9};
  const std::vector<double> g{1.1, 1.9, 3.0};
  const auto fit = fit_sqrt_law(n, g);
  // Σg√N / ΣN = (1.1 + 3.8 + 9) / 14
  EXPECT_NEAR(fit.g0_hz, 13.9 / 14.0, 1e-14);
  EXPECT_GT(fit.residual, 0.0);
}

TEST(Spin, ThicknessesMustIncrease) {
  const std::vector<double> t{5, 2};
  EXPECT_THROW(spin_scaling(t, 9, kYigSpinDensity, {1e18, 1e8}), InvalidParameter);
}

}  // namespace
}  // namespace pmc
