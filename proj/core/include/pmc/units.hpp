#pragma once

#include <numbers>

// Internally every frequency and rate is angular (rad/s). These helpers are
// the only place Hz-based quantities cross into the model.
namespace pmc::units {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double angular(double hz) { return kTwoPi * hz; }
constexpr double hertz(double rad_per_s) { return rad_per_s / kTwoPi; }

constexpr double from_ghz(double ghz) { return ghz * 1e9; }
constexpr double from_mhz(double mhz) { return mhz * 1e6; }
constexpr double to_mhz(double hz) { return hz * 1e-6; }

}  // namespace pmc::units
