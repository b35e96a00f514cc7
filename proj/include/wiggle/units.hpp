#pragma once

#include <numbers>

namespace wiggle {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

constexpr double mm_to_m(double mm) { return mm * 1e-3; }
constexpr double m_to_mm(double m) { return m * 1e3; }
constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }
constexpr double hz_to_rad_s(double hz) { return kTwoPi * hz; }

}  // namespace wiggle
