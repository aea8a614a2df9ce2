#pragma once

#include <cmath>

namespace lscope {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// Unit convention: all user-facing frequencies are linear ("/2pi") GHz or MHz;
// everything inside the dynamics is angular rad/ns. The conversion happens
// exactly once, through these two functions. 1 GHz linear == 2*pi rad/ns.
inline constexpr double angular(double linear_GHz) { return kTwoPi * linear_GHz; }
inline constexpr double linear(double angular_rad_per_ns) { return angular_rad_per_ns / kTwoPi; }

inline constexpr double mhz_to_ghz(double mhz) { return 1e-3 * mhz; }
inline constexpr double ghz_to_mhz(double ghz) { return 1e3 * ghz; }

}  // namespace lscope
