#pragma once

#include <numbers>

namespace ecf {

inline constexpr double kPi = std::numbers::pi;

// SI constants (2019 redefinition, exact values)
inline constexpr double kBoltzmann = 1.380649e-23;        // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kSpeedOfLight = 299792458.0;      // m/s

} // namespace ecf
