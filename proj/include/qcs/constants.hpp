#pragma once

namespace qcs {

// Shared physical constants. The Earth model is a sphere rotating at the
// sidereal rate; orbits are Keplerian circles around it.
inline constexpr double kEarthRadiusM = 6'371'000.0;
inline constexpr double kEarthMuM3S2 = 3.986004418e14;
inline constexpr double kEarthOmegaRadS = 7.2921159e-5;  // sidereal

inline constexpr double kPi = 3.141592653589793238462643383279502884;

inline constexpr double deg2rad(double d) { return d * (kPi / 180.0); }
inline constexpr double rad2deg(double r) { return r * (180.0 / kPi); }

}  // namespace qcs
