#pragma once

namespace linklife {

// The only velocity-unit conversion site in the library. Velocities cross
// module boundaries in km/hr; formulas that need m/s convert through here.
inline constexpr double kmh_per_mps = 3.6;

inline constexpr double mps_to_kmh(double v_mps) { return v_mps * kmh_per_mps; }
inline constexpr double kmh_to_mps(double v_kmh) { return v_kmh / kmh_per_mps; }

}  // namespace linklife
