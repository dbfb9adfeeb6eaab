#pragma once

#include <numbers>

// SI values. Every frequency elsewhere in the library is an angular
// frequency (rad/s) on one scale; nothing converts between Hz and rad/s.
namespace qspectra::constants {

inline constexpr double pi = std::numbers::pi;
inline constexpr double hbar = 1.054571817e-34;            // J s
inline constexpr double electron_charge = 1.602176634e-19; // C
inline constexpr double flux_quantum = 2.067833848e-15;    // Wb, h / 2e
inline constexpr double boltzmann = 1.380649e-23;          // J / K

} // namespace qspectra::constants
