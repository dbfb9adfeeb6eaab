#pragma once

#include "qspectra/model_params.hpp"

// Driven damped harmonic oscillator and its thermal displacement noise,
//   z'' + gamma z' + omega_b^2 z = F(t) / m.
namespace qspectra::classical {

struct HOParams
{
    double mass = 1.0;      // kg
    Frequency omega_b = 1.0;
    Frequency gamma = 0.0;  // damping rate
    double drive_amp = 0.0; // force amplitude a, N
    double temperature = 0.0; // K

    void validate() const;
};

// Steady-state amplitude a / (m sqrt((omega_b^2 - omega_d^2)^2 + gamma^2 omega_d^2)).
// Throws std::domain_error on the undamped resonance pole.
double driven_amplitude(Frequency omega_d, const HOParams& p);

// Phase lag phi in [0, pi], continuous through resonance; exactly pi/2 at
// omega_d = omega_b. The steady state is z(t) = A cos(omega_d t - phi),
// with tan(phi) = gamma omega_d / (omega_b^2 - omega_d^2).
double driven_phase(Frequency omega_d, const HOParams& p);

// White force noise 2 m gamma k_B T.
double thermal_force_psd(const HOParams& p);

// S_x = 2 gamma k_B T / (m [(omega_b^2 - omega^2)^2 + gamma^2 omega^2]), m^2 s.
double thermal_displacement_psd(Frequency omega, const HOParams& p);

} // namespace qspectra::classical
