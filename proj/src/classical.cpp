#include "qspectra/classical.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "qspectra/constants.hpp"

namespace qspectra::classical {

void HOParams::validate() const
{
    if (!(mass > 0.0) || !(omega_b > 0.0)) {
        throw std::invalid_argument("oscillator mass and omega_b must be positive");
    }
    if (!(gamma >= 0.0) || !(temperature >= 0.0)) {
        throw std::invalid_argument("oscillator gamma and temperature must be non-negative");
    }
}

namespace {

double denominator(Frequency omega, const HOParams& p)
{
    const double detune = p.omega_b * p.omega_b - omega * omega;
    return detune * detune + p.gamma * p.gamma * omega * omega;
}

} // namespace

double driven_amplitude(Frequency omega_d, const HOParams& p)
{
    p.validate();
    const double den = denominator(omega_d, p);
    if (den == 0.0) {
        throw std::domain_error("undamped oscillator driven exactly on resonance");
    }
    return p.drive_amp / (p.mass * std::sqrt(den));
}

double driven_phase(Frequency omega_d, const HOParams& p)
{
    p.validate();
    if (omega_d == p.omega_b) {
        return std::numbers::pi / 2.0;
    }
    // atan2 keeps the branch in [0, pi] for gamma * omega_d >= 0.
    return std::atan2(p.gamma * omega_d, p.omega_b * p.omega_b - omega_d * omega_d);
}

double thermal_force_psd(const HOParams& p)
{
    p.validate();
    return 2.0 * p.mass * p.gamma * constants::boltzmann * p.temperature;
}

double thermal_displacement_psd(Frequency omega, const HOParams& p)
{
    p.validate();
    return 2.0 * p.gamma * constants::boltzmann * p.temperature / (p.mass * denominator(omega, p));
}

} // namespace qspectra::classical
