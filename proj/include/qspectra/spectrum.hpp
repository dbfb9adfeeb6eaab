#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include "qspectra/model_params.hpp"

namespace qspectra {

// Map an angle onto (-pi, pi].
double wrap_phase(double angle) noexcept;

// Evenly spaced grid with both endpoints included.
std::vector<Frequency> make_frequency_grid(Frequency start, Frequency stop, std::size_t n_points);

// Transmission spectrum on a strictly increasing frequency grid.
//
// A spectrum built from complex amplitudes derives T = |t|^2 and
// phase = arg(t). A measured (or noise-corrupted) spectrum carries only
// T and phase; has_amplitudes() is then false.
class Spectrum
{
public:
    static Spectrum from_amplitudes(std::vector<Frequency> freqs,
                                    std::vector<std::complex<double>> amplitudes);
    static Spectrum from_measurements(std::vector<Frequency> freqs,
                                      std::vector<double> transmission,
                                      std::vector<double> phase);

    std::size_t size() const noexcept { return freqs_.size(); }
    const std::vector<Frequency>& freqs() const noexcept { return freqs_; }
    const std::vector<double>& transmission() const noexcept { return T_; }
    const std::vector<double>& phase() const noexcept { return phase_; }

    bool has_amplitudes() const noexcept { return !t_.empty(); }
    // Throws std::logic_error when the amplitudes are not available.
    const std::vector<std::complex<double>>& amplitudes() const;

    // Largest spacing between adjacent grid points.
    double grid_step() const noexcept;

private:
    Spectrum() = default;
    void check_grid() const;

    std::vector<Frequency> freqs_;
    std::vector<std::complex<double>> t_;
    std::vector<double> T_;
    std::vector<double> phase_;
};

} // namespace qspectra
