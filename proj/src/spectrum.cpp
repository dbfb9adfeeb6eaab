#include "qspectra/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qspectra {

double wrap_phase(double angle) noexcept
{
    constexpr double pi = std::numbers::pi;
    double a = std::remainder(angle, 2.0 * pi); // [-pi, pi]
    if (a <= -pi) {
        a += 2.0 * pi;
    }
    return a;
}

std::vector<Frequency> make_frequency_grid(Frequency start, Frequency stop, std::size_t n_points)
{
    if (!std::isfinite(start) || !std::isfinite(stop)) {
        throw std::invalid_argument("frequency grid bounds must be finite");
    }
    if (n_points < 2) {
        throw std::invalid_argument("frequency grid needs at least 2 points");
    }
    if (!(start < stop)) {
        throw std::invalid_argument("frequency grid requires start < stop");
    }
    std::vector<Frequency> grid(n_points);
    const double step = (stop - start) / static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i + 1 < n_points; ++i) {
        grid[i] = start + static_cast<double>(i) * step;
    }
    grid.back() = stop;
    return grid;
}

Spectrum Spectrum::from_amplitudes(std::vector<Frequency> freqs,
                                   std::vector<std::complex<double>> amplitudes)
{
    if (freqs.size() != amplitudes.size()) {
        throw std::invalid_argument("spectrum: frequency and amplitude counts differ");
    }
    Spectrum s;
    s.freqs_ = std::move(freqs);
    s.t_ = std::move(amplitudes);
    s.check_grid();
    s.T_.resize(s.t_.size());
    s.phase_.resize(s.t_.size());
    for (std::size_t i = 0; i < s.t_.size(); ++i) {
        if (!std::isfinite(s.t_[i].real()) || !std::isfinite(s.t_[i].imag())) {
            throw std::invalid_argument("spectrum: non-finite amplitude");
        }
        s.T_[i] = std::norm(s.t_[i]);
        s.phase_[i] = wrap_phase(std::arg(s.t_[i]));
    }
    return s;
}

Spectrum Spectrum::from_measurements(std::vector<Frequency> freqs,
                                     std::vector<double> transmission,
                                     std::vector<double> phase)
{
    if (freqs.size() != transmission.size() || freqs.size() != phase.size()) {
        throw std::invalid_argument("spectrum: column lengths differ");
    }
    Spectrum s;
    s.freqs_ = std::move(freqs);
    s.T_ = std::move(transmission);
    s.phase_ = std::move(phase);
    s.check_grid();
    for (std::size_t i = 0; i < s.T_.size(); ++i) {
        if (!(s.T_[i] >= 0.0 && s.T_[i] <= 1.0)) {
            throw std::invalid_argument("spectrum: transmission outside [0, 1] at row " +
                                        std::to_string(i));
        }
        if (!std::isfinite(s.phase_[i])) {
            throw std::invalid_argument("spectrum: non-finite phase");
        }
        s.phase_[i] = wrap_phase(s.phase_[i]);
    }
    return s;
}

const std::vector<std::complex<double>>& Spectrum::amplitudes() const
{
    if (t_.empty()) {
        throw std::logic_error("spectrum carries no complex amplitudes");
    }
    return t_;
}

double Spectrum::grid_step() const noexcept
{
    double step = 0.0;
    for (std::size_t i = 1; i < freqs_.size(); ++i) {
        step = std::max(step, freqs_[i] - freqs_[i - 1]);
    }
    return step;
}

void Spectrum::check_grid() const
{
    if (freqs_.size() < 2) {
        throw std::invalid_argument("spectrum needs at least 2 points");
    }
    for (std::size_t i = 0; i < freqs_.size(); ++i) {
        if (!std::isfinite(freqs_[i])) {
            throw std::invalid_argument("spectrum: non-finite frequency");
        }
        if (i > 0 && !(freqs_[i] > freqs_[i - 1])) {
            throw std::invalid_argument("spectrum: frequencies must be strictly increasing");
        }
    }
}

} // namespace qspectra
