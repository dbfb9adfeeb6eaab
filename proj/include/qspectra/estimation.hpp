#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qspectra/model_params.hpp"
#include "qspectra/spectrum.hpp"

namespace qspectra {

// A value with a symmetric one-sigma uncertainty.
struct Estimate
{
    double value = 0.0;
    double sigma = 0.0;

    Estimate() = default;
    Estimate(double v, double s = 0.0) : value(v), sigma(s) {}
};

// Transmission dip refined by a Lorentzian fit 1 - d g^2 / ((w - c)^2 + g^2).
struct DipFeature
{
    Frequency center = 0.0;
    Frequency fwhm = 0.0;
    double depth = 0.0;         // 1 - T(center)
    double fit_residual = 0.0;  // rms of the fit over its window
    Frequency center_sigma = 0.0; // standard error of the fitted centre
    bool fitted = false;        // false if too few grid points to fit
};

struct LorentzFit
{
    double center = 0.0;
    double depth = 0.0;
    double half_width = 0.0;
    double rms = 0.0;
    double center_sigma = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Damped Gauss-Newton (Levenberg-Marquardt) fit of a unit-baseline
// Lorentzian dip. Initial guesses come from the caller.
LorentzFit fit_lorentzian_dip(std::span<const double> freqs, std::span<const double> transmission,
                              double center0, double depth0, double half_width0);

// Dips of depth >= depth_threshold, ascending by centre. Each is fitted over
// +-3 naive half-widths around the discrete minimum.
std::vector<DipFeature> detect_dips(const Spectrum& s, double depth_threshold);

// Interior full-transmission points (T >= 1 - tol, |phase| <= tol or a
// phase sign change across the sample, local maximum of T) lying strictly
// between two detected dips. Refined by a parabolic vertex of T, or for
// measured spectra by the zero crossing of a quadratic fit to the phase.
std::vector<Frequency> detect_unity_points(const Spectrum& s, double tol);
std::vector<Frequency> detect_unity_points(const Spectrum& s, double tol,
                                           const std::vector<DipFeature>& dips);

// Robust estimate of additive noise on T, from the median absolute second
// difference. Zero for spectra that still carry their complex amplitudes.
double estimate_noise_level(const Spectrum& s);

enum class Topology
{
    Direct, // feedline scattered by the qubit itself
    Stlr,   // feedline scattered by the transmission-line resonator
};

enum class ModelClass
{
    NoNMR,
    QuantumNMR,
    ClassicalNMR,
    Dispersive,
};

std::string_view class_name(ModelClass c) noexcept;
std::optional<ModelClass> class_from_name(std::string_view name) noexcept;

struct ClassifyOptions
{
    Topology topology = Topology::Direct;
    std::optional<Frequency> ref_omega0; // separates NoNMR from ClassicalNMR
    bool dispersive = false;             // single shifted dip read as a phonon ladder rung
    double depth_threshold = 0.5;
    std::optional<double> unity_tol;     // default derived from the noise level
};

// Two dips with a unity point between them: quantum resonator. One dip: no
// resonator when it sits on ref_omega0, classical otherwise. Behind a
// transmission-line resonator every class gains one dip and one unity point.
// Throws AmbiguousClassification when the features fit no class.
ModelClass classify(const Spectrum& s, const ClassifyOptions& opts = {});
ModelClass classify_features(const std::vector<DipFeature>& dips,
                             const std::vector<Frequency>& unity, double grid_step,
                             const ClassifyOptions& opts);

// Closed-form inversions with first-order uncertainty propagation.
// Each throws InconsistentFeatures on a negative radicand.

// g_Q = sqrt((w+ - w-)^2 - (w0 - wb)^2) / 2
Estimate estimate_gQ_direct(Estimate omega_plus, Estimate omega_minus, Estimate omega0,
                            Estimate omega_b);
// g_C = sqrt(w~0^2 - (w0 + wb)^2 / 4)
Estimate estimate_gC(Estimate omega_tilde, Estimate omega0, Estimate omega_b);
// g_rq = sqrt((w'+ - w'-)^2 - (w0 - wr)^2) / 2
Estimate estimate_grq(Estimate omega_p, Estimate omega_m, Estimate omega0, Estimate omega_r);
// wb = w''+ + w''- - w0
Estimate estimate_omega_b_stlr(Estimate omega_pp, Estimate omega_pm, Estimate omega0);
// g_Q = sqrt(w0 (w''- + w''+) - w0^2 - w''+ w''-)
Estimate estimate_gQ_stlr(Estimate omega_pp, Estimate omega_pm, Estimate omega0);

struct PhononEstimate
{
    int n = 0;
    double residual = 0.0; // distance to the nearest rung, in units of g_Q^2 / delta
};

// Rung of the dispersive ladder w0 + (g_Q^2 / delta)(n + 1/2) closest to the
// dip. Throws InconsistentFeatures when the residual exceeds 0.25 or n < 0.
PhononEstimate estimate_phonon_number(Frequency dip_center, Frequency omega0, Frequency g_Q,
                                      Frequency delta);

// Gaussian noise of width sigma on T (clamped to [0, 1]) and on the phase.
// Deterministic for a given seed; the result carries no complex amplitudes.
Spectrum add_measurement_noise(const Spectrum& s, double sigma, std::uint64_t seed);

// Prior knowledge that the inversion formulas need.
struct EstimateHints
{
    Topology topology = Topology::Direct;
    std::optional<Estimate> ref_omega0;
    std::optional<Estimate> ref_omega_b;
    std::optional<Estimate> ref_omega_r;
    std::optional<ModelClass> assume_class; // skip classification
    bool dispersive = false;
    std::optional<Frequency> g_Q;   // dispersive phonon readout
    std::optional<Frequency> delta; // dispersive detuning, defaults to w0 - wb
    std::optional<double> B0;       // classical amplitude readout
    std::optional<double> I_p;
    std::optional<double> length;
    double depth_threshold = 0.5;
    std::optional<double> unity_tol;
};

struct EstimationReport
{
    // Empty when the spectrum shows no dip or the classification was
    // ambiguous; see status.
    std::optional<ModelClass> model_class;
    std::string status = "ok"; // ok | absent-features | ambiguous
    std::optional<Estimate> omega0_est;
    std::optional<Estimate> omega_b_est;
    std::optional<Estimate> omega_r_est;
    std::optional<Estimate> omega_tilde_est; // dressed qubit frequency, classical resonator
    std::optional<Estimate> g_est;
    std::string g_kind; // g_Q | g_C | g_rq
    std::optional<int> phonon_n_est;
    std::optional<double> phonon_residual;
    std::optional<double> amplitude_est;            // A_C, m
    std::optional<double> amplitude_length_product; // A_C * l when l is unknown
    std::vector<DipFeature> dips;
    std::vector<Frequency> unity_points;
    double grid_step = 0.0;
    double noise_level = 0.0;
    std::vector<std::string> warnings;
};

// Detect, classify and invert. Every reported uncertainty is at least half
// the grid spacing.
EstimationReport estimate_parameters(const Spectrum& s, const EstimateHints& hints = {});

} // namespace qspectra
