#pragma once

#include <complex>
#include <optional>
#include <string_view>
#include <vector>

#include "qspectra/model_params.hpp"
#include "qspectra/spectrum.hpp"

// Closed-form single-photon transmission through the feedline for each
// scattering configuration.
//
// Every amplitude is written as t = P / (P + i*gamma*Q) with real P and Q,
// after clearing all denominators. That keeps |t| <= 1 by construction and
// makes the resonator frequency an ordinary point of the nested models.
namespace qspectra {

enum class ModelKind
{
    QubitOnly,
    QubitQNMR,
    QubitQNMRDispersive,
    QubitCNMR,
    StlrQubit,
    StlrQubitQNMR,
    StlrQubitCNMR,
};

inline constexpr ModelKind all_model_kinds[] = {
    ModelKind::QubitOnly, ModelKind::QubitQNMR,     ModelKind::QubitQNMRDispersive,
    ModelKind::QubitCNMR, ModelKind::StlrQubit,     ModelKind::StlrQubitQNMR,
    ModelKind::StlrQubitCNMR,
};

// CLI spelling: qubit-only, qubit-qnmr, qubit-qnmr-dispersive, ...
std::string_view model_name(ModelKind kind) noexcept;
std::optional<ModelKind> model_from_name(std::string_view name) noexcept;

// Fields each model reads. Param::gamma_c stands for the feedline rate,
// which may also be given as V1 and v_g.
std::vector<Param> required_params(ModelKind kind);

// Throws MissingParameter naming the first unset field, then runs
// ModelParams::validate().
void check_params(ModelKind kind, const ModelParams& p);

namespace scattering {

std::complex<double> t_qubit_only(Frequency omega, const ModelParams& p);
std::complex<double> t_qubit_qnmr(Frequency omega, const ModelParams& p);
std::complex<double> t_dispersive(Frequency omega, const ModelParams& p);
std::complex<double> t_qubit_cnmr(Frequency omega, const ModelParams& p);
std::complex<double> t_stlr_qubit(Frequency omega, const ModelParams& p);
std::complex<double> t_stlr_qubit_qnmr(Frequency omega, const ModelParams& p);
std::complex<double> t_stlr_qubit_cnmr(Frequency omega, const ModelParams& p);

// Feedline scattering off the bare transmission-line resonator.
std::complex<double> t_bare_stlr(Frequency omega, const ModelParams& p);

// Qubit frequency dressed by a classical drive:
// sqrt((omega0 + omega_b)^2 / 4 + g_C^2). At g_C = 0 this is the midpoint
// (omega0 + omega_b) / 2, not omega0.
Frequency dressed_qubit_frequency(const ModelParams& p);

// Dispersive detuning omega0 - omega_b.
Frequency dispersive_detuning(const ModelParams& p);
// Dip of the dispersive model: omega0 + (g_Q^2 / Delta)(<n> + 1/2).
Frequency dispersive_dip_center(const ModelParams& p);
// |g_Q / Delta|; values above 0.5 put the dispersive model outside its
// range of validity.
double dispersive_ratio(const ModelParams& p);

// True iff neighbouring phonon-number dips are resolvable:
// gamma_c < g_Q^2 / (2 |Delta|).
bool resolvability_condition(const ModelParams& p);

// 1/2 [(a + b) +- sqrt(4 g^2 + (a - b)^2)], lower first.
std::pair<Frequency, Frequency> normal_modes(Frequency a, Frequency b, Frequency g) noexcept;

} // namespace scattering

std::complex<double> transmission_amplitude(ModelKind kind, Frequency omega,
                                            const ModelParams& p);

// Evaluate a model on a grid. Grid points are independent; `threads` > 1
// splits the work.
Spectrum synthesize(ModelKind kind, const std::vector<Frequency>& grid, const ModelParams& p,
                    unsigned threads = 1);

// Closed-form feature locations.
struct FeatureSet
{
    std::vector<Frequency> dips;        // ascending, T = 0
    std::vector<Frequency> unity_points; // ascending, T = 1
    std::vector<Frequency> fwhm;        // aligned with dips
};

FeatureSet analytic_features(ModelKind kind, const ModelParams& p);

} // namespace qspectra
