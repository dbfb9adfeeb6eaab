#pragma once

#include <array>
#include <optional>
#include <string_view>

namespace qspectra {

// Angular frequency in rad/s. Detunings may be negative.
using Frequency = double;

enum class Param
{
    omega0,  // qubit transition
    omega_b, // nanomechanical resonator
    omega_r, // transmission-line resonator
    gamma_c, // qubit decay into the feedline, V1^2 / v_g
    v_g,     // group speed of the feedline, m/s
    V1,      // feedline-qubit coupling
    V2,      // feedline-resonator coupling
    g_Q,     // qubit - quantum resonator
    g_C,     // qubit - classical resonator
    g_rq,    // resonator - qubit
    mean_n,  // average phonon number
};

inline constexpr std::size_t param_count = 11;

std::string_view param_name(Param p) noexcept;
std::optional<Param> param_from_name(std::string_view name) noexcept;

// Physical parameter set shared by all scattering configurations.
// Fields are optional because each configuration reads a different subset;
// see required_params() in scattering.hpp.
struct ModelParams
{
    std::optional<double> omega0;
    std::optional<double> omega_b;
    std::optional<double> omega_r;
    std::optional<double> gamma_c;
    std::optional<double> v_g;
    std::optional<double> V1;
    std::optional<double> V2;
    std::optional<double> g_Q;
    std::optional<double> g_C;
    std::optional<double> g_rq;
    std::optional<double> mean_n;

    std::optional<double>& field(Param p) noexcept;
    const std::optional<double>& field(Param p) const noexcept;

    // Value of a field; throws MissingParameter naming it when unset.
    double require(Param p) const;

    // Qubit linewidth gamma_c, either stored directly or derived as V1^2/v_g.
    bool has_feedline_rate() const noexcept;
    double feedline_rate() const;

    // Transmission-line resonator linewidth V2^2 / v_g.
    double stlr_rate() const;

    // Throws std::invalid_argument on non-finite values, negative couplings,
    // non-positive v_g, or gamma_c inconsistent with V1^2/v_g.
    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

inline constexpr std::array<Param, param_count> all_params = {
    Param::omega0, Param::omega_b, Param::omega_r, Param::gamma_c, Param::v_g, Param::V1,
    Param::V2,     Param::g_Q,     Param::g_C,     Param::g_rq,    Param::mean_n,
};

} // namespace qspectra
