#include "qspectra/model_params.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "qspectra/errors.hpp"

namespace qspectra {

namespace {

constexpr std::array<std::string_view, param_count> kNames = {
    "omega0", "omega_b", "omega_r", "gamma_c", "v_g", "V1", "V2", "g_Q", "g_C", "g_rq", "mean_n",
};

} // namespace

std::string_view param_name(Param p) noexcept
{
    return kNames[static_cast<std::size_t>(p)];
}

std::optional<Param> param_from_name(std::string_view name) noexcept
{
    for (std::size_t i = 0; i < param_count; ++i) {
        if (kNames[i] == name) {
            return all_params[i];
        }
    }
    return std::nullopt;
}

std::optional<double>& ModelParams::field(Param p) noexcept
{
    return const_cast<std::optional<double>&>(std::as_const(*this).field(p));
}

const std::optional<double>& ModelParams::field(Param p) const noexcept
{
    switch (p) {
    case Param::omega0: return omega0;
    case Param::omega_b: return omega_b;
    case Param::omega_r: return omega_r;
    case Param::gamma_c: return gamma_c;
    case Param::v_g: return v_g;
    case Param::V1: return V1;
    case Param::V2: return V2;
    case Param::g_Q: return g_Q;
    case Param::g_C: return g_C;
    case Param::g_rq: return g_rq;
    case Param::mean_n: return mean_n;
    }
    return mean_n; // unreachable
}

double ModelParams::require(Param p) const
{
    const auto& v = field(p);
    if (!v) {
        throw MissingParameter(std::string(param_name(p)));
    }
    return *v;
}

bool ModelParams::has_feedline_rate() const noexcept
{
    return gamma_c.has_value() || (V1.has_value() && v_g.has_value());
}

double ModelParams::feedline_rate() const
{
    if (gamma_c) {
        return *gamma_c;
    }
    if (V1 && v_g) {
        return (*V1) * (*V1) / (*v_g);
    }
    throw MissingParameter("gamma_c");
}

double ModelParams::stlr_rate() const
{
    const double v2 = require(Param::V2);
    return v2 * v2 / require(Param::v_g);
}

void ModelParams::validate() const
{
    for (Param p : all_params) {
        const auto& v = field(p);
        if (v && !std::isfinite(*v)) {
            throw std::invalid_argument("parameter '" + std::string(param_name(p)) +
                                        "' is not finite");
        }
    }
    for (Param p : {Param::gamma_c, Param::V1, Param::V2, Param::g_Q, Param::g_C, Param::g_rq,
                    Param::mean_n, Param::omega0, Param::omega_b, Param::omega_r}) {
        const auto& v = field(p);
        if (v && *v < 0.0) {
            throw std::invalid_argument("parameter '" + std::string(param_name(p)) +
                                        "' must be non-negative");
        }
    }
    if (v_g && *v_g <= 0.0) {
        throw std::invalid_argument("parameter 'v_g' must be positive");
    }
    if (gamma_c && V1 && v_g) {
        const double derived = (*V1) * (*V1) / (*v_g);
        if (std::abs(derived - *gamma_c) > 1e-12 * std::max(std::abs(*gamma_c), derived)) {
            throw std::invalid_argument("gamma_c is inconsistent with V1^2 / v_g");
        }
    }
}

} // namespace qspectra
