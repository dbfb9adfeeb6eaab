#include "qspectra/scattering.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>
#include <thread>

#include "polynomial.hpp"
#include "qspectra/errors.hpp"

namespace qspectra {

namespace {

struct NamedModel
{
    ModelKind kind;
    std::string_view name;
};

constexpr std::array<NamedModel, 7> kModelNames = {{
    {ModelKind::QubitOnly, "qubit-only"},
    {ModelKind::QubitQNMR, "qubit-qnmr"},
    {ModelKind::QubitQNMRDispersive, "qubit-qnmr-dispersive"},
    {ModelKind::QubitCNMR, "qubit-cnmr"},
    {ModelKind::StlrQubit, "stlr-qubit"},
    {ModelKind::StlrQubitQNMR, "stlr-qubit-qnmr"},
    {ModelKind::StlrQubitCNMR, "stlr-qubit-cnmr"},
}};

void check_omega(Frequency omega)
{
    if (!std::isfinite(omega)) {
        throw std::invalid_argument("probe frequency must be finite");
    }
}

// t = P / (P + i gamma Q)
std::complex<double> ratio(double P, double Q, double gamma) noexcept
{
    return P / std::complex<double>(P, gamma * Q);
}

double positive_rate(double rate, const char* name)
{
    if (!(rate > 0.0)) {
        throw std::invalid_argument(std::string(name) + " must be positive");
    }
    return rate;
}

} // namespace

std::string_view model_name(ModelKind kind) noexcept
{
    for (const auto& m : kModelNames) {
        if (m.kind == kind) {
            return m.name;
        }
    }
    return "unknown";
}

std::optional<ModelKind> model_from_name(std::string_view name) noexcept
{
    for (const auto& m : kModelNames) {
        if (m.name == name) {
            return m.kind;
        }
    }
    return std::nullopt;
}

std::vector<Param> required_params(ModelKind kind)
{
    using P = Param;
    switch (kind) {
    case ModelKind::QubitOnly: return {P::omega0, P::gamma_c};
    case ModelKind::QubitQNMR: return {P::omega0, P::omega_b, P::g_Q, P::gamma_c};
    case ModelKind::QubitQNMRDispersive:
        return {P::omega0, P::omega_b, P::g_Q, P::gamma_c, P::mean_n};
    case ModelKind::QubitCNMR: return {P::omega0, P::omega_b, P::g_C, P::gamma_c};
    case ModelKind::StlrQubit: return {P::omega0, P::omega_r, P::g_rq, P::V2, P::v_g};
    case ModelKind::StlrQubitQNMR:
        return {P::omega0, P::omega_b, P::omega_r, P::g_rq, P::g_Q, P::V2, P::v_g};
    case ModelKind::StlrQubitCNMR:
        return {P::omega0, P::omega_b, P::omega_r, P::g_rq, P::g_C, P::V2, P::v_g};
    }
    throw std::invalid_argument("unknown model kind");
}

void check_params(ModelKind kind, const ModelParams& p)
{
    for (Param field : required_params(kind)) {
        if (field == Param::gamma_c) {
            if (!p.has_feedline_rate()) {
                throw MissingParameter("gamma_c");
            }
        } else {
            p.require(field);
        }
    }
    p.validate();
}

namespace scattering {

std::pair<Frequency, Frequency> normal_modes(Frequency a, Frequency b, Frequency g) noexcept
{
    const double half_split = 0.5 * std::hypot(2.0 * g, a - b);
    const double mid = 0.5 * (a + b);
    return {mid - half_split, mid + half_split};
}

std::complex<double> t_qubit_only(Frequency omega, const ModelParams& p)
{
    check_omega(omega);
    const double gamma = positive_rate(p.feedline_rate(), "gamma_c");
    return ratio(omega - p.require(Param::omega0), 1.0, gamma);
}

std::complex<double> t_qubit_qnmr(Frequency omega, const ModelParams& p)
{
    check_omega(omega);
    const double g = p.require(Param::g_Q);
    if (g == 0.0) {
        return t_qubit_only(omega, p);
    }
    const double gamma = positive_rate(p.feedline_rate(), "gamma_c");
    const double d0 = omega - p.require(Param::omega0);
    const double db = omega - p.require(Param::omega_b);
    return ratio(db * d0 - g * g, db, gamma);
}

Frequency dispersive_detuning(const ModelParams& p)
{
    return p.require(Param::omega0) - p.require(Param::omega_b);
}

Frequency dispersive_dip_center(const ModelParams& p)
{
    const double delta = dispersive_detuning(p);
    if (delta == 0.0) {
        throw std::invalid_argument("dispersive model undefined at zero detuning");
    }
    const double g = p.require(Param::g_Q);
    const double n = p.require(Param::mean_n);
    return p.require(Param::omega0) + (g * g / delta) * (n + 0.5);
}

double dispersive_ratio(const ModelParams& p)
{
    const double delta = dispersive_detuning(p);
    if (delta == 0.0) {
        throw std::invalid_argument("dispersive model undefined at zero detuning");
    }
    return std::abs(p.require(Param::g_Q) / delta);
}

bool resolvability_condition(const ModelParams& p)
{
    const double delta = dispersive_detuning(p);
    if (delta == 0.0) {
        throw std::invalid_argument("dispersive model undefined at zero detuning");
    }
    const double g = p.require(Param::g_Q);
    double v1_sq;
    double vg;
    if (p.V1 && p.v_g) {
        v1_sq = (*p.V1) * (*p.V1);
        vg = *p.v_g;
    } else {
        // Same inequality expressed through the rate.
        v1_sq = p.feedline_rate();
        vg = 1.0;
    }
    return v1_sq < g * g * vg / (2.0 * std::abs(delta));
}

std::complex<double> t_dispersive(Frequency omega, const ModelParams& p)
{
    check_omega(omega);
    const double gamma = positive_rate(p.feedline_rate(), "gamma_c");
    return ratio(omega - dispersive_dip_center(p), 1.0, gamma);
}

Frequency dressed_qubit_frequency(const ModelParams& p)
{
    const double mid = 0.5 * (p.require(Param::omega0) + p.require(Param::omega_b));
    return std::hypot(mid, p.require(Param::g_C));
}

std::complex<double> t_qubit_cnmr(Frequency omega, const ModelParams& p)
{
    check_omega(omega);
    const double gamma = positive_rate(p.feedline_rate(), "gamma_c");
    return ratio(omega - dressed_qubit_frequency(p), 1.0, gamma);
}

std::complex<double> t_bare_stlr(Frequency omega, const ModelParams& p)
{
    check_omega(omega);
    const double gamma = positive_rate(p.stlr_rate(), "V2^2/v_g");
    return ratio(omega - p.require(Param::omega_r), 1.0, gamma);
}

namespace {

// Resonator coupled to a single two-level frequency `qubit`.
std::complex<double> stlr_with_qubit_at(Frequency omega, Frequency qubit, const ModelParams& p)
{
    const double g = p.require(Param::g_rq);
    if (g == 0.0) {
        return t_bare_stlr(omega, p);
    }
    const double gamma = positive_rate(p.stlr_rate(), "V2^2/v_g");
    const double dq = omega - qubit;
    const double dr = omega - p.require(Param::omega_r);
    return ratio(dr * dq - g * g, dq, gamma);
}

} // namespace

std::complex<double> t_stlr_qubit(Frequency omega, const ModelParams& p)
{
    check_omega(omega);
    return stlr_with_qubit_at(omega, p.require(Param::omega0), p);
}

std::complex<double> t_stlr_qubit_qnmr(Frequency omega, const ModelParams& p)
{
    check_omega(omega);
    const double g_q = p.require(Param::g_Q);
    if (g_q == 0.0) {
        return t_stlr_qubit(omega, p);
    }
    const double g_rq = p.require(Param::g_rq);
    if (g_rq == 0.0) {
        return t_bare_stlr(omega, p);
    }
    const double gamma = positive_rate(p.stlr_rate(), "V2^2/v_g");
    const double d0 = omega - p.require(Param::omega0);
    const double db = omega - p.require(Param::omega_b);
    const double dr = omega - p.require(Param::omega_r);
    // (omega - omega_b) * A, with A = d0 - g_Q^2 / db
    const double a_cleared = d0 * db - g_q * g_q;
    return ratio(dr * a_cleared - g_rq * g_rq * db, a_cleared, gamma);
}

std::complex<double> t_stlr_qubit_cnmr(Frequency omega, const ModelParams& p)
{
    check_omega(omega);
    return stlr_with_qubit_at(omega, dressed_qubit_frequency(p), p);
}

} // namespace scattering

std::complex<double> transmission_amplitude(ModelKind kind, Frequency omega,
                                            const ModelParams& p)
{
    using namespace scattering;
    switch (kind) {
    case ModelKind::QubitOnly: return t_qubit_only(omega, p);
    case ModelKind::QubitQNMR: return t_qubit_qnmr(omega, p);
    case ModelKind::QubitQNMRDispersive: return t_dispersive(omega, p);
    case ModelKind::QubitCNMR: return t_qubit_cnmr(omega, p);
    case ModelKind::StlrQubit: return t_stlr_qubit(omega, p);
    case ModelKind::StlrQubitQNMR: return t_stlr_qubit_qnmr(omega, p);
    case ModelKind::StlrQubitCNMR: return t_stlr_qubit_cnmr(omega, p);
    }
    throw std::invalid_argument("unknown model kind");
}

Spectrum synthesize(ModelKind kind, const std::vector<Frequency>& grid, const ModelParams& p,
                    unsigned threads)
{
    check_params(kind, p);
    std::vector<std::complex<double>> t(grid.size());
    const auto fill = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            t[i] = transmission_amplitude(kind, grid[i], p);
        }
    };
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(grid.size() / 1024 + 1)));
    if (threads == 1) {
        fill(0, grid.size());
    } else {
        std::vector<std::jthread> workers;
        const std::size_t chunk = (grid.size() + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t begin = w * chunk;
            const std::size_t end = std::min(grid.size(), begin + chunk);
            if (begin < end) {
                workers.emplace_back(fill, begin, end);
            }
        }
    }
    return Spectrum::from_amplitudes(grid, std::move(t));
}

namespace {

// Lorentzian dip of full width 2*gamma.
FeatureSet single_dip(Frequency center, double gamma)
{
    return {{center}, {}, {2.0 * gamma}};
}

// For each dip, the width between the nearest half-transmission points on
// either side. NaN when those points enclose another feature, which means
// the half points of this dip were lost to rounding.
std::vector<Frequency> widths_from_half_points(const std::vector<Frequency>& dips,
                                               const std::vector<Frequency>& unity,
                                               std::vector<Frequency> half_points)
{
    std::sort(half_points.begin(), half_points.end());
    std::vector<Frequency> widths;
    for (double d : dips) {
        const auto upper = std::upper_bound(half_points.begin(), half_points.end(), d);
        if (upper == half_points.begin() || upper == half_points.end()) {
            widths.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        const double lo = *std::prev(upper);
        const double hi = *upper;
        const auto inside = [&](double x) { return x != d && x > lo && x < hi; };
        if (std::any_of(dips.begin(), dips.end(), inside) || std::any_of(unity.begin(), unity.end(), inside)) {
            widths.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        widths.push_back(hi - lo);
    }
    return widths;
}

// Amplitude of the form P = x (x - c) - g^2, Q = x, with x = omega - anchor
// and c = other - anchor. Unity transmission at the anchor, dips at the
// normal modes of (anchor, other, g).
FeatureSet coupled_pair(Frequency anchor, Frequency other, double g, double gamma)
{
    const double c = other - anchor;
    FeatureSet f;
    const auto [lo, hi] = scattering::normal_modes(anchor, other, g);
    f.dips = {lo, hi};
    f.unity_points = {anchor};
    std::vector<Frequency> half;
    for (double s : {-1.0, 1.0}) {
        // x^2 - (c + s gamma) x - g^2 = 0
        for (double x : detail::real_quadratic_roots(-(c + s * gamma), -g * g)) {
            half.push_back(anchor + x);
        }
    }
    f.fwhm = widths_from_half_points(f.dips, f.unity_points, std::move(half));
    return f;
}

FeatureSet stlr_qnmr_features(const ModelParams& p)
{
    const double w0 = p.require(Param::omega0);
    const double b = p.require(Param::omega_b) - w0;
    const double r = p.require(Param::omega_r) - w0;
    const double gq2 = p.require(Param::g_Q) * p.require(Param::g_Q);
    const double grq2 = p.require(Param::g_rq) * p.require(Param::g_rq);
    const double gamma = p.stlr_rate();

    // P(x) = x^3 - (b + r) x^2 + (r b - gq2 - grq2) x + (r gq2 + grq2 b),
    // Q(x) = x^2 - b x - gq2, x = omega - omega0.
    // Roots of P + s gamma Q, Newton-polished on the factored form, which
    // keeps its accuracy when a dip sits close to a unity point.
    const auto cubic = [&](double s) {
        auto roots = detail::real_cubic_roots(-(b + r) + s * gamma, r * b - gq2 - grq2 - s * gamma * b,
                                              r * gq2 + grq2 * b - s * gamma * gq2);
        for (double& x : roots) {
            for (int it = 0; it < 3; ++it) {
                const double q = x * (x - b) - gq2;
                const double dq = 2.0 * x - b;
                const double f = (x - r) * q - grq2 * (x - b) + s * gamma * q;
                const double df = q + (x - r) * dq - grq2 + s * gamma * dq;
                if (df == 0.0 || !std::isfinite(f / df)) {
                    break;
                }
                x -= f / df;
            }
        }
        return roots;
    };
    FeatureSet f;
    for (double x : cubic(0.0)) {
        f.dips.push_back(w0 + x);
    }
    const auto [lo, hi] = scattering::normal_modes(w0, w0 + b, std::sqrt(gq2));
    f.unity_points = {lo, hi};
    std::vector<Frequency> half;
    for (double s : {-1.0, 1.0}) {
        for (double x : cubic(s)) {
            half.push_back(w0 + x);
        }
    }
    f.fwhm = widths_from_half_points(f.dips, f.unity_points, std::move(half));
    return f;
}

} // namespace

FeatureSet analytic_features(ModelKind kind, const ModelParams& p)
{
    check_params(kind, p);
    using namespace scattering;
    switch (kind) {
    case ModelKind::QubitOnly: return single_dip(p.require(Param::omega0), p.feedline_rate());
    case ModelKind::QubitQNMR: {
        const double g = p.require(Param::g_Q);
        if (g == 0.0) {
            return single_dip(p.require(Param::omega0), p.feedline_rate());
        }
        return coupled_pair(p.require(Param::omega_b), p.require(Param::omega0), g,
                            p.feedline_rate());
    }
    case ModelKind::QubitQNMRDispersive:
        return single_dip(dispersive_dip_center(p), p.feedline_rate());
    case ModelKind::QubitCNMR: return single_dip(dressed_qubit_frequency(p), p.feedline_rate());
    case ModelKind::StlrQubit:
    case ModelKind::StlrQubitCNMR: {
        const double g = p.require(Param::g_rq);
        if (g == 0.0) {
            return single_dip(p.require(Param::omega_r), p.stlr_rate());
        }
        const double qubit = kind == ModelKind::StlrQubit ? p.require(Param::omega0)
                                                          : dressed_qubit_frequency(p);
        return coupled_pair(qubit, p.require(Param::omega_r), g, p.stlr_rate());
    }
    case ModelKind::StlrQubitQNMR: {
        if (p.require(Param::g_rq) == 0.0) {
            return single_dip(p.require(Param::omega_r), p.stlr_rate());
        }
        if (p.require(Param::g_Q) == 0.0) {
            return coupled_pair(p.require(Param::omega0), p.require(Param::omega_r),
                                p.require(Param::g_rq), p.stlr_rate());
        }
        return stlr_qnmr_features(p);
    }
    }
    throw std::invalid_argument("unknown model kind");
}

} // namespace qspectra
