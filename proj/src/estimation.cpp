#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

#include "qspectra/errors.hpp"
#include "qspectra/estimation.hpp"
#include "qspectra/squid.hpp"

namespace qspectra {

namespace {

constexpr std::array<std::pair<ModelClass, std::string_view>, 4> class_names{{
    {ModelClass::NoNMR, "NoNMR"},
    {ModelClass::QuantumNMR, "QuantumNMR"},
    {ModelClass::ClassicalNMR, "ClassicalNMR"},
    {ModelClass::Dispersive, "Dispersive"},
}};

// Radicands that are negative only through rounding are clamped to zero.
double checked_radicand(double r, double scale, const char* what)
{
    if (r >= 0.0) {
        return r;
    }
    if (-r <= 1e-12 * scale) {
        return 0.0;
    }
    throw InconsistentFeatures(std::string(what) + ": features imply a negative radicand");
}

// sqrt(R) * k with first-order uncertainty, given dR/dx_i and sigma_i.
Estimate scaled_root(double R, double k, std::initializer_list<std::pair<double, double>> partials)
{
    double var_R = 0.0;
    for (const auto& [d, s] : partials) {
        var_R += d * d * s * s;
    }
    const double sigma_R = std::sqrt(var_R);
    const double value = k * std::sqrt(R);
    if (value == 0.0) {
        // Linearisation breaks down at the branch point; use sqrt of the spread.
        return {0.0, k * std::sqrt(sigma_R)};
    }
    // d(k sqrt R) = k dR / (2 sqrt R)
    return {value, k * sigma_R / (2.0 * std::sqrt(R))};
}

// Coupling of a resonant pair from its two normal modes and one bare mode:
// g^2 = (w+ - a)(a - w-).
Estimate pair_coupling_from_bare(Estimate plus, Estimate minus, Estimate bare, const char* what)
{
    const double u = plus.value - bare.value;
    const double v = bare.value - minus.value;
    const double R = checked_radicand(u * v, plus.value * plus.value, what);
    return scaled_root(R, 1.0, {{v, plus.sigma}, {-u, minus.sigma}, {u - v, bare.sigma}});
}

Estimate floored(Estimate e, double floor)
{
    e.sigma = std::max(e.sigma, floor);
    return e;
}

bool between(double x, double a, double b)
{
    return x > std::min(a, b) && x < std::max(a, b);
}

std::vector<DipFeature> deepest(std::vector<DipFeature> dips, std::size_t count)
{
    if (dips.size() > count) {
        std::stable_sort(dips.begin(), dips.end(),
                         [](const DipFeature& a, const DipFeature& b) { return a.depth > b.depth; });
        dips.resize(count);
    }
    std::sort(dips.begin(), dips.end(),
              [](const DipFeature& a, const DipFeature& b) { return a.center < b.center; });
    return dips;
}

Estimate dip_estimate(const DipFeature& d)
{
    return {d.center, 0.5 * d.fwhm};
}

double default_unity_tol(double noise)
{
    return std::min(0.09, std::max(1e-3, 5.0 * noise));
}

} // namespace

std::string_view class_name(ModelClass c) noexcept
{
    for (const auto& [k, name] : class_names) {
        if (k == c) {
            return name;
        }
    }
    return "unknown";
}

std::optional<ModelClass> class_from_name(std::string_view name) noexcept
{
    for (const auto& [k, n] : class_names) {
        if (n == name) {
            return k;
        }
    }
    return std::nullopt;
}

ModelClass classify_features(const std::vector<DipFeature>& dips, const std::vector<Frequency>& unity,
                             double grid_step, const ClassifyOptions& opts)
{
    const std::size_t n_dips = dips.size();
    const auto unity_between = [&](std::size_t i, std::size_t j) {
        return std::any_of(unity.begin(), unity.end(),
                           [&](double u) { return between(u, dips[i].center, dips[j].center); });
    };

    if (opts.topology == Topology::Direct) {
        if (n_dips == 2 && unity_between(0, 1)) {
            return ModelClass::QuantumNMR;
        }
        if (n_dips == 1) {
            if (opts.dispersive) {
                return ModelClass::Dispersive;
            }
            if (!opts.ref_omega0) {
                throw AmbiguousClassification(
                    "a single dip needs a reference qubit frequency to separate NoNMR from ClassicalNMR");
            }
            const DipFeature& d = dips.front();
            const double tol = std::max({2.0 * grid_step, 0.25 * d.fwhm, 3.0 * d.center_sigma});
            return std::abs(d.center - *opts.ref_omega0) <= tol ? ModelClass::NoNMR
                                                                 : ModelClass::ClassicalNMR;
        }
        throw AmbiguousClassification("direct coupling: " + std::to_string(n_dips) + " dips and " +
                                      std::to_string(unity.size()) + " unity points fit no class");
    }

    if (n_dips == 3) {
        return ModelClass::QuantumNMR;
    }
    if (n_dips == 2 && unity.size() == 1 && unity_between(0, 1)) {
        if (!opts.ref_omega0) {
            throw AmbiguousClassification(
                "resonator coupling: one unity point needs a reference qubit frequency");
        }
        const double tol = std::max(3.0 * grid_step, 0.25 * std::min(dips[0].fwhm, dips[1].fwhm));
        return std::abs(unity.front() - *opts.ref_omega0) <= tol ? ModelClass::NoNMR
                                                                  : ModelClass::ClassicalNMR;
    }
    throw AmbiguousClassification("resonator coupling: " + std::to_string(n_dips) + " dips and " +
                                  std::to_string(unity.size()) + " unity points fit no class");
}

ModelClass classify(const Spectrum& s, const ClassifyOptions& opts)
{
    const auto dips = detect_dips(s, opts.depth_threshold);
    const double tol = opts.unity_tol.value_or(default_unity_tol(estimate_noise_level(s)));
    const auto unity = detect_unity_points(s, tol, dips);
    return classify_features(dips, unity, s.grid_step(), opts);
}

Estimate estimate_gQ_direct(Estimate omega_plus, Estimate omega_minus, Estimate omega0, Estimate omega_b)
{
    const double d = omega_plus.value - omega_minus.value;
    const double e = omega0.value - omega_b.value;
    const double R = checked_radicand((d - e) * (d + e), d * d + e * e, "g_Q");
    return scaled_root(R, 0.5,
                       {{2.0 * d, omega_plus.sigma},
                        {-2.0 * d, omega_minus.sigma},
                        {-2.0 * e, omega0.sigma},
                        {2.0 * e, omega_b.sigma}});
}

Estimate estimate_gC(Estimate omega_tilde, Estimate omega0, Estimate omega_b)
{
    const double mid = 0.5 * (omega0.value + omega_b.value);
    const double w = omega_tilde.value;
    const double R = checked_radicand((w - mid) * (w + mid), w * w, "g_C");
    return scaled_root(R, 1.0, {{2.0 * w, omega_tilde.sigma}, {-mid, omega0.sigma}, {-mid, omega_b.sigma}});
}

Estimate estimate_grq(Estimate omega_p, Estimate omega_m, Estimate omega0, Estimate omega_r)
{
    try {
        return estimate_gQ_direct(omega_p, omega_m, omega0, omega_r);
    } catch (const InconsistentFeatures&) {
        throw InconsistentFeatures("g_rq: features imply a negative radicand");
    }
}

Estimate estimate_omega_b_stlr(Estimate omega_pp, Estimate omega_pm, Estimate omega0)
{
    return {omega_pp.value + omega_pm.value - omega0.value,
            std::hypot(omega_pp.sigma, omega_pm.sigma, omega0.sigma)};
}

Estimate estimate_gQ_stlr(Estimate omega_pp, Estimate omega_pm, Estimate omega0)
{
    // w0 (w''- + w''+) - w0^2 - w''+ w''- = (w''+ - w0)(w0 - w''-)
    const double u = omega_pp.value - omega0.value;
    const double v = omega0.value - omega_pm.value;
    const double R = checked_radicand(u * v, omega0.value * omega0.value, "g_Q");
    return scaled_root(R, 1.0, {{v, omega_pp.sigma}, {-u, omega_pm.sigma}, {u - v, omega0.sigma}});
}

PhononEstimate estimate_phonon_number(Frequency dip_center, Frequency omega0, Frequency g_Q, Frequency delta)
{
    if (!(g_Q != 0.0 && delta != 0.0 && std::isfinite(g_Q) && std::isfinite(delta))) {
        throw std::invalid_argument("phonon readout needs nonzero g_Q and detuning");
    }
    const double shift = g_Q * g_Q / delta;
    const double x = (dip_center - omega0 - 0.5 * shift) / shift;
    const double n = std::round(x);
    const double residual = std::abs(x - n);
    if (residual > 0.25) {
        throw InconsistentFeatures("dip lies off the dispersive ladder (residual " +
                                   std::to_string(residual) + ")");
    }
    if (n < 0.0) {
        throw InconsistentFeatures("dip implies a negative phonon number");
    }
    return {static_cast<int>(n), residual};
}

Spectrum add_measurement_noise(const Spectrum& s, double sigma, std::uint64_t seed)
{
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw std::invalid_argument("noise sigma must be finite and non-negative");
    }
    if (sigma == 0.0) {
        return s;
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, sigma);
    std::vector<double> T = s.transmission();
    std::vector<double> phase = s.phase();
    for (std::size_t i = 0; i < T.size(); ++i) {
        T[i] = std::clamp(T[i] + normal(rng), 0.0, 1.0);
        phase[i] = wrap_phase(phase[i] + normal(rng));
    }
    return Spectrum::from_measurements(s.freqs(), std::move(T), std::move(phase));
}

EstimationReport estimate_parameters(const Spectrum& s, const EstimateHints& hints)
{
    EstimationReport rep;
    rep.grid_step = s.grid_step();
    rep.noise_level = estimate_noise_level(s);
    const double floor = 0.5 * rep.grid_step;
    const double tol = hints.unity_tol.value_or(default_unity_tol(rep.noise_level));

    rep.dips = detect_dips(s, hints.depth_threshold);
    if (rep.dips.empty()) {
        rep.status = "absent-features";
        return rep;
    }
    rep.unity_points = detect_unity_points(s, tol, rep.dips);

    ModelClass cls;
    if (hints.assume_class) {
        cls = *hints.assume_class;
    } else {
        ClassifyOptions opts;
        opts.topology = hints.topology;
        if (hints.ref_omega0) {
            opts.ref_omega0 = hints.ref_omega0->value;
        }
        opts.dispersive = hints.dispersive;
        opts.depth_threshold = hints.depth_threshold;
        opts.unity_tol = tol;
        try {
            cls = classify_features(rep.dips, rep.unity_points, rep.grid_step, opts);
        } catch (const AmbiguousClassification& e) {
            rep.status = "ambiguous";
            rep.warnings.emplace_back(e.what());
            return rep;
        }
    }
    rep.model_class = cls;

    // Unity points are read to within one grid step.
    const auto unity_estimate = [&](double u) { return Estimate{u, rep.grid_step}; };
    const auto need = [&](std::size_t count, const char* what) {
        if (rep.dips.size() < count) {
            throw InconsistentFeatures(std::string(what) + " needs " + std::to_string(count) + " dips");
        }
        if (rep.dips.size() > count) {
            rep.warnings.push_back("kept the " + std::to_string(count) + " deepest of " +
                                   std::to_string(rep.dips.size()) + " dips");
        }
        return deepest(rep.dips, count);
    };
    // Unity point strictly between two frequencies.
    const auto unity_in = [&](double a, double b) -> std::optional<double> {
        for (double u : rep.unity_points) {
            if (between(u, a, b)) {
                return u;
            }
        }
        return std::nullopt;
    };

    if (hints.topology == Topology::Direct) {
        switch (cls) {
        case ModelClass::QuantumNMR: {
            const auto d = need(2, "quantum resonator");
            const Estimate plus = dip_estimate(d[1]);
            const Estimate minus = dip_estimate(d[0]);
            Estimate omega_b;
            if (auto u = unity_in(minus.value, plus.value)) {
                omega_b = unity_estimate(*u);
            } else if (hints.ref_omega_b) {
                omega_b = *hints.ref_omega_b;
                rep.warnings.emplace_back("no unity point between the dips; used the reference omega_b");
            } else {
                throw InconsistentFeatures("no unity point between the dips");
            }
            rep.omega_b_est = floored(omega_b, floor);
            if (hints.ref_omega0) {
                rep.omega0_est = floored(*hints.ref_omega0, floor);
                rep.g_est = estimate_gQ_direct(plus, minus, *hints.ref_omega0, omega_b);
            } else {
                // The normal modes sum to w0 + wb.
                rep.omega0_est = Estimate{plus.value + minus.value - omega_b.value,
                                          std::hypot(plus.sigma, minus.sigma, omega_b.sigma)};
                rep.g_est = pair_coupling_from_bare(plus, minus, omega_b, "g_Q");
            }
            rep.g_kind = "g_Q";
            break;
        }
        case ModelClass::NoNMR: {
            const auto d = need(1, "bare qubit");
            rep.omega0_est = dip_estimate(d[0]);
            break;
        }
        case ModelClass::ClassicalNMR: {
            const auto d = need(1, "classical resonator");
            const Estimate tilde = dip_estimate(d[0]);
            rep.omega_tilde_est = floored(tilde, floor);
            if (!hints.ref_omega0 || !hints.ref_omega_b) {
                rep.warnings.emplace_back("g_C needs reference omega0 and omega_b");
                break;
            }
            rep.omega0_est = *hints.ref_omega0;
            rep.omega_b_est = *hints.ref_omega_b;
            rep.g_est = estimate_gC(tilde, *hints.ref_omega0, *hints.ref_omega_b);
            rep.g_kind = "g_C";
            if (hints.B0 && hints.I_p) {
                if (hints.length) {
                    rep.amplitude_est =
                        squid::amplitude_from_gC(rep.g_est->value, *hints.B0, *hints.length, *hints.I_p);
                } else {
                    rep.amplitude_length_product =
                        squid::amplitude_length_product(rep.g_est->value, *hints.B0, *hints.I_p);
                }
            }
            break;
        }
        case ModelClass::Dispersive: {
            const auto d = need(1, "dispersive readout");
            const double center = d[0].center;
            if (!hints.ref_omega0 || !hints.g_Q) {
                rep.warnings.emplace_back("phonon readout needs reference omega0 and g_Q");
                break;
            }
            rep.omega0_est = *hints.ref_omega0;
            double delta;
            if (hints.delta) {
                delta = *hints.delta;
            } else if (hints.ref_omega_b) {
                delta = hints.ref_omega0->value - hints.ref_omega_b->value;
            } else {
                rep.warnings.emplace_back("phonon readout needs a detuning or reference omega_b");
                break;
            }
            const auto ph = estimate_phonon_number(center, hints.ref_omega0->value, *hints.g_Q, delta);
            rep.phonon_n_est = ph.n;
            rep.phonon_residual = ph.residual;
            const double shift = std::abs(*hints.g_Q * *hints.g_Q / delta);
            if (d[0].fwhm > shift) {
                rep.warnings.emplace_back("dip wider than the ladder spacing; rungs are not resolved");
            }
            break;
        }
        }
    } else {
        switch (cls) {
        case ModelClass::NoNMR: {
            const auto d = need(2, "resonator-coupled qubit");
            const Estimate plus = dip_estimate(d[1]);
            const Estimate minus = dip_estimate(d[0]);
            const auto u = unity_in(minus.value, plus.value);
            if (!u) {
                throw InconsistentFeatures("no unity point between the dips");
            }
            const Estimate omega0 = unity_estimate(*u);
            rep.omega0_est = floored(omega0, floor);
            if (hints.ref_omega_r) {
                rep.omega_r_est = *hints.ref_omega_r;
                rep.g_est = estimate_grq(plus, minus, omega0, *hints.ref_omega_r);
            } else {
                rep.omega_r_est = Estimate{plus.value + minus.value - omega0.value,
                                           std::hypot(plus.sigma, minus.sigma, omega0.sigma)};
                rep.g_est = pair_coupling_from_bare(plus, minus, omega0, "g_rq");
            }
            rep.g_kind = "g_rq";
            break;
        }
        case ModelClass::QuantumNMR: {
            need(3, "resonator-coupled quantum resonator");
            if (rep.unity_points.size() < 2) {
                throw InconsistentFeatures("quantum resonator behind a resonator needs two unity points");
            }
            std::vector<double> u = rep.unity_points;
            std::sort(u.begin(), u.end());
            const Estimate pm = unity_estimate(u.front());
            const Estimate pp = unity_estimate(u.back());
            if (!hints.ref_omega0) {
                rep.warnings.emplace_back("omega_b and g_Q need a reference omega0");
                break;
            }
            rep.omega0_est = *hints.ref_omega0;
            rep.omega_b_est = estimate_omega_b_stlr(pp, pm, *hints.ref_omega0);
            rep.g_est = estimate_gQ_stlr(pp, pm, *hints.ref_omega0);
            rep.g_kind = "g_Q";
            break;
        }
        case ModelClass::ClassicalNMR: {
            const auto d = need(2, "resonator-coupled classical resonator");
            const auto u = unity_in(d[0].center, d[1].center);
            if (!u) {
                throw InconsistentFeatures("no unity point between the dips");
            }
            const Estimate tilde = unity_estimate(*u);
            rep.omega_tilde_est = floored(tilde, floor);
            if (!hints.ref_omega0 || !hints.ref_omega_b) {
                rep.warnings.emplace_back("g_C needs reference omega0 and omega_b");
                break;
            }
            rep.omega0_est = *hints.ref_omega0;
            rep.omega_b_est = *hints.ref_omega_b;
            rep.g_est = estimate_gC(tilde, *hints.ref_omega0, *hints.ref_omega_b);
            rep.g_kind = "g_C";
            break;
        }
        case ModelClass::Dispersive:
            throw InconsistentFeatures("dispersive readout is only defined for direct coupling");
        }
    }

    for (auto* e : {&rep.omega0_est, &rep.omega_b_est, &rep.omega_r_est, &rep.omega_tilde_est, &rep.g_est}) {
        if (*e) {
            **e = floored(**e, floor);
        }
    }
    for (auto& d : rep.dips) {
        d.center_sigma = std::max(d.center_sigma, floor);
    }
    return rep;
}

} // namespace qspectra
