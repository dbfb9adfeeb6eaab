#include <algorithm>
#include <cmath>
#include <optional>
#include <limits>
#include <numeric>
#include <stdexcept>

#include <Eigen/Dense>

#include "polynomial.hpp"
#include "qspectra/estimation.hpp"

namespace qspectra {

LorentzFit fit_lorentzian_dip(std::span<const double> freqs, std::span<const double> transmission,
                              double center0, double depth0, double half_width0)
{
    if (freqs.size() != transmission.size() || freqs.size() < 4) {
        throw std::invalid_argument("lorentzian fit needs at least 4 matching points");
    }
    if (!(half_width0 > 0.0)) {
        throw std::invalid_argument("lorentzian fit needs a positive initial width");
    }
    // Work in u = (w - center0) / half_width0 so all parameters are O(1).
    const std::size_t n = freqs.size();
    std::vector<double> u(n);
    for (std::size_t i = 0; i < n; ++i) {
        u[i] = (freqs[i] - center0) / half_width0;
    }

    Eigen::Vector3d theta(0.0, depth0, 1.0); // centre, depth, width
    const auto residuals = [&](const Eigen::Vector3d& th, Eigen::VectorXd& r, Eigen::MatrixXd* jac) {
        r.resize(static_cast<Eigen::Index>(n));
        if (jac) {
            jac->resize(static_cast<Eigen::Index>(n), 3);
        }
        const double c = th[0], d = th[1], g = th[2];
        for (std::size_t i = 0; i < n; ++i) {
            const double x = u[i] - c;
            const double den = x * x + g * g;
            const auto k = static_cast<Eigen::Index>(i);
            r[k] = 1.0 - d * g * g / den - transmission[i];
            if (jac) {
                (*jac)(k, 0) = -2.0 * d * g * g * x / (den * den);
                (*jac)(k, 1) = -g * g / den;
                (*jac)(k, 2) = -2.0 * d * g * x * x / (den * den);
            }
        }
    };

    Eigen::VectorXd r;
    Eigen::MatrixXd J;
    residuals(theta, r, &J);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    LorentzFit fit;
    for (int it = 0; it < 200; ++it) {
        fit.iterations = it + 1;
        const Eigen::Matrix3d jtj = J.transpose() * J;
        const Eigen::Vector3d grad = J.transpose() * r;
        bool improved = false;
        for (int attempt = 0; attempt < 30; ++attempt) {
            Eigen::Matrix3d a = jtj;
            for (int k = 0; k < 3; ++k) {
                a(k, k) += lambda * std::max(jtj(k, k), 1e-12);
            }
            const Eigen::Vector3d step = a.ldlt().solve(-grad);
            const Eigen::Vector3d trial = theta + step;
            Eigen::VectorXd r_trial;
            residuals(trial, r_trial, nullptr);
            const double trial_cost = r_trial.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost <= cost) {
                const double rel = (cost - trial_cost) / std::max(cost, 1e-300);
                const double step_size = step.norm();
                theta = trial;
                cost = trial_cost;
                residuals(theta, r, &J);
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
                if (rel < 1e-14 || step_size < 1e-12) {
                    fit.converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!improved) {
            // No descent direction left: at a minimum to working precision.
            fit.converged = true;
        }
        if (fit.converged) {
            break;
        }
    }

    fit.center = center0 + theta[0] * half_width0;
    fit.depth = theta[1];
    fit.half_width = std::abs(theta[2]) * half_width0;
    fit.rms = std::sqrt(cost / static_cast<double>(n));
    if (n > 3) {
        const Eigen::Matrix3d jtj = J.transpose() * J;
        const double s2 = cost / static_cast<double>(n - 3);
        Eigen::FullPivLU<Eigen::Matrix3d> lu(jtj);
        if (lu.isInvertible()) {
            const Eigen::Matrix3d cov = lu.inverse() * s2;
            fit.center_sigma = std::sqrt(std::max(cov(0, 0), 0.0)) * half_width0;
        }
    }
    return fit;
}

namespace {

struct Run
{
    std::size_t first;
    std::size_t last;
};

// Maximal index runs where T <= level. A run only ends once T climbs above
// level + hysteresis, so noise around the threshold does not split a dip.
std::vector<Run> runs_below(const std::vector<double>& T, double level, double hysteresis)
{
    std::vector<Run> runs;
    bool open = false;
    for (std::size_t i = 0; i < T.size(); ++i) {
        if (T[i] <= level) {
            if (open) {
                runs.back().last = i;
            } else {
                runs.push_back({i, i});
                open = true;
            }
        } else if (T[i] > level + hysteresis) {
            open = false;
        }
    }
    return runs;
}

// Crossing of `level` between indices a and b (T[a] < level <= T[b]).
double interpolate_crossing(const std::vector<double>& f, const std::vector<double>& T,
                            std::size_t a, std::size_t b, double level)
{
    const double ta = T[a], tb = T[b];
    if (tb == ta) {
        return 0.5 * (f[a] + f[b]);
    }
    return f[a] + (level - ta) / (tb - ta) * (f[b] - f[a]);
}

// Vertex of the parabola through (x0,y0), (x1,y1), (x2,y2); x1 when flat.
double parabola_vertex(double x0, double y0, double x1, double y1, double x2, double y2)
{
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double curvature = (d12 - d01) / (x2 - x0);
    if (curvature == 0.0 || !std::isfinite(curvature)) {
        return x1;
    }
    // Derivative of the Newton form: d01 + curvature * (2x - x0 - x1) = 0
    const double v = 0.5 * (x0 + x1) - d01 / (2.0 * curvature);
    return std::clamp(v, x0, x2);
}

// Coupled-mode dips are only Lorentzian near their minimum; the wide window
// fit sets the width, and a refit over the core sets the centre.
void refine_center(DipFeature& dip, const std::vector<double>& f, const std::vector<double>& T,
                   std::size_t lo, std::size_t hi)
{
    const double hw = 0.5 * dip.fwhm;
    std::vector<double> xs, ys;
    for (std::size_t i = lo; i <= hi; ++i) {
        if (std::abs(f[i] - dip.center) <= 0.35 * hw) {
            xs.push_back(f[i]);
            ys.push_back(T[i]);
        }
    }
    if (xs.size() < 5) {
        return;
    }
    const auto core = fit_lorentzian_dip(xs, ys, dip.center, dip.depth, hw);
    if (std::isfinite(core.center) && std::abs(core.center - dip.center) <= hw && core.half_width > 0.0) {
        dip.center = core.center;
        dip.center_sigma = core.center_sigma;
    }
}

} // namespace

std::vector<DipFeature> detect_dips(const Spectrum& s, double depth_threshold)
{
    if (!(depth_threshold > 0.0 && depth_threshold < 1.0)) {
        throw std::invalid_argument("depth_threshold must lie in (0, 1)");
    }
    const auto& f = s.freqs();
    const auto& T = s.transmission();
    const std::size_t n = s.size();
    const double level = 1.0 - depth_threshold;
    const auto runs = runs_below(T, level, 5.0 * estimate_noise_level(s));

    std::vector<DipFeature> dips;
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const Run& run = runs[k];
        // Search bounds: halfway to the neighbouring runs.
        const std::size_t lo_bound = k == 0 ? 0 : (runs[k - 1].last + run.first) / 2;
        const std::size_t hi_bound = k + 1 == runs.size() ? n - 1 : (run.last + runs[k + 1].first) / 2;

        std::size_t m = run.first;
        for (std::size_t i = run.first; i <= run.last; ++i) {
            if (T[i] < T[m]) {
                m = i;
            }
        }
        const double t_min = T[m];
        const double half_level = 0.5 * (1.0 + t_min);

        std::optional<double> left, right;
        for (std::size_t i = m; i > lo_bound; --i) {
            if (T[i - 1] >= half_level) {
                left = interpolate_crossing(f, T, i, i - 1, half_level);
                break;
            }
        }
        for (std::size_t i = m; i < hi_bound; ++i) {
            if (T[i + 1] >= half_level) {
                right = interpolate_crossing(f, T, i, i + 1, half_level);
                break;
            }
        }
        double half_width;
        if (left && right) {
            half_width = 0.5 * (*right - *left);
        } else if (left) {
            half_width = f[m] - *left;
        } else if (right) {
            half_width = *right - f[m];
        } else {
            half_width = 0.5 * (f[hi_bound] - f[lo_bound]);
        }
        half_width = std::max(half_width, 0.5 * (f[std::min(m + 1, n - 1)] - f[m > 0 ? m - 1 : 0]) * 0.5);

        double naive_center = f[m];
        if (m > 0 && m + 1 < n) {
            naive_center = parabola_vertex(f[m - 1], T[m - 1], f[m], T[m], f[m + 1], T[m + 1]);
        }

        DipFeature dip;
        dip.center = naive_center;
        dip.fwhm = 2.0 * half_width;
        dip.depth = 1.0 - t_min;
        dip.fit_residual = 0.0;
        dip.center_sigma = 0.0;

        const double w_lo = std::max(f[lo_bound], naive_center - 3.0 * half_width);
        const double w_hi = std::min(f[hi_bound], naive_center + 3.0 * half_width);
        std::vector<double> xs, ys;
        for (std::size_t i = lo_bound; i <= hi_bound; ++i) {
            if (f[i] >= w_lo && f[i] <= w_hi) {
                xs.push_back(f[i]);
                ys.push_back(T[i]);
            }
        }
        if (xs.size() >= 5) {
            const auto fit = fit_lorentzian_dip(xs, ys, naive_center, dip.depth, half_width);
            const bool sane = std::isfinite(fit.center) && fit.center >= w_lo && fit.center <= w_hi &&
                              fit.half_width > 0.0 && fit.depth > 0.0 && fit.depth < 1.5;
            if (sane) {
                dip.center = fit.center;
                dip.fwhm = 2.0 * fit.half_width;
                dip.depth = std::clamp(fit.depth, 0.0, 1.0);
                dip.fit_residual = fit.rms;
                dip.center_sigma = fit.center_sigma;
                dip.fitted = true;
                refine_center(dip, f, T, lo_bound, hi_bound);
            }
        }
        dips.push_back(dip);
    }
    return dips;
}

std::vector<Frequency> detect_unity_points(const Spectrum& s, double tol)
{
    return detect_unity_points(s, tol, detect_dips(s, 0.5));
}

std::vector<Frequency> detect_unity_points(const Spectrum& s, double tol,
                                           const std::vector<DipFeature>& dips)
{
    if (!(tol > 0.0 && tol < 0.1)) {
        throw std::invalid_argument("unity tolerance must lie in (0, 0.1)");
    }
    const auto& f = s.freqs();
    const auto& T = s.transmission();
    const auto& ph = s.phase();
    const std::size_t n = s.size();
    // The phase passes through zero at a unity point; on a coarse grid the
    // nearest sample can miss |phase| <= tol, so a sign change between the
    // neighbours also counts.
    const auto crosses_zero = [&](std::size_t i) {
        const double a = ph[i - 1], b = ph[i + 1];
        return std::max(std::abs(a), std::abs(b)) < 0.5 && ((a <= 0.0 && b >= 0.0) || (a >= 0.0 && b <= 0.0));
    };
    const auto passes = [&](std::size_t i) {
        return T[i] >= 1.0 - tol && (std::abs(ph[i]) <= tol || crosses_zero(i));
    };

    std::vector<Frequency> centers;
    for (const auto& d : dips) {
        centers.push_back(d.center);
    }
    std::sort(centers.begin(), centers.end());

    std::vector<Frequency> unity;
    for (std::size_t k = 0; k + 1 < centers.size(); ++k) {
        const auto begin = std::upper_bound(f.begin(), f.end(), centers[k]) - f.begin();
        const auto end = std::lower_bound(f.begin(), f.end(), centers[k + 1]) - f.begin();
        std::optional<std::size_t> best;
        std::vector<std::size_t> members;
        for (auto i = static_cast<std::size_t>(begin); i < static_cast<std::size_t>(end); ++i) {
            if (i == 0 || i + 1 >= n || !passes(i)) {
                continue;
            }
            members.push_back(i);
            if (T[i] >= T[i - 1] && T[i] >= T[i + 1] && (!best || T[i] > T[*best])) {
                best = i;
            }
        }
        if (!best) {
            continue;
        }
        const std::size_t b = *best;
        double vertex = parabola_vertex(f[b - 1], T[b - 1], f[b], T[b], f[b + 1], T[b + 1]);
        if (!s.has_amplitudes()) {
            // Noisy data: T is flat at a unity point but the phase crosses
            // zero with a finite slope, so fit a line to the phase over the
            // run of near-unity samples around the maximum.
            std::size_t lo = b, hi = b;
            while (lo > static_cast<std::size_t>(begin) && T[lo - 1] >= 1.0 - tol) {
                --lo;
            }
            while (hi + 1 < static_cast<std::size_t>(end) && T[hi + 1] >= 1.0 - tol) {
                ++hi;
            }
            std::vector<std::size_t> run;
            for (std::size_t i = lo; i <= hi; ++i) {
                if (std::abs(ph[i]) < 0.5) {
                    run.push_back(i);
                }
            }
            if (run.size() >= 5) {
                const double x0 = f[b];
                const double scale = f[hi] - f[lo];
                Eigen::MatrixXd a(static_cast<Eigen::Index>(run.size()), 3);
                Eigen::VectorXd y(static_cast<Eigen::Index>(run.size()));
                for (std::size_t j = 0; j < run.size(); ++j) {
                    const auto r = static_cast<Eigen::Index>(j);
                    const double x = (f[run[j]] - x0) / scale;
                    a(r, 0) = 1.0;
                    a(r, 1) = x;
                    a(r, 2) = x * x;
                    y(r) = ph[run[j]];
                }
                const Eigen::Vector3d c = a.colPivHouseholderQr().solve(y);
                // Root of the fitted quadratic closest to the maximum of T.
                std::optional<double> root;
                if (std::abs(c[2]) <= 1e-9 * std::abs(c[1])) {
                    if (c[1] != 0.0) {
                        root = -c[0] / c[1];
                    }
                } else {
                    for (double x : detail::real_quadratic_roots(c[1] / c[2], c[0] / c[2])) {
                        if (!root || std::abs(x) < std::abs(*root)) {
                            root = x;
                        }
                    }
                }
                if (root) {
                    const double v = x0 + *root * scale;
                    if (v >= f[lo] && v <= f[hi]) {
                        vertex = v;
                    }
                }
            }
        }
        unity.push_back(vertex);
    }
    return unity;
}

double estimate_noise_level(const Spectrum& s)
{
    if (s.has_amplitudes() || s.size() < 5) {
        return 0.0;
    }
    const auto& T = s.transmission();
    std::vector<double> second;
    second.reserve(T.size());
    for (std::size_t i = 1; i + 1 < T.size(); ++i) {
        second.push_back(std::abs(T[i + 1] - 2.0 * T[i] + T[i - 1]));
    }
    const auto mid = second.begin() + static_cast<std::ptrdiff_t>(second.size() / 2);
    std::nth_element(second.begin(), mid, second.end());
    // The second difference of white noise has standard deviation sqrt(6) sigma.
    return 1.4826 * (*mid) / std::sqrt(6.0);
}

} // namespace qspectra
