#include "polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qspectra::detail {

std::vector<double> real_quadratic_roots(double b, double c)
{
    const double disc = b * b - 4.0 * c;
    if (disc < 0.0) {
        return {};
    }
    // Avoids cancellation between -b and sqrt(disc).
    const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    std::vector<double> roots;
    if (q != 0.0) {
        roots = {q, c / q};
    } else {
        roots = {0.0, 0.0};
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

namespace {

double polish_cubic(double x, double a2, double a1, double a0)
{
    for (int it = 0; it < 4; ++it) {
        const double f = ((x + a2) * x + a1) * x + a0;
        const double df = (3.0 * x + 2.0 * a2) * x + a1;
        if (df == 0.0) {
            break;
        }
        const double next = x - f / df;
        if (!std::isfinite(next) || std::abs(next - x) >= std::abs(x) + 1.0) {
            break;
        }
        x = next;
    }
    return x;
}

} // namespace

std::vector<double> real_cubic_roots(double a2, double a1, double a0)
{
    // Work on a scaled variable so the coefficients are O(1).
    const double s = std::max({std::abs(a2), std::sqrt(std::abs(a1)), std::cbrt(std::abs(a0)), 1e-300});
    const double A = a2 / s;
    const double B = a1 / (s * s);
    const double C = a0 / (s * s * s);

    const double p = B - A * A / 3.0;
    const double q = 2.0 * A * A * A / 27.0 - A * B / 3.0 + C;
    const double shift = -A / 3.0;
    const double disc = 0.25 * q * q + p * p * p / 27.0;

    std::vector<double> ys;
    if (disc > 0.0) {
        const double sq = std::sqrt(disc);
        ys.push_back(std::cbrt(-0.5 * q + sq) + std::cbrt(-0.5 * q - sq) + shift);
    } else if (p == 0.0) {
        ys.push_back(shift);
    } else {
        const double m = 2.0 * std::sqrt(-p / 3.0);
        const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
        const double theta = std::acos(arg) / 3.0;
        for (int k = 0; k < 3; ++k) {
            ys.push_back(m * std::cos(theta - 2.0 * std::numbers::pi * k / 3.0) + shift);
        }
    }
    std::vector<double> roots;
    roots.reserve(ys.size());
    for (double y : ys) {
        roots.push_back(polish_cubic(y * s, a2, a1, a0));
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

} // namespace qspectra::detail
