#include "qspectra/tridiagonal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "qspectra/errors.hpp"

namespace qspectra {

std::vector<double> SymmetricTridiagonal::apply(std::span<const double> x) const
{
    const std::size_t n = size();
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = diag[i] * x[i];
        if (i > 0) {
            v += off[i - 1] * x[i - 1];
        }
        if (i + 1 < n) {
            v += off[i] * x[i + 1];
        }
        y[i] = v;
    }
    return y;
}

namespace {

// Number of eigenvalues strictly below x.
std::size_t sturm_count(const SymmetricTridiagonal& m, double x, double pivmin)
{
    std::size_t count = 0;
    double q = m.diag[0] - x;
    if (std::abs(q) < pivmin) {
        q = -pivmin;
    }
    count += q < 0.0;
    for (std::size_t i = 1; i < m.size(); ++i) {
        q = m.diag[i] - x - m.off[i - 1] * m.off[i - 1] / q;
        if (std::abs(q) < pivmin) {
            q = -pivmin;
        }
        count += q < 0.0;
    }
    return count;
}

double bisect_eigenvalue(const SymmetricTridiagonal& m, std::size_t index, double lo, double hi,
                         double pivmin)
{
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) {
            break;
        }
        if (sturm_count(m, mid, pivmin) > index) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    return 0.5 * (lo + hi);
}

// Solve (T - shift I) x = b with partial pivoting. The factorisation has an
// upper band of width two.
std::vector<double> shifted_solve(const SymmetricTridiagonal& m, double shift,
                                  std::vector<double> b, double tiny)
{
    const std::size_t n = m.size();
    std::vector<double> d(n), u1(n, 0.0), u2(n, 0.0), l(n, 0.0);
    std::vector<char> swapped(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        d[i] = m.diag[i] - shift;
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
        u1[i] = m.off[i];
    }
    // Row i holds (d[i], u1[i], u2[i]) on columns i, i+1, i+2.
    std::vector<double> sub(m.off.begin(), m.off.end());
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (std::abs(sub[i]) > std::abs(d[i])) {
            // swap rows i and i+1
            swapped[i] = 1;
            const double r0 = d[i], r1 = u1[i], r2 = u2[i];
            d[i] = sub[i];
            u1[i] = d[i + 1];
            u2[i] = (i + 2 < n) ? u1[i + 1] : 0.0;
            const double factor = r0 / d[i];
            l[i] = factor;
            d[i + 1] = r1 - factor * u1[i];
            if (i + 2 < n) {
                u1[i + 1] = r2 - factor * u2[i];
            }
            std::swap(b[i], b[i + 1]);
        } else {
            if (d[i] == 0.0) {
                d[i] = tiny;
            }
            const double factor = sub[i] / d[i];
            l[i] = factor;
            d[i + 1] -= factor * u1[i];
            if (i + 2 < n) {
                u1[i + 1] -= factor * u2[i];
            }
        }
        b[i + 1] -= l[i] * b[i];
    }
    if (d[n - 1] == 0.0) {
        d[n - 1] = tiny;
    }
    std::vector<double> x(n);
    for (std::size_t k = n; k-- > 0;) {
        double v = b[k];
        if (k + 1 < n) {
            v -= u1[k] * x[k + 1];
        }
        if (k + 2 < n) {
            v -= u2[k] * x[k + 2];
        }
        double piv = d[k];
        if (std::abs(piv) < tiny) {
            piv = std::copysign(tiny, piv == 0.0 ? 1.0 : piv);
        }
        x[k] = v / piv;
    }
    return x;
}

double norm2(const std::vector<double>& v)
{
    return std::sqrt(std::inner_product(v.begin(), v.end(), v.begin(), 0.0));
}

} // namespace

Eigenpairs lowest_eigenpairs(const SymmetricTridiagonal& m, std::size_t k)
{
    const std::size_t n = m.size();
    if (n == 0 || m.off.size() + 1 != n) {
        throw std::invalid_argument("tridiagonal matrix has inconsistent dimensions");
    }
    if (k == 0 || k > n) {
        throw std::invalid_argument("requested eigenpair count out of range");
    }

    // Gershgorin bounds.
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = (i > 0 ? std::abs(m.off[i - 1]) : 0.0) + (i + 1 < n ? std::abs(m.off[i]) : 0.0);
        lo = std::min(lo, m.diag[i] - r);
        hi = std::max(hi, m.diag[i] + r);
        scale = std::max(scale, std::abs(m.diag[i]) + r);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    const double pivmin = std::max(scale * eps * eps, std::numeric_limits<double>::min());
    const double pad = 2.0 * eps * scale + pivmin;
    lo -= pad;
    hi += pad;

    Eigenpairs out;
    for (std::size_t i = 0; i < k; ++i) {
        out.values.push_back(bisect_eigenvalue(m, i, lo, hi, pivmin));
    }

    const double tiny = eps * scale;
    for (std::size_t i = 0; i < k; ++i) {
        const double lambda = out.values[i];
        // Deterministic, non-degenerate start vector.
        std::vector<double> x(n);
        for (std::size_t j = 0; j < n; ++j) {
            x[j] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(j) + static_cast<double>(i));
        }
        // Perturb the shift slightly so the factorisation stays finite.
        const double shift = lambda + 4.0 * eps * std::max(std::abs(lambda), tiny);
        bool converged = false;
        for (int it = 0; it < 8 && !converged; ++it) {
            x = shifted_solve(m, shift, std::move(x), tiny);
            for (std::size_t prev = 0; prev < i; ++prev) {
                const auto& v = out.vectors[prev];
                const double proj = std::inner_product(v.begin(), v.end(), x.begin(), 0.0);
                for (std::size_t j = 0; j < n; ++j) {
                    x[j] -= proj * v[j];
                }
            }
            const double nrm = norm2(x);
            if (!(nrm > 0.0) || !std::isfinite(nrm)) {
                throw NumericalError("inverse iteration broke down");
            }
            for (double& v : x) {
                v /= nrm;
            }
            const auto tx = m.apply(x);
            double res = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                res += (tx[j] - lambda * x[j]) * (tx[j] - lambda * x[j]);
            }
            converged = it > 0 && std::sqrt(res) <= 64.0 * eps * scale * std::sqrt(static_cast<double>(n));
        }
        if (!converged) {
            throw NumericalError("inverse iteration did not converge");
        }
        out.vectors.push_back(std::move(x));
    }
    return out;
}

} // namespace qspectra
