#include "qspectra/squid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "qspectra/errors.hpp"

namespace qspectra::squid {

using constants::flux_quantum;
using constants::hbar;
using constants::pi;

void CircuitSpec::validate() const
{
    if (!(C_J > 0.0) || !std::isfinite(C_J)) {
        throw std::invalid_argument("C_J must be positive");
    }
    if (!(L > 0.0) || !std::isfinite(L)) {
        throw std::invalid_argument("L must be positive");
    }
    // I_c = 0 is the harmonic LC limit and is allowed.
    if (!(I_c >= 0.0) || !std::isfinite(I_c)) {
        throw std::invalid_argument("I_c must be non-negative");
    }
    if (!std::isfinite(Phi_e)) {
        throw std::invalid_argument("Phi_e must be finite");
    }
    if (grid_points < 201 || grid_points % 2 == 0) {
        throw std::invalid_argument("grid_points must be odd and >= 201 (got " +
                                    std::to_string(grid_points) + ")");
    }
    if (!(flux_window > 0.0) || !std::isfinite(flux_window)) {
        throw std::invalid_argument("flux_window must be positive");
    }
}

CircuitSpec reference_circuit()
{
    return CircuitSpec{};
}

double potential(double phi, const CircuitSpec& spec)
{
    const double d = phi - spec.Phi_e;
    return d * d / (2.0 * spec.L) -
           spec.I_c * flux_quantum / (2.0 * pi) * std::cos(2.0 * pi * phi / flux_quantum);
}

std::vector<double> flux_grid(const CircuitSpec& spec)
{
    const std::size_t n = spec.grid_points;
    const double half = spec.flux_window * flux_quantum;
    const double h = 2.0 * half / static_cast<double>(n - 1);
    const auto centre = static_cast<std::ptrdiff_t>((n - 1) / 2);
    std::vector<double> grid(n);
    for (std::size_t i = 0; i < n; ++i) {
        grid[i] = spec.Phi_e + static_cast<double>(static_cast<std::ptrdiff_t>(i) - centre) * h;
    }
    return grid;
}

SymmetricTridiagonal hamiltonian_matrix(const CircuitSpec& spec)
{
    spec.validate();
    const auto grid = flux_grid(spec);
    const double h = grid[1] - grid[0];
    const double kinetic = hbar * hbar / (2.0 * spec.C_J * h * h);
    const std::size_t interior = grid.size() - 2;
    SymmetricTridiagonal m;
    m.diag.resize(interior);
    m.off.assign(interior - 1, -kinetic);
    for (std::size_t i = 0; i < interior; ++i) {
        m.diag[i] = 2.0 * kinetic + potential(grid[i + 1], spec);
    }
    return m;
}

namespace {

double quadrature(const std::vector<double>& a, const std::vector<double>& b,
                  const std::vector<double>& weight, double h)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i] * weight[i];
    }
    return s * h;
}

EigenSolution solve_raw(const CircuitSpec& spec, std::size_t n_states)
{
    const auto m = hamiltonian_matrix(spec);
    const auto pairs = lowest_eigenpairs(m, n_states);

    EigenSolution sol;
    sol.flux = flux_grid(spec);
    sol.grid_spacing = sol.flux[1] - sol.flux[0];
    sol.potential.resize(sol.flux.size());
    for (std::size_t i = 0; i < sol.flux.size(); ++i) {
        sol.potential[i] = potential(sol.flux[i], spec);
    }
    sol.energies = pairs.values;
    const double norm = 1.0 / std::sqrt(sol.grid_spacing);
    for (const auto& v : pairs.vectors) {
        std::vector<double> psi(sol.flux.size(), 0.0);
        double peak = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) {
            psi[i + 1] = v[i] * norm;
            peak = std::max(peak, std::abs(psi[i + 1]));
        }
        for (std::size_t i = psi.size(); i-- > 0;) {
            if (std::abs(psi[i]) > 1e-3 * peak) {
                if (psi[i] < 0.0) {
                    for (double& x : psi) {
                        x = -x;
                    }
                }
                break;
            }
        }
        sol.wavefunctions.push_back(std::move(psi));
    }
    return sol;
}

} // namespace

EigenSolution solve_eigensystem(const CircuitSpec& spec, std::size_t n_states)
{
    spec.validate();
    if (n_states < 2) {
        throw std::invalid_argument("solve_eigensystem needs at least 2 states");
    }
    EigenSolution sol = solve_raw(spec, n_states);

    for (std::size_t s = 0; s < sol.wavefunctions.size(); ++s) {
        const auto& psi = sol.wavefunctions[s];
        double peak = 0.0;
        for (double x : psi) {
            peak = std::max(peak, std::abs(x));
        }
        const double edge = std::max(std::abs(psi[1]), std::abs(psi[psi.size() - 2]));
        if (edge > 1e-6 * peak) {
            throw NumericalError("boundary leakage: state " + std::to_string(s) +
                                 " has edge amplitude " + std::to_string(edge / peak) +
                                 " of its peak; widen flux_window");
        }
    }

    CircuitSpec fine = spec;
    fine.grid_points = 2 * spec.grid_points - 1;
    const double e0_fine = lowest_eigenpairs(hamiltonian_matrix(fine), 1).values[0];
    if (std::abs(e0_fine - sol.energies[0]) > 1e-3 * std::abs(e0_fine)) {
        throw NumericalError("ground-state energy not converged under grid refinement");
    }

    sol.omega0 = (sol.energies[1] - sol.energies[0]) / hbar;
    const auto currents = current_matrix_elements(sol, spec);
    sol.I_p = currents.I_p;
    sol.I_01 = currents.I_01;
    sol.I_00 = currents.I_00;
    sol.I_11 = currents.I_11;
    return sol;
}

CurrentElements current_matrix_elements(const EigenSolution& sol, const CircuitSpec& spec)
{
    if (sol.wavefunctions.size() < 2) {
        throw std::invalid_argument("current matrix elements need two states");
    }
    std::vector<double> current(sol.flux.size());
    for (std::size_t i = 0; i < current.size(); ++i) {
        current[i] = (sol.flux[i] - spec.Phi_e) / spec.L;
    }
    const auto& psi0 = sol.wavefunctions[0];
    const auto& psi1 = sol.wavefunctions[1];
    const double h = sol.grid_spacing;
    CurrentElements c{};
    c.I_01 = quadrature(psi0, psi1, current, h);
    c.I_10 = quadrature(psi1, psi0, current, h);
    c.I_00 = quadrature(psi0, psi0, current, h);
    c.I_11 = quadrature(psi1, psi1, current, h);
    c.I_p = std::abs(c.I_01);
    return c;
}

TruncationReport qubit_truncation_check(const EigenSolution& sol, const CircuitSpec& spec)
{
    if (sol.wavefunctions.size() < 2) {
        throw std::invalid_argument("truncation check needs two states");
    }
    const auto m = hamiltonian_matrix(spec);
    const double root_h = std::sqrt(sol.grid_spacing);
    const auto interior = [&](const std::vector<double>& psi) {
        std::vector<double> v(psi.begin() + 1, psi.end() - 1);
        for (double& x : v) {
            x *= root_h;
        }
        return v;
    };
    const auto v0 = interior(sol.wavefunctions[0]);
    const auto v1 = interior(sol.wavefunctions[1]);
    const auto h0 = m.apply(v0);
    const auto h1 = m.apply(v1);
    const auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
        return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
    };

    TruncationReport r{};
    r.H00 = dot(v0, h0);
    r.H01 = dot(v0, h1);
    r.H10 = dot(v1, h0);
    r.H11 = dot(v1, h1);
    r.offdiag_ratio = std::max(std::abs(r.H01), std::abs(r.H10)) /
                      std::min(std::abs(r.H00), std::abs(r.H11));
    r.valid = r.offdiag_ratio < 1e-6;

    const auto& psi0 = sol.wavefunctions[0];
    const auto& psi1 = sol.wavefunctions[1];
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    r.psi_L.resize(psi0.size());
    r.psi_R.resize(psi0.size());
    for (std::size_t i = 0; i < psi0.size(); ++i) {
        r.psi_L[i] = (psi0[i] - psi1[i]) * inv_sqrt2;
        r.psi_R[i] = (psi0[i] + psi1[i]) * inv_sqrt2;
    }
    double left_L = 0.0, total_L = 0.0, right_R = 0.0, total_R = 0.0, overlap = 0.0;
    for (std::size_t i = 0; i < psi0.size(); ++i) {
        const double l2 = r.psi_L[i] * r.psi_L[i];
        const double r2 = r.psi_R[i] * r.psi_R[i];
        const double side = sol.flux[i] - spec.Phi_e;
        const double w_left = side < 0.0 ? 1.0 : (side == 0.0 ? 0.5 : 0.0);
        left_L += w_left * l2;
        right_R += (1.0 - w_left) * r2;
        total_L += l2;
        total_R += r2;
        overlap += r.psi_L[i] * r.psi_R[i];
    }
    r.left_mass_of_L = left_L / total_L;
    r.right_mass_of_R = right_R / total_R;
    r.overlap_LR = overlap * sol.grid_spacing;
    return r;
}

Frequency coupling_gQ(const MechanicalSpec& mech, double I_p)
{
    if (!mech.length) {
        throw MissingParameter("length");
    }
    if (!(mech.mass > 0.0) || !(mech.omega_b > 0.0)) {
        throw std::invalid_argument("mechanical mass and omega_b must be positive");
    }
    const double zero_point = std::sqrt(hbar / (2.0 * mech.mass * mech.omega_b));
    return mech.B0 * (*mech.length) * std::abs(I_p) * zero_point / hbar;
}

Frequency coupling_gC(const MechanicalSpec& mech, double I_p)
{
    if (!mech.length) {
        throw MissingParameter("length");
    }
    if (!mech.amplitude_c) {
        throw MissingParameter("amplitude_c");
    }
    return mech.B0 * (*mech.length) * std::abs(I_p) * (*mech.amplitude_c) / hbar;
}

double stlr_current_amplitude(double L_r, double C_r, Frequency omega_r)
{
    if (!(L_r > 0.0) || !(C_r > 0.0) || !(omega_r > 0.0)) {
        throw std::invalid_argument("resonator L_r, C_r, omega_r must be positive");
    }
    return pi / (2.0 * L_r) * std::sqrt(hbar / (omega_r * C_r));
}

Frequency coupling_grq(double I_p, double M_rq, double L_r, double C_r, Frequency omega_r)
{
    if (!(M_rq > 0.0)) {
        throw std::invalid_argument("mutual inductance must be positive");
    }
    return M_rq * std::abs(I_p) * stlr_current_amplitude(L_r, C_r, omega_r) / hbar;
}

double field_from_gQ(Frequency g_Q, double mass, Frequency omega_b, double length, double I_p)
{
    // B0 = g_Q sqrt(2 m omega_b) / (l I_p), hbar restored
    return g_Q * hbar * std::sqrt(2.0 * mass * omega_b / hbar) / (length * std::abs(I_p));
}

double mass_from_gQ(Frequency g_Q, double B0, Frequency omega_b, double length, double I_p)
{
    // m = B0^2 l^2 I_p^2 / (2 g_Q^2 omega_b), hbar restored
    const double force = B0 * length * std::abs(I_p);
    return force * force / (2.0 * g_Q * g_Q * omega_b * hbar);
}

double amplitude_from_gC(Frequency g_C, double B0, double length, double I_p)
{
    return amplitude_length_product(g_C, B0, I_p) / length;
}

double amplitude_length_product(Frequency g_C, double B0, double I_p)
{
    return g_C * hbar / (B0 * std::abs(I_p));
}

} // namespace qspectra::squid
