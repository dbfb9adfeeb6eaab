#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "qspectra/constants.hpp"
#include "qspectra/model_params.hpp"
#include "qspectra/tridiagonal.hpp"

namespace qspectra::squid {

// Flux-biased rf-SQUID loop with a single Josephson junction.
struct CircuitSpec
{
    double C_J = 1.7e-14;                            // F
    double L = 6e-9;                                 // H
    double I_c = constants::flux_quantum / (constants::pi * 6e-9); // A, pi I_c L / Phi0 = 1
    double Phi_e = 0.5 * constants::flux_quantum;    // Wb
    std::size_t grid_points = 1001;                  // odd, >= 201, boundaries included
    double flux_window = 1.0;                        // half-width of the grid, units of Phi0

    // Throws std::invalid_argument describing the first violated constraint.
    void validate() const;
};

// Loop parameters that put the potential into the symmetric double well.
CircuitSpec reference_circuit();

// U(Phi) = (Phi - Phi_e)^2 / 2L - (I_c Phi0 / 2 pi) cos(2 pi Phi / Phi0)
double potential(double phi, const CircuitSpec& spec);

// Flux grid symmetric about Phi_e, endpoints included.
std::vector<double> flux_grid(const CircuitSpec& spec);

// Finite-difference Hamiltonian -(hbar^2 / 2 C_J) d^2/dPhi^2 + U on the
// interior grid points (Dirichlet walls at both ends).
SymmetricTridiagonal hamiltonian_matrix(const CircuitSpec& spec);

struct EigenSolution
{
    std::vector<double> flux;       // full grid, Wb
    std::vector<double> potential;  // J, on the full grid
    std::vector<double> energies;   // J, ascending
    // On the full grid, normalised so sum(psi^2) * dPhi = 1. Sign fixed so
    // the outermost significant lobe on the high-flux side is positive.
    std::vector<std::vector<double>> wavefunctions;
    double grid_spacing = 0.0;      // Wb
    Frequency omega0 = 0.0;         // (E1 - E0) / hbar
    double I_p = 0.0;               // |<1|I|0>|, A
    double I_01 = 0.0;              // signed <0|I|1>
    double I_00 = 0.0;
    double I_11 = 0.0;
};

// Lowest n_states eigenpairs of the loop Hamiltonian.
//
// Throws NumericalError when a wavefunction at the outermost interior grid
// point exceeds 1e-6 of its peak (boundary leakage), or when rerunning on a
// grid with twice the resolution moves E0 by more than 1e-3 relative.
EigenSolution solve_eigensystem(const CircuitSpec& spec, std::size_t n_states = 2);

struct CurrentElements
{
    double I_p;  // |<1|I|0>|
    double I_01; // <0|I|1>
    double I_10; // <1|I|0>
    double I_00;
    double I_11;
};

// Matrix elements of I = (Phi - Phi_e) / L in the eigenbasis by grid
// quadrature.
CurrentElements current_matrix_elements(const EigenSolution& sol, const CircuitSpec& spec);

struct TruncationReport
{
    double H00, H01, H10, H11;       // J
    double offdiag_ratio;            // max |H01|,|H10| over min |H00|,|H11|
    double left_mass_of_L;           // fraction of |L> probability with Phi < Phi_e
    double right_mass_of_R;
    double overlap_LR;               // <L|R>
    std::vector<double> psi_L, psi_R;
    bool valid;                      // offdiag_ratio < 1e-6
};

// Checks the two-level reduction: the Hamiltonian is diagonal in the
// numerical eigenbasis and |L>,|R> = (|0> -+ |1>)/sqrt(2) sit in opposite
// wells.
TruncationReport qubit_truncation_check(const EigenSolution& sol, const CircuitSpec& spec);

// Beam segment of the loop that forms the nanomechanical resonator.
struct MechanicalSpec
{
    double mass = 0.0;                     // kg
    Frequency omega_b = 0.0;
    std::optional<double> length;          // m, segment length l
    double B0 = 0.0;                       // T
    std::optional<double> amplitude_c;     // m, classical amplitude A_C
};

// Couplings with hbar restored once: energies / hbar -> rad/s.
// g_Q = B0 l |I_p| sqrt(hbar / (2 m omega_b)) / hbar
Frequency coupling_gQ(const MechanicalSpec& mech, double I_p);
// g_C = B0 l |I_p| A_C / hbar
Frequency coupling_gC(const MechanicalSpec& mech, double I_p);
// g_rq = M |I_p| I_r0 / hbar with I_r0 = (pi / 2 L_r) sqrt(hbar / (omega_r C_r))
Frequency coupling_grq(double I_p, double M_rq, double L_r, double C_r, Frequency omega_r);
// Zero-point current amplitude of the quarter-wave resonator near its
// grounded end.
double stlr_current_amplitude(double L_r, double C_r, Frequency omega_r);

// Inversions of the coupling formulas.
double field_from_gQ(Frequency g_Q, double mass, Frequency omega_b, double length, double I_p);
double mass_from_gQ(Frequency g_Q, double B0, Frequency omega_b, double length, double I_p);
double amplitude_from_gC(Frequency g_C, double B0, double length, double I_p);
// A_C * l, for when the segment length is unknown.
double amplitude_length_product(Frequency g_C, double B0, double I_p);

} // namespace qspectra::squid
