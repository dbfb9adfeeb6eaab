#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qspectra {

// Real symmetric tridiagonal matrix: diag has n entries, off has n - 1.
struct SymmetricTridiagonal
{
    std::vector<double> diag;
    std::vector<double> off;

    std::size_t size() const noexcept { return diag.size(); }
    // y = T x
    std::vector<double> apply(std::span<const double> x) const;
};

struct Eigenpairs
{
    std::vector<double> values;               // ascending
    std::vector<std::vector<double>> vectors; // unit Euclidean norm
};

// Lowest k eigenpairs. Eigenvalues by Sturm-sequence bisection, eigenvectors
// by inverse iteration with a pivoted tridiagonal LU, re-orthogonalised
// against the lower states.
Eigenpairs lowest_eigenpairs(const SymmetricTridiagonal& m, std::size_t k);

} // namespace qspectra
