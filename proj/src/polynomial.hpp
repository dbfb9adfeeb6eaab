#pragma once

#include <vector>

namespace qspectra::detail {

// Real roots of x^2 + b x + c, ascending. Empty if complex.
std::vector<double> real_quadratic_roots(double b, double c);

// Real roots of x^3 + a2 x^2 + a1 x + a0, ascending, Newton-polished.
std::vector<double> real_cubic_roots(double a2, double a1, double a0);

} // namespace qspectra::detail
