#pragma once

// Closed forms for time-ordered integrals of pure phases,
//   O_n(a_1..a_n; t) = int_{0 < s_1 < ... < s_n < t} exp(i sum_j a_j s_j) ds,
// through divided differences of exp.

#include <complex>
#include <span>
#include <vector>

namespace fermi {

using cplx = std::complex<double>;

/// exp[z_0, ..., z_n]. Points may coincide. Supports up to 8 points.
cplx divided_difference_exp(std::span<const cplx> z);

/// exp[i y_0, ..., i y_n] for real y, given the phases u_j = exp(i y_j).
/// Same algorithm as divided_difference_exp without evaluating exp at the points.
cplx divided_difference_phase(std::span<const double> y, std::span<const cplx> u);

/// int_0^t exp(i a s) ds, exact at a = 0 and free of cancellation near it.
cplx phase_integral(double a, double t);

/// O_n for the listed rates, earliest vertex first.
cplx ordered_phase_integral(std::span<const double> rates, double t);

/// Composite Gauss-Legendre rule on [a, b]: `panels` panels of 20 nodes.
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
QuadratureRule gauss_legendre(double a, double b, std::size_t panels);

}  // namespace fermi
