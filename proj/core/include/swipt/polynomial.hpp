#pragma once

#include <complex>
#include <span>
#include <vector>

namespace swipt {

using cdouble = std::complex<double>;

// Coefficient vectors are stored highest power first: c[0]*x^n + ... + c[n].

cdouble poly_eval(std::span<const double> coeffs, cdouble x);
cdouble poly_eval(std::span<const cdouble> coeffs, cdouble x);
cdouble poly_derivative_eval(std::span<const double> coeffs, cdouble x);

std::vector<double> poly_multiply(std::span<const double> a,
                                  std::span<const double> b);

/// All complex roots of a real polynomial. Eigenvalues of the companion
/// matrix seed a few Newton steps on the original coefficients. Throws
/// NumericFailure if any polished root leaves a residual above
/// `residual_tol * max|c_i|`.
std::vector<cdouble> poly_roots(std::span<const double> coeffs,
                                double residual_tol = 1e-6);

}  // namespace swipt
