#include "swipt/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "swipt/error.hpp"

namespace swipt {

cdouble poly_eval(std::span<const double> coeffs, cdouble x) {
  cdouble acc{0.0, 0.0};
  for (double c : coeffs) acc = acc * x + c;
  return acc;
}

cdouble poly_eval(std::span<const cdouble> coeffs, cdouble x) {
  cdouble acc{0.0, 0.0};
  for (const cdouble& c : coeffs) acc = acc * x + c;
  return acc;
}

cdouble poly_derivative_eval(std::span<const double> coeffs, cdouble x) {
  const std::size_t n = coeffs.size();
  if (n < 2) return {0.0, 0.0};
  cdouble acc{0.0, 0.0};
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double power = static_cast<double>(n - 1 - i);
    acc = acc * x + power * coeffs[i];
  }
  return acc;
}

std::vector<double> poly_multiply(std::span<const double> a,
                                  std::span<const double> b) {
  if (a.empty() || b.empty()) return {};
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

std::vector<cdouble> poly_roots(std::span<const double> coeffs,
                                double residual_tol) {
  auto first = std::find_if(coeffs.begin(), coeffs.end(),
                            [](double c) { return c != 0.0; });
  if (first == coeffs.end())
    fail(ErrorCode::InvalidArgument, "poly_roots: zero polynomial");
  std::span<const double> c(first, coeffs.end());
  const int degree = static_cast<int>(c.size()) - 1;
  if (degree == 0) return {};

  // Scale the variable so the roots are O(1): x = scale * y. For the
  // resonant-circuit quartics the raw roots are ~1e7 and the coefficients
  // span ~60 decades, which wrecks an unscaled companion matrix.
  const double scale =
      std::pow(std::abs(c[degree] / c[0]), 1.0 / static_cast<double>(degree));
  std::vector<double> scaled(c.size());
  for (int i = 0; i <= degree; ++i)
    scaled[i] = c[i] * std::pow(scale, degree - i) / c[0];
  const double lead = scaled[0];

  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (int j = 0; j < degree; ++j) companion(0, j) = -scaled[j + 1] / lead;
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;

  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  if (solver.info() != Eigen::Success)
    fail(ErrorCode::NumericFailure, "poly_roots: eigenvalue solver failed");

  std::vector<cdouble> roots;
  roots.reserve(degree);
  for (int i = 0; i < degree; ++i) {
    cdouble z = solver.eigenvalues()[i] * scale;
    for (int iter = 0; iter < 20; ++iter) {
      const cdouble f = poly_eval(c, z);
      const cdouble df = poly_derivative_eval(c, z);
      if (std::abs(df) == 0.0) break;
      const cdouble step = f / df;
      z -= step;
      if (std::abs(step) <= 1e-15 * std::abs(z)) break;
    }
    roots.push_back(z);
  }

  // Residual is measured relative to the size of the individual terms, so it
  // is invariant under variable scaling.
  for (const cdouble& z : roots) {
    double term_scale = 0.0;
    for (int i = 0; i <= degree; ++i)
      term_scale = std::max(term_scale,
                            std::abs(c[i]) * std::pow(std::abs(z), degree - i));
    const double residual = std::abs(poly_eval(c, z)) / term_scale;
    if (!(residual < residual_tol))
      fail(ErrorCode::NumericFailure,
           "poly_roots: residual " + std::to_string(residual) +
               " exceeds tolerance");
  }
  return roots;
}

}  // namespace swipt
