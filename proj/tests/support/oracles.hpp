#pragma once

// Test-only reference computations. These deliberately avoid the library's
// transfer-function and root-finding code paths.

#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "swipt/circuit_model.hpp"

namespace swipt::oracle {

/// V2/V1 from the mesh equations solved by elimination at s = j omega.
inline std::complex<double> mesh_gain(const Components& c, double k, double omega) {
  const std::complex<double> s(0.0, omega);
  const double M = k * std::sqrt(c.L1 * c.L2);
  const auto z11 = (c.RS + c.R1) + c.L1 * s + 1.0 / (c.C1 * s);
  const auto z22 = (c.RL + c.R2) + c.L2 * s + 1.0 / (c.C2 * s);
  // Reflected impedance route: I1 = V1 / (Z11 - (Ms)^2 / Z22).
  const auto i1 = 1.0 / (z11 - (M * s) * (M * s) / z22);
  const auto i2 = M * s * i1 / z22;
  return c.RL * i2;
}

/// Number of local maxima of |V2/V1| on a dense logarithmic grid.
inline int dense_gain_maxima_count(const Components& c, double k,
                                   double f_lo, double f_hi, int points) {
  std::vector<double> mag(static_cast<std::size_t>(points));
  const double ratio = std::log(f_hi / f_lo);
  for (int i = 0; i < points; ++i) {
    const double f = f_lo * std::exp(ratio * i / (points - 1));
    mag[static_cast<std::size_t>(i)] = std::abs(mesh_gain(c, k, 2.0 * M_PI * f));
  }
  int count = 0;
  for (int i = 1; i + 1 < points; ++i)
    if (mag[i] > mag[i - 1] && mag[i] >= mag[i + 1]) ++count;
  return count;
}

/// Local-maximum locations (Hz) on a dense linear grid.
inline std::vector<double> dense_gain_maxima(const Components& c, double k,
                                             double f_lo, double f_hi, int points) {
  std::vector<double> f(static_cast<std::size_t>(points));
  std::vector<double> mag(f.size());
  for (int i = 0; i < points; ++i) {
    f[i] = f_lo + (f_hi - f_lo) * i / (points - 1);
    mag[i] = std::abs(mesh_gain(c, k, 2.0 * M_PI * f[i]));
  }
  std::vector<double> out;
  for (int i = 1; i + 1 < points; ++i)
    if (mag[i] > mag[i - 1] && mag[i] >= mag[i + 1]) out.push_back(f[i]);
  return out;
}

/// Wrapped distance between two angles.
inline double angle_distance(double a, double b) {
  return std::abs(std::remainder(a - b, 2.0 * M_PI));
}

/// Continuous state-space model x' = A x + B v1, v2 = C x with
/// x = (i1, i2, vC1, vC2).
struct StateSpace {
  Eigen::Matrix4d A;
  Eigen::Vector4d B;
  Eigen::RowVector4d C;
};

inline StateSpace state_space(const Components& c, double k) {
  const double M = k * std::sqrt(c.L1 * c.L2);
  Eigen::Matrix2d Lm;
  Lm << c.L1, -M, -M, c.L2;
  const Eigen::Matrix2d Li = Lm.inverse();
  Eigen::Matrix<double, 2, 4> rhs;  // L di/dt = rhs * x + (v1, 0)
  rhs << -(c.RS + c.R1), 0, -1, 0,
         0, -(c.RL + c.R2), 0, -1;
  StateSpace ss;
  ss.A.setZero();
  ss.A.topRows<2>() = Li * rhs;
  ss.A(2, 0) = 1.0 / c.C1;
  ss.A(3, 1) = 1.0 / c.C2;
  ss.B.setZero();
  ss.B.head<2>() = Li.col(0);
  ss.C.setZero();
  ss.C(1) = c.RL;
  return ss;
}

/// h(l Ts) = C exp(A l Ts) B, with h(0) taken as the right-hand limit.
inline std::vector<double> state_space_impulse(const Components& c, double k,
                                               double Ts, std::size_t n) {
  const StateSpace ss = state_space(c, k);
  const Eigen::Matrix4d step = (ss.A * Ts).exp();
  Eigen::Vector4d x = ss.B;
  std::vector<double> h(n);
  for (std::size_t l = 0; l < n; ++l) {
    h[l] = ss.C * x;
    x = step * x;
  }
  return h;
}

}  // namespace swipt::oracle
