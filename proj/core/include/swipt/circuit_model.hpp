#pragma once

// Frequency-domain model of the two-coil series-series resonant link.
//
// Loop 1: ideal source V1, source resistance RS, coil loss R1, C1, L1.
// Loop 2: load RL, coil loss R2, C2, L2. Coupling through M = k*sqrt(L1*L2).
// Mesh equations in s:
//   V1 = (R'S + 1/(C1 s) + L1 s) I1 - M s I2
//   0  = (R'L + 1/(C2 s) + L2 s) I2 - M s I1,    V2 = RL I2
// with R'S = RS + R1 and R'L = RL + R2.

#include <array>
#include <complex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace swipt {

using cdouble = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Largest coupling accepted. At k = 1 the quartic degenerates.
inline constexpr double kMaxCoupling = 0.999;

/// Raw component values (SI units).
struct Components {
  double C1 = 0.0;
  double C2 = 0.0;
  double L1 = 0.0;
  double L2 = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  double RS = 0.0;
  double RL = 0.0;
};

/// Component set from the reference prototype with C retuned so that the
/// resonance sits exactly at 1 MHz (L = 6.3 uH, C = 1/(w0^2 L) ~ 4.0207 nF).
Components paper_default_components();

/// Same prototype with the rounded 4 nF capacitors (f0 ~ 1.0026 MHz).
Components paper_nominal_components();

/// Validated circuit parameters plus the derived quantities. Immutable.
class CircuitParams {
 public:
  /// Throws DomainError on non-positive components, k outside
  /// [0, kMaxCoupling], or L1*C1 != L2*C2 (relative mismatch >= 1e-12).
  CircuitParams(const Components& components, double k);

  const Components& components() const noexcept { return c_; }
  double k() const noexcept { return k_; }
  double M() const noexcept { return M_; }
  double source_loop_resistance() const noexcept { return RSp_; }  // R'S
  double load_loop_resistance() const noexcept { return RLp_; }    // R'L
  double leakage_L1() const noexcept { return c_.L1 - M_; }
  double leakage_L2() const noexcept { return c_.L2 - M_; }
  double omega0() const noexcept { return omega0_; }
  double f0() const noexcept { return omega0_ / kTwoPi; }
  double Q1() const noexcept { return omega0_ * c_.L1 / RSp_; }
  double Q2() const noexcept { return omega0_ * c_.L2 / RLp_; }

  CircuitParams with_coupling(double k) const { return {c_, k}; }
  CircuitParams with_load(double RL) const;

 private:
  Components c_;
  double k_;
  double M_;
  double RSp_;
  double RLp_;
  double omega0_;
};

/// H(s) = a3 s^3 / (b4 s^4 + b3 s^3 + b2 s^2 + b1 s + b0).
struct TransferFunction {
  double a3 = 0.0;
  double b4 = 0.0;
  double b3 = 0.0;
  double b2 = 0.0;
  double b1 = 0.0;
  double b0 = 0.0;

  /// Denominator coefficients, highest power first.
  std::array<double, 5> denominator() const { return {b4, b3, b2, b1, b0}; }
  /// Numerator coefficients, highest power first.
  std::array<double, 4> numerator() const { return {a3, 0.0, 0.0, 0.0}; }
  /// Resonant angular frequency recovered from b1/b3.
  double omega0() const;
};

TransferFunction derive_transfer_function(const CircuitParams& p);

/// H(j omega).
cdouble eval_H(const TransferFunction& tf, double omega);
/// H(s) at an arbitrary complex frequency.
cdouble eval_H_s(const TransferFunction& tf, cdouble s);

/// Two conjugate pole pairs sigma_i +- j omega_i, stored by their
/// upper-half-plane member and ordered so that sigma_1 < sigma_2.
struct PolePairs {
  cdouble first;
  cdouble second;
  /// max |D(s_i)| / max|b_i| over the four roots.
  double residual = 0.0;

  std::array<cdouble, 4> all() const {
    return {first, std::conj(first), second, std::conj(second)};
  }
};

/// Throws NumericFailure when the roots do not form two conjugate pairs or
/// the residual check fails.
PolePairs find_poles(const TransferFunction& tf);

/// Frequencies where H(j omega) is real-valued: positive roots of
/// b4 w^4 - b2 w^2 + b0 = 0, as (omega_minus, omega_plus) in rad/s.
/// std::nullopt when the biquadratic has no two distinct positive roots.
std::optional<std::pair<double, double>> real_gain_frequencies(
    const TransferFunction& tf);

/// Local maxima of |H(j omega)| in rad/s, ascending. One entry below the
/// splitting coupling, two above it.
std::vector<double> gain_maxima(const TransferFunction& tf);

struct PeakAnalysis {
  bool split = false;
  /// Peak frequencies in Hz: the real-valued-H frequencies when split, f0
  /// otherwise.
  double f_minus = 0.0;
  double f_plus = 0.0;
  double mag_minus = 0.0;
  double mag_plus = 0.0;
  double phase_minus = 0.0;
  double phase_plus = 0.0;
  /// Locations of the |H| maxima in Hz (equal when not split).
  double f_max_minus = 0.0;
  double f_max_plus = 0.0;
  /// Only filled by analyze_peaks, which knows the circuit.
  std::optional<double> k_split;
};

PeakAnalysis peak_frequencies_exact(const TransferFunction& tf);

/// peak_frequencies_exact plus the splitting threshold of the circuit.
PeakAnalysis analyze_peaks(const CircuitParams& p);

/// f- = f0/sqrt(1+k), f+ = f0/sqrt(1-k). DomainError unless 0 <= k < 1.
std::pair<double, double> peak_frequencies_approx(double k, double f0);

/// k = (f+^2 - f-^2) / (f+^2 + f-^2). InvalidArgument unless 0 < f- <= f+.
double coupling_from_peaks(double f_minus, double f_plus);

/// f+/f- = sqrt((1+k)/(1-k)) for the approximate peaks.
double peak_ratio(double k);

/// First n couplings with integer f+/f- = m = 2, 3, ...: k = (m^2-1)/(m^2+1).
std::vector<double> orthogonal_couplings(int n);

struct SteadyState {
  double omega = 0.0;
  cdouble V1;
  cdouble V2;
  cdouble I1;
  cdouble I2;
  double P1 = 0.0;
  double P2 = 0.0;
  double eta = 0.0;
  cdouble Z1;
};

/// Solves the mesh equations at s = j omega for a source phasor V1.
SteadyState solve_steady_state(const CircuitParams& p, double omega,
                               cdouble V1 = {1.0, 0.0});

struct EfficiencyPoint {
  double omega = 0.0;
  double eta = 0.0;
};

/// eta(omega) on a strictly increasing positive grid.
std::vector<EfficiencyPoint> efficiency_curve(const CircuitParams& p,
                                              std::span<const double> omega_grid);

/// Smallest k at which |H| develops two maxima, by bisection to `tol`.
/// NoSplitInRange if the circuit never splits below kMaxCoupling.
double find_k_split(const Components& c, double tol = 1e-4);

}  // namespace swipt
