#include "swipt/circuit_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "swipt/error.hpp"
#include "swipt/polynomial.hpp"

namespace swipt {

namespace {

constexpr double kTuningTolerance = 1e-12;

void require_positive(double v, const char* name) {
  if (!(v > 0.0) || !std::isfinite(v))
    fail(ErrorCode::DomainError,
         std::string("component ") + name + " must be positive and finite");
}

double normalized_phase(cdouble h) {
  const double phase = std::arg(h);
  return phase <= -kPi ? kPi : phase;
}

// Golden-section maximisation of f on [a, b].
template <class F>
double golden_max(F&& f, double a, double b, double rel_tol = 1e-12) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (std::abs(b - a) > rel_tol * (std::abs(a) + std::abs(b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

}  // namespace

Components paper_default_components() {
  Components c = paper_nominal_components();
  const double omega0 = kTwoPi * 1.0e6;
  c.C1 = 1.0 / (omega0 * omega0 * c.L1);
  c.C2 = c.C1;
  return c;
}

Components paper_nominal_components() {
  Components c;
  c.C1 = 4e-9;
  c.C2 = 4e-9;
  c.L1 = 6.3e-6;
  c.L2 = 6.3e-6;
  c.R1 = 0.62;
  c.R2 = 0.62;
  c.RS = 0.17;
  c.RL = 10.0;
  return c;
}

CircuitParams::CircuitParams(const Components& components, double k)
    : c_(components), k_(k) {
  require_positive(c_.C1, "C1");
  require_positive(c_.C2, "C2");
  require_positive(c_.L1, "L1");
  require_positive(c_.L2, "L2");
  require_positive(c_.R1, "R1");
  require_positive(c_.R2, "R2");
  require_positive(c_.RS, "RS");
  require_positive(c_.RL, "RL");
  if (!(k >= 0.0 && k <= kMaxCoupling))
    fail(ErrorCode::DomainError,
         "coupling k must lie in [0, 0.999], got " + std::to_string(k));
  const double lc1 = c_.L1 * c_.C1;
  const double lc2 = c_.L2 * c_.C2;
  if (std::abs(lc1 - lc2) / lc1 >= kTuningTolerance)
    fail(ErrorCode::DomainError,
         "circuit is not perfectly tuned: L1*C1 != L2*C2");
  M_ = k_ * std::sqrt(c_.L1 * c_.L2);
  RSp_ = c_.RS + c_.R1;
  RLp_ = c_.RL + c_.R2;
  omega0_ = 1.0 / std::sqrt(lc1);
}

CircuitParams CircuitParams::with_load(double RL) const {
  Components c = c_;
  c.RL = RL;
  return {c, k_};
}

double TransferFunction::omega0() const { return std::sqrt(b1 / b3); }

TransferFunction derive_transfer_function(const CircuitParams& p) {
  const Components& c = p.components();
  const double RSp = p.source_loop_resistance();
  const double RLp = p.load_loop_resistance();
  TransferFunction tf;
  tf.a3 = c.RL * p.M();
  tf.b4 = c.L1 * c.L2 * (1.0 - p.k() * p.k());
  tf.b3 = RSp * c.L2 + RLp * c.L1;
  tf.b2 = RSp * RLp + c.L1 / c.C2 + c.L2 / c.C1;
  tf.b1 = RLp / c.C1 + RSp / c.C2;
  tf.b0 = 1.0 / (c.C1 * c.C2);
  return tf;
}

cdouble eval_H_s(const TransferFunction& tf, cdouble s) {
  const auto den = tf.denominator();
  return tf.a3 * s * s * s / poly_eval(std::span<const double>(den), s);
}

cdouble eval_H(const TransferFunction& tf, double omega) {
  return eval_H_s(tf, cdouble(0.0, omega));
}

PolePairs find_poles(const TransferFunction& tf) {
  if (!(tf.b4 > 0.0))
    fail(ErrorCode::DomainError, "find_poles: b4 must be positive");
  const auto den = tf.denominator();
  std::vector<cdouble> roots = poly_roots(den);

  std::vector<cdouble> upper;
  for (const cdouble& r : roots)
    if (r.imag() > 0.0) upper.push_back(r);
  if (upper.size() != 2)
    fail(ErrorCode::NumericFailure,
         "find_poles: denominator does not have two conjugate pole pairs");

  std::sort(upper.begin(), upper.end(),
            [](const cdouble& a, const cdouble& b) { return a.real() < b.real(); });

  PolePairs poles{upper[0], upper[1], 0.0};
  const double bmax = *std::max_element(den.begin(), den.end());
  for (const cdouble& r : poles.all())
    poles.residual = std::max(
        poles.residual, std::abs(poly_eval(std::span<const double>(den), r)) / bmax);
  if (!(poles.residual < 1e-6))
    fail(ErrorCode::NumericFailure, "find_poles: residual check failed");
  return poles;
}

std::optional<std::pair<double, double>> real_gain_frequencies(
    const TransferFunction& tf) {
  const double disc = tf.b2 * tf.b2 - 4.0 * tf.b4 * tf.b0;
  if (!(disc > 0.0) || !(tf.b2 > 0.0)) return std::nullopt;
  const double q = 0.5 * (tf.b2 + std::sqrt(disc));
  const double w2_plus = q / tf.b4;
  const double w2_minus = tf.b0 / q;
  if (!(w2_minus > 0.0)) return std::nullopt;
  return std::make_pair(std::sqrt(w2_minus), std::sqrt(w2_plus));
}

std::vector<double> gain_maxima(const TransferFunction& tf) {
  if (tf.a3 == 0.0) return {};
  // Work in u = omega/omega0 with D normalised by b0. With y = u^2,
  //   |D(j omega)|^2 / b0^2 = P(y) = (B4 y^2 - B2 y + 1)^2 + y (B1 - B3 y)^2
  // and |H|^2 is proportional to y^3 / P(y). Its stationary points are the
  // positive roots of Q(y) = 3 P(y) - y P'(y).
  const double w0 = tf.omega0();
  const double B4 = tf.b4 * std::pow(w0, 4) / tf.b0;
  const double B3 = tf.b3 * std::pow(w0, 3) / tf.b0;
  const double B2 = tf.b2 * w0 * w0 / tf.b0;
  const double B1 = tf.b1 * w0 / tf.b0;

  const std::array<double, 3> even{B4, -B2, 1.0};
  std::vector<double> P = poly_multiply(even, even);
  P[1] += B3 * B3;
  P[2] += -2.0 * B1 * B3;
  P[3] += B1 * B1;
  // Q_i = (i - 1) P_i for the degree-4 coefficient list.
  const std::array<double, 5> Q{-P[0], 0.0, P[2], 2.0 * P[3], 3.0 * P[4]};

  std::vector<double> stationary;
  for (const cdouble& r : poly_roots(Q)) {
    if (r.real() > 0.0 && std::abs(r.imag()) <= 1e-7 * std::abs(r))
      stationary.push_back(r.real());
  }
  std::sort(stationary.begin(), stationary.end());

  // Q(0) > 0 and Q -> -inf, so the stationary points alternate max, min, max.
  std::vector<double> maxima_y;
  if (stationary.size() >= 3) {
    maxima_y = {stationary.front(), stationary.back()};
  } else if (!stationary.empty()) {
    maxima_y = {stationary.front()};
  } else {
    fail(ErrorCode::NumericFailure, "gain_maxima: no stationary point found");
  }

  const auto mag = [&tf](double omega) { return std::abs(eval_H(tf, omega)); };
  std::vector<double> maxima;
  for (std::size_t i = 0; i < maxima_y.size(); ++i) {
    const double w = w0 * std::sqrt(maxima_y[i]);
    double lo = 0.8 * w;
    double hi = 1.25 * w;
    if (maxima_y.size() == 2) {
      const double w_min = w0 * std::sqrt(stationary[1]);
      if (i == 0) hi = std::min(hi, w_min);
      else lo = std::max(lo, w_min);
    }
    maxima.push_back(golden_max(mag, lo, hi));
  }
  return maxima;
}

PeakAnalysis peak_frequencies_exact(const TransferFunction& tf) {
  PeakAnalysis pa;
  const double f0 = tf.omega0() / kTwoPi;
  const std::vector<double> maxima = gain_maxima(tf);
  const auto real_roots = real_gain_frequencies(tf);

  pa.split = maxima.size() == 2 && real_roots.has_value();
  if (pa.split) {
    pa.f_minus = real_roots->first / kTwoPi;
    pa.f_plus = real_roots->second / kTwoPi;
    pa.f_max_minus = maxima[0] / kTwoPi;
    pa.f_max_plus = maxima[1] / kTwoPi;
  } else {
    pa.f_minus = f0;
    pa.f_plus = f0;
    const double fmax = maxima.empty() ? f0 : maxima[0] / kTwoPi;
    pa.f_max_minus = fmax;
    pa.f_max_plus = fmax;
  }
  const cdouble hm = eval_H(tf, kTwoPi * pa.f_minus);
  const cdouble hp = eval_H(tf, kTwoPi * pa.f_plus);
  pa.mag_minus = std::abs(hm);
  pa.mag_plus = std::abs(hp);
  pa.phase_minus = normalized_phase(hm);
  pa.phase_plus = normalized_phase(hp);
  return pa;
}

PeakAnalysis analyze_peaks(const CircuitParams& p) {
  PeakAnalysis pa = peak_frequencies_exact(derive_transfer_function(p));
  try {
    pa.k_split = find_k_split(p.components());
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NoSplitInRange) throw;
  }
  return pa;
}

std::pair<double, double> peak_frequencies_approx(double k, double f0) {
  if (!(k >= 0.0 && k < 1.0))
    fail(ErrorCode::DomainError, "peak_frequencies_approx: need 0 <= k < 1");
  return {f0 / std::sqrt(1.0 + k), f0 / std::sqrt(1.0 - k)};
}

double coupling_from_peaks(double f_minus, double f_plus) {
  if (!(f_minus > 0.0 && f_minus <= f_plus))
    fail(ErrorCode::InvalidArgument, "coupling_from_peaks: need 0 < f- <= f+");
  const double a = f_plus * f_plus;
  const double b = f_minus * f_minus;
  return (a - b) / (a + b);
}

double peak_ratio(double k) {
  if (!(k >= 0.0 && k < 1.0))
    fail(ErrorCode::DomainError, "peak_ratio: need 0 <= k < 1");
  return std::sqrt((1.0 + k) / (1.0 - k));
}

std::vector<double> orthogonal_couplings(int n) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "orthogonal_couplings: n >= 1");
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(n));
  for (int m = 2; m < n + 2; ++m) {
    const double m2 = static_cast<double>(m) * m;
    out.push_back((m2 - 1.0) / (m2 + 1.0));
  }
  return out;
}

SteadyState solve_steady_state(const CircuitParams& p, double omega, cdouble V1) {
  if (!(omega > 0.0))
    fail(ErrorCode::InvalidArgument, "solve_steady_state: omega must be > 0");
  const Components& c = p.components();
  const cdouble s(0.0, omega);
  const cdouble Z11 = p.source_loop_resistance() + c.L1 * s + 1.0 / (c.C1 * s);
  const cdouble Z22 = p.load_loop_resistance() + c.L2 * s + 1.0 / (c.C2 * s);
  const cdouble Zm = p.M() * s;

  const cdouble det = Z11 * Z22 - Zm * Zm;
  const double scale = std::abs(Z11) * std::abs(Z22) + std::norm(Zm);
  if (!(std::abs(det) > 1e-13 * scale))
    fail(ErrorCode::SingularSystem, "solve_steady_state: singular mesh system");

  SteadyState ss;
  ss.omega = omega;
  ss.V1 = V1;
  ss.I1 = V1 * Z22 / det;
  ss.I2 = V1 * Zm / det;
  ss.V2 = c.RL * ss.I2;
  ss.P1 = (V1 * std::conj(ss.I1)).real();
  ss.P2 = std::norm(ss.V2) / c.RL;
  ss.eta = ss.P1 > 0.0 ? ss.P2 / ss.P1 : 0.0;
  ss.Z1 = V1 / ss.I1;
  return ss;
}

std::vector<EfficiencyPoint> efficiency_curve(const CircuitParams& p,
                                              std::span<const double> omega_grid) {
  std::vector<EfficiencyPoint> out;
  out.reserve(omega_grid.size());
  double prev = 0.0;
  for (double w : omega_grid) {
    if (!(w > prev))
      fail(ErrorCode::InvalidArgument,
           "efficiency_curve: grid must be positive and strictly increasing");
    prev = w;
    out.push_back({w, solve_steady_state(p, w).eta});
  }
  return out;
}

double find_k_split(const Components& c, double tol) {
  const auto split_at = [&c](double k) {
    const TransferFunction tf = derive_transfer_function(CircuitParams(c, k));
    return gain_maxima(tf).size() == 2;
  };
  double lo = 0.0;
  double hi = kMaxCoupling;
  if (!split_at(hi))
    fail(ErrorCode::NoSplitInRange,
         "find_k_split: |H| has a single maximum for every k <= 0.999");
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    (split_at(mid) ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace swipt
