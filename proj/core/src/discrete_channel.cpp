#include "swipt/discrete_channel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "swipt/error.hpp"
#include "swipt/polynomial.hpp"
#include "swipt/rng.hpp"
#include "swipt/spectrum.hpp"

namespace swipt {

namespace {

constexpr double kRepeatedPoleTol = 1e-6;
constexpr double kAliasingTol = 1e-3;

double peak_gain(const TransferFunction& tf) {
  double peak = 0.0;
  for (double w : gain_maxima(tf)) peak = std::max(peak, std::abs(eval_H(tf, w)));
  return peak;
}

double sample_peak(std::span<const double> h) {
  double peak = 0.0;
  for (double v : h) peak = std::max(peak, std::abs(v));
  return peak;
}

// Last time |h| exceeds level * peak, for responses without a known envelope.
double last_exceedance(std::span<const double> h, double Ts, double peak) {
  const double level = kEffectiveDurationLevel * peak;
  for (std::size_t l = h.size(); l-- > 0;)
    if (std::abs(h[l]) > level) return static_cast<double>(l + 1) * Ts;
  return 0.0;
}

std::size_t truncation_length(std::span<const double> taps, double energy_tol) {
  const double total = std::inner_product(taps.begin(), taps.end(), taps.begin(), 0.0);
  if (total == 0.0) return 1;
  double tail = 0.0;
  std::size_t keep = taps.size();
  // Drop taps from the end while the dropped energy stays below tolerance.
  while (keep > 1) {
    const double next = tail + taps[keep - 1] * taps[keep - 1];
    if (next >= energy_tol * total) break;
    tail = next;
    --keep;
  }
  return keep;
}

// Ascending-power polynomial helpers for the bilinear substitution.
std::vector<double> binomial_product(int minus_power, int plus_power) {
  // (1 - x)^m (1 + x)^p in ascending powers of x.
  std::vector<double> out{1.0};
  const std::vector<double> minus{1.0, -1.0};
  const std::vector<double> plus{1.0, 1.0};
  for (int i = 0; i < minus_power; ++i) out = poly_multiply(out, minus);
  for (int i = 0; i < plus_power; ++i) out = poly_multiply(out, plus);
  return out;
}

}  // namespace

std::array<cdouble, 2> pole_residues(const TransferFunction& tf, const PolePairs& poles) {
  const auto den = tf.denominator();
  const auto num = tf.numerator();
  std::array<cdouble, 2> r{};
  const std::array<cdouble, 2> s{poles.first, poles.second};
  for (int i = 0; i < 2; ++i)
    r[i] = poly_eval(std::span<const double>(num), s[i]) /
           poly_derivative_eval(std::span<const double>(den), s[i]);
  return r;
}

ImpulseResponse impulse_response_partial_fractions(const PolePairs& poles,
                                                   const TransferFunction& tf,
                                                   double Ts, double duration) {
  if (!(Ts > 0.0) || !(duration > 0.0))
    fail(ErrorCode::InvalidArgument, "Ts and duration must be positive");
  const std::size_t n = static_cast<std::size_t>(std::ceil(duration / Ts)) + 1;
  ImpulseResponse ir;
  ir.Ts = Ts;
  ir.samples.assign(n, 0.0);
  if (tf.a3 == 0.0) return ir;

  if (std::abs(poles.first - poles.second) < kRepeatedPoleTol * tf.omega0())
    fail(ErrorCode::RepeatedPoles, "pole pairs coincide; use the IDFT route");

  const auto r = pole_residues(tf, poles);
  const std::array<cdouble, 2> s{poles.first, poles.second};
  // Rotate e^{s Ts} incrementally, re-anchoring every block to bound drift.
  const std::array<cdouble, 2> step{std::exp(s[0] * Ts), std::exp(s[1] * Ts)};
  constexpr std::size_t kAnchor = 1024;
  std::array<cdouble, 2> z{};
  for (std::size_t l = 0; l < n; ++l) {
    if (l % kAnchor == 0)
      for (int i = 0; i < 2; ++i) z[i] = std::exp(s[i] * (static_cast<double>(l) * Ts));
    ir.samples[l] = 2.0 * (r[0] * z[0] + r[1] * z[1]).real();
    z[0] *= step[0];
    z[1] *= step[1];
  }
  ir.peak = sample_peak(ir.samples);

  // The envelope 2 sum |r_i| e^{sigma_i t} is monotone, so bisect for the
  // crossing of the threshold.
  const auto envelope = [&](double t) {
    return 2.0 * (std::abs(r[0]) * std::exp(s[0].real() * t) +
                  std::abs(r[1]) * std::exp(s[1].real() * t));
  };
  const double level = kEffectiveDurationLevel * ir.peak;
  double lo = 0.0;
  double hi = 1.0 / std::min(-s[0].real(), -s[1].real());
  while (envelope(hi) > level) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    const double mid = 0.5 * (lo + hi);
    (envelope(mid) > level ? lo : hi) = mid;
  }
  ir.T_eff = hi;
  if (duration < ir.T_eff)
    fail(ErrorCode::DomainError, "duration shorter than the effective response length");
  return ir;
}

ImpulseResponse impulse_response_idft(const TransferFunction& tf, double Ts,
                                      double duration) {
  if (!(Ts > 0.0) || !(duration > 0.0))
    fail(ErrorCode::InvalidArgument, "Ts and duration must be positive");
  const std::size_t n = static_cast<std::size_t>(std::ceil(duration / Ts)) + 1;
  ImpulseResponse ir;
  ir.Ts = Ts;
  ir.samples.assign(n, 0.0);
  if (tf.a3 == 0.0) return ir;

  // H(s) = c1/s + d2/s^2 + O(s^-3) at infinity. Subtract
  // c1/(s+a) + c2/(s+a)^2, which has the same two leading terms and the
  // closed-form inverse c1 e^{-at} + c2 t e^{-at}.
  const double alpha = tf.omega0();
  const double c1 = tf.a3 / tf.b4;
  const double d2 = -tf.a3 * tf.b3 / (tf.b4 * tf.b4);
  const double c2 = d2 + c1 * alpha;
  const auto remainder = [&](double omega) {
    const cdouble s(0.0, omega);
    return eval_H(tf, omega) - c1 / (s + alpha) - c2 / ((s + alpha) * (s + alpha));
  };

  const double nyquist = kPi / Ts;
  const double peak_H = peak_gain(tf);
  if (std::abs(remainder(nyquist)) > kAliasingTol * peak_H)
    fail(ErrorCode::AliasingRisk, "sample rate too low for the IDFT route");

  // Twice the requested span keeps circular wrap-around out of the window.
  std::size_t N = 1024;
  while (N < 2 * n) N <<= 1;
  std::vector<cdouble> spectrum(N);
  const double dw = kTwoPi / (static_cast<double>(N) * Ts);
  for (std::size_t k = 0; k < N; ++k) {
    const double idx = k <= N / 2 ? static_cast<double>(k)
                                  : static_cast<double>(k) - static_cast<double>(N);
    spectrum[k] = remainder(idx * dw);
  }
  // Keep the Nyquist bin real so the inverse is real.
  spectrum[N / 2] = spectrum[N / 2].real();
  const auto rem = idft(spectrum);
  for (std::size_t l = 0; l < n; ++l) {
    const double t = static_cast<double>(l) * Ts;
    const double e = std::exp(-alpha * t);
    ir.samples[l] = rem[l].real() / Ts + c1 * e + c2 * t * e;
  }
  ir.peak = sample_peak(ir.samples);
  ir.T_eff = last_exceedance(ir.samples, Ts, ir.peak);
  return ir;
}

ImpulseResponse impulse_response(const TransferFunction& tf, double Ts, double duration) {
  if (tf.a3 == 0.0) return impulse_response_idft(tf, Ts, duration);
  try {
    return impulse_response_partial_fractions(find_poles(tf), tf, Ts, duration);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::RepeatedPoles) throw;
  }
  return impulse_response_idft(tf, Ts, duration);
}

DiscreteTransferFunction bilinear_discretize(const TransferFunction& tf, double Ts,
                                             std::optional<double> prewarp_omega) {
  if (!(Ts > 0.0)) fail(ErrorCode::InvalidArgument, "Ts must be positive");
  double c = 2.0 / Ts;
  if (prewarp_omega) {
    const double w = *prewarp_omega;
    if (!(w > 0.0) || w * Ts >= kPi)
      fail(ErrorCode::InvalidArgument, "prewarp frequency must lie in (0, Nyquist)");
    c = w / std::tan(0.5 * w * Ts);
  }
  // Coefficients of s^i, i = 0..4.
  const std::array<double, 5> a{0.0, 0.0, 0.0, tf.a3, 0.0};
  const std::array<double, 5> b{tf.b0, tf.b1, tf.b2, tf.b3, tf.b4};
  DiscreteTransferFunction hz;
  hz.Ts = Ts;
  hz.num.assign(5, 0.0);
  hz.den.assign(5, 0.0);
  double ci = 1.0;
  for (int i = 0; i <= 4; ++i) {
    const auto basis = binomial_product(i, 4 - i);
    for (int m = 0; m <= 4; ++m) {
      hz.num[m] += a[i] * ci * basis[m];
      hz.den[m] += b[i] * ci * basis[m];
    }
    ci *= c;
  }
  const double lead = hz.den[0];
  for (auto& v : hz.num) v /= lead;
  for (auto& v : hz.den) v /= lead;
  return hz;
}

cdouble eval_Hz(const DiscreteTransferFunction& hz, double theta) {
  const cdouble zinv = std::polar(1.0, -theta);
  const auto horner = [&](const std::vector<double>& c) {
    cdouble acc{};
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * zinv + c[i];
    return acc;
  };
  return horner(hz.num) / horner(hz.den);
}

double FirChannel::energy() const {
  return std::inner_product(taps.begin(), taps.end(), taps.begin(), 0.0);
}

FirChannel fir_taps(const DiscreteTransferFunction& hz, double energy_tol, int J) {
  if (hz.den.empty() || hz.den[0] == 0.0)
    fail(ErrorCode::InvalidArgument, "denominator must have a nonzero leading term");
  // Poles in z are the roots of den read as a polynomial in z (highest first).
  double rmax = 0.0;
  if (hz.den.size() > 1) {
    for (const cdouble& p : poly_roots(std::span<const double>(hz.den)))
      rmax = std::max(rmax, std::abs(p));
  }
  if (rmax >= 1.0) fail(ErrorCode::UnstableDiscretization, "H(z) has a pole on or outside the unit circle");

  // Run long enough for the slowest mode to decay by 1e-12.
  const std::size_t n = rmax == 0.0
                            ? hz.num.size()
                            : std::min<std::size_t>(
                                  static_cast<std::size_t>(std::log(1e-12) / std::log(rmax)) +
                                      hz.num.size() + 1,
                                  50'000'000);
  std::vector<double> h(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = k < hz.num.size() ? hz.num[k] : 0.0;
    for (std::size_t i = 1; i < hz.den.size() && i <= k; ++i) acc -= hz.den[i] * h[k - i];
    h[k] = acc;
  }
  h.resize(truncation_length(h, energy_tol));
  return {std::move(h), J, hz.Ts};
}

FirChannel fir_from_impulse_response(const ImpulseResponse& ir, double energy_tol, int J) {
  std::vector<double> taps(ir.samples.size());
  for (std::size_t l = 0; l < taps.size(); ++l) taps[l] = ir.Ts * ir.samples[l];
  if (!taps.empty()) taps[0] *= 0.5;
  taps.resize(truncation_length(taps, energy_tol));
  return {std::move(taps), J, ir.Ts};
}

cdouble fir_response(const FirChannel& ch, double theta) {
  cdouble acc{};
  const cdouble step = std::polar(1.0, -theta);
  cdouble z = 1.0;
  for (double t : ch.taps) {
    acc += t * z;
    z *= step;
  }
  return acc;
}

std::vector<double> apply_channel(std::span<const double> x, const FirChannel& ch,
                                  const NoiseModel& nm, std::uint64_t seed, bool upsample) {
  std::vector<double> input;
  if (upsample) {
    input.assign(x.size() * static_cast<std::size_t>(ch.J), 0.0);
    for (std::size_t i = 0; i < x.size(); ++i) input[i * static_cast<std::size_t>(ch.J)] = x[i];
  } else {
    input.assign(x.begin(), x.end());
  }
  const std::size_t n = input.size();
  const std::size_t L = ch.taps.size();
  std::vector<double> y(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    const std::size_t lmax = std::min(L, k + 1);
    for (std::size_t l = 0; l < lmax; ++l) acc += ch.taps[l] * input[k - l];
    y[k] = acc;
  }

  if (nm.sigma1 != 0.0 && L > 0) {
    // Prepend L-1 samples so the shaped noise is stationary from k = 0.
    Rng rng(derive_seed(seed, 1));
    std::vector<double> n1(n + L - 1);
    fill_gaussian(rng, n1);
    const double scale = nm.sigma1 / std::sqrt(ch.energy());
    for (std::size_t k = 0; k < n; ++k) {
      double acc = 0.0;
      for (std::size_t l = 0; l < L; ++l) acc += ch.taps[l] * n1[k + L - 1 - l];
      y[k] += scale * acc;
    }
  }
  if (nm.sigma2 != 0.0) {
    Rng rng(derive_seed(seed, 2));
    add_gaussian(rng, y, nm.sigma2);
  }
  return y;
}

ModalChannel::ModalChannel(const TransferFunction& tf, double Ts) : Ts_(Ts) {
  if (!(Ts > 0.0)) fail(ErrorCode::InvalidArgument, "Ts must be positive");
  direct_ = 0.0;
  if (tf.a3 == 0.0) return;
  const PolePairs poles = find_poles(tf);
  if (std::abs(poles.first - poles.second) < kRepeatedPoleTol * tf.omega0())
    fail(ErrorCode::RepeatedPoles, "modal channel needs distinct poles");
  const auto r = pole_residues(tf, poles);
  modes_ = 2;
  p_ = {std::exp(poles.first * Ts), std::exp(poles.second * Ts)};
  c_ = {Ts * r[0], Ts * r[1]};
  // The modal sum gives Ts*h(0+) at l = 0; the trapezoidal tap is half that.
  direct_ = -0.5 * 2.0 * (c_[0] + c_[1]).real();
}

ModalChannel ModalChannel::flat() {
  ModalChannel ch;
  ch.direct_ = 1.0;
  return ch;
}

void ModalChannel::filter(std::span<const double> x, std::span<double> out,
                          State& state) const {
  if (out.size() != x.size()) fail(ErrorCode::LengthMismatch, "output span size differs from input");
  if (modes_ == 0) {
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = direct_ * x[k];
    return;
  }
  cdouble y0 = state.y[0];
  cdouble y1 = state.y[1];
  const cdouble p0 = p_[0], p1 = p_[1];
  const cdouble c0 = 2.0 * c_[0], c1 = 2.0 * c_[1];
  for (std::size_t k = 0; k < x.size(); ++k) {
    y0 = p0 * y0 + x[k];
    y1 = p1 * y1 + x[k];
    out[k] = (c0 * y0).real() + (c1 * y1).real() + direct_ * x[k];
  }
  state.y = {y0, y1};
}

std::vector<double> ModalChannel::filter(std::span<const double> x) const {
  std::vector<double> out(x.size());
  State st;
  filter(x, out, st);
  return out;
}

cdouble ModalChannel::response(double f) const {
  const cdouble zinv = std::polar(1.0, -kTwoPi * f * (modes_ == 0 ? 0.0 : Ts_));
  cdouble acc = direct_;
  for (int i = 0; i < modes_; ++i) {
    acc += c_[i] / (1.0 - p_[i] * zinv);
    acc += std::conj(c_[i]) / (1.0 - std::conj(p_[i]) * zinv);
  }
  return acc;
}

double ModalChannel::energy() const {
  if (modes_ == 0) return direct_ * direct_;
  // taps_l = sum_m a_m q_m^l for l >= 1, over the four conjugate terms.
  const std::array<cdouble, 4> a{c_[0], std::conj(c_[0]), c_[1], std::conj(c_[1])};
  const std::array<cdouble, 4> q{p_[0], std::conj(p_[0]), p_[1], std::conj(p_[1])};
  cdouble total{};
  for (int m = 0; m < 4; ++m)
    for (int n = 0; n < 4; ++n) total += a[m] * a[n] / (1.0 - q[m] * q[n]);
  const double modal0 = (a[0] + a[1] + a[2] + a[3]).real();
  const double tap0 = modal0 + direct_;
  return total.real() - modal0 * modal0 + tap0 * tap0;
}

void write_taps_csv(std::ostream& os, const FirChannel& ch) {
  os << "l,t_seconds,h_l\n";
  os.precision(17);
  for (std::size_t l = 0; l < ch.taps.size(); ++l)
    os << l << ',' << static_cast<double>(l) * ch.Ts << ',' << ch.taps[l] << '\n';
}

}  // namespace swipt
