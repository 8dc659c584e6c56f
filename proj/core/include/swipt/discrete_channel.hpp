#pragma once

// Sampled impulse response, the equivalent FIR channel and the composite
// noise model n = sigma1 * (h * n1) / ||h|| + sigma2 * n2.

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swipt/circuit_model.hpp"

namespace swipt {

/// Samples h(l Ts) of the continuous impulse response. h jumps at t = 0, so
/// samples[0] holds the right-hand limit h(0+).
struct ImpulseResponse {
  std::vector<double> samples;  // 1/s
  double Ts = 0.0;
  /// Time after which the response stays below 1% of its peak magnitude.
  double T_eff = 0.0;
  double peak = 0.0;
};

/// Envelope threshold (fraction of peak) that defines T_eff.
inline constexpr double kEffectiveDurationLevel = 0.01;

/// Residues of H at the two upper-half-plane poles; h(t) = 2 Re sum r_i e^{s_i t}.
std::array<cdouble, 2> pole_residues(const TransferFunction& tf, const PolePairs& poles);

/// Closed-form route. RepeatedPoles if the two pairs are closer than
/// 1e-6 * omega0; DomainError if duration is shorter than T_eff.
ImpulseResponse impulse_response_partial_fractions(const PolePairs& poles,
                                                   const TransferFunction& tf,
                                                   double Ts, double duration);

/// Numerical route: the 1/s and 1/s^2 asymptotes of H are inverted in closed
/// form and the remainder by an inverse DFT of its sampled spectrum.
/// AliasingRisk if the remainder at Nyquist exceeds 1e-3 of the peak gain.
ImpulseResponse impulse_response_idft(const TransferFunction& tf, double Ts,
                                      double duration);

/// Picks the partial-fraction route and falls back to the IDFT route for
/// (near-)repeated poles.
ImpulseResponse impulse_response(const TransferFunction& tf, double Ts, double duration);

/// H(z) = num(z^-1) / den(z^-1), coefficients in ascending powers of z^-1,
/// den[0] == 1.
struct DiscreteTransferFunction {
  std::vector<double> num;
  std::vector<double> den;
  double Ts = 0.0;
};

/// s = c (z-1)/(z+1) with c = 2/Ts, or c = w/tan(w Ts/2) when prewarping at w.
DiscreteTransferFunction bilinear_discretize(const TransferFunction& tf, double Ts,
                                             std::optional<double> prewarp_omega = {});

/// H(e^{j theta}).
cdouble eval_Hz(const DiscreteTransferFunction& hz, double theta);

struct FirChannel {
  std::vector<double> taps;  // dimensionless, h_0 .. h_{L_h}
  int J = 1;                 // samples per symbol
  double Ts = 0.0;

  std::size_t memory() const { return taps.empty() ? 0 : taps.size() - 1; }
  double energy() const;
};

inline constexpr double kDefaultTailEnergy = 1e-4;

/// Impulse response of the recursion, truncated once the tail energy drops
/// below energy_tol of the total. UnstableDiscretization for |pole| >= 1.
FirChannel fir_taps(const DiscreteTransferFunction& hz,
                    double energy_tol = kDefaultTailEnergy, int J = 1);

/// Trapezoidal taps Ts*h(l Ts), with the l = 0 tap halved because h jumps
/// there. Truncated like fir_taps.
FirChannel fir_from_impulse_response(const ImpulseResponse& ir,
                                     double energy_tol = kDefaultTailEnergy, int J = 1);

/// sum_l taps[l] e^{-j theta l}.
cdouble fir_response(const FirChannel& ch, double theta);

struct NoiseModel {
  double sigma1 = 0.0;  // primary side, shaped by the channel
  double sigma2 = 0.0;  // secondary side, white
};

/// Direct-form convolution y = h * x (same length as the output grid) plus
/// noise. With upsample set, x holds one value per symbol and J-1 zeros are
/// inserted after each. Deterministic in seed.
std::vector<double> apply_channel(std::span<const double> x, const FirChannel& ch,
                                  const NoiseModel& nm, std::uint64_t seed,
                                  bool upsample = false);

/// Exact recursive form of the trapezoidal taps (no truncation): one
/// first-order complex recursion per pole pair plus a direct term.
class ModalChannel {
 public:
  struct State {
    std::array<cdouble, 2> y{};
  };

  ModalChannel(const TransferFunction& tf, double Ts);
  /// Identity channel.
  static ModalChannel flat();

  void filter(std::span<const double> x, std::span<double> out, State& state) const;
  std::vector<double> filter(std::span<const double> x) const;

  /// Gain of the sampled channel at physical frequency f (Hz).
  cdouble response(double f) const;
  /// sum of squared taps (infinite sum, closed form).
  double energy() const;
  double Ts() const { return Ts_; }
  bool is_flat() const { return modes_ == 0; }

 private:
  ModalChannel() = default;
  int modes_ = 0;
  std::array<cdouble, 2> p_{};
  std::array<cdouble, 2> c_{};
  double direct_ = 1.0;
  double Ts_ = 0.0;
};

/// Columns l, t_seconds, h_l.
void write_taps_csv(std::ostream& os, const FirChannel& ch);

}  // namespace swipt
