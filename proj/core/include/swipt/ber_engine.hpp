#pragma once

// Monte Carlo bit-error-rate estimation over the sampled link.
//
// Es is the noiseless received power over the useful windows times Tu.
// Receiver-side noise is white with N0 = 2 sigma2^2 / fs. Transmitter-side
// noise reaches the receiver shaped by the channel, sigma1 (h*n1)/||h||, and
// is calibrated so the correlators see the same noise power: N0 is scaled by
// the channel's energy gain on the windowed tone templates.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "swipt/circuit_model.hpp"
#include "swipt/discrete_channel.hpp"
#include "swipt/modem.hpp"

namespace swipt {

enum class NoiseSide { Receiver, Transmitter, Mixed };
enum class ReceiverKind { Coherent, Noncoherent };

std::string_view to_string(NoiseSide side);
NoiseSide noise_side_from_string(std::string_view s);
std::string_view to_string(ReceiverKind r);
ReceiverKind receiver_kind_from_string(std::string_view s);

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// Wilson score interval, 95% by default.
Interval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z = 1.959963984540054);

struct LinkSetup {
  TransferFunction channel;
  ModemConfig modem;
  ReceiverKind receiver = ReceiverKind::Coherent;
  NoiseSide side = NoiseSide::Receiver;
  /// Share of N0 contributed by the transmitter side when side == Mixed.
  double transmitter_share = 0.5;
  /// Quantise the received samples to 8 bits before detection.
  bool quantize = false;
  /// Ignore `channel` and use h = delta (pure AWGN calibration).
  bool flat_channel = false;
  /// Coherent receiver only: integrate over [Tg + d, T + d) with d in
  /// samples, references rotated to match. 0 keeps transmitter timing.
  int timing_offset = 0;
};

/// Mean group delay of H at the two tones, rounded to samples at fs.
int group_delay_samples(const TransferFunction& tf, double f_minus, double f_plus, double fs);

struct StopRule {
  std::uint64_t target_errors = 100;
  std::uint64_t max_bits = 1'000'000;
  int chunk_bits = 2000;
  int threads = 0;  // 0: hardware concurrency
};

struct BerPoint {
  double es_n0_db = 0.0;
  std::uint64_t bits = 0;
  std::uint64_t errors = 0;
  double ber = 0.0;
  Interval ci;
  double theory = 0.0;
  bool reached_target = false;
};

struct NoiseMeasurement {
  double var_minus = 0.0;  // correlator output variance, f- branch
  double var_plus = 0.0;
  double var_difference = 0.0;
  std::uint64_t symbols = 0;
};

class LinkSimulator {
 public:
  explicit LinkSimulator(const LinkSetup& setup);

  const LinkSetup& setup() const { return setup_; }
  /// Noiseless mean r^2 over the useful windows.
  double received_power() const { return p_rx_; }
  double es() const { return p_rx_ * setup_.modem.Tu(); }
  double sigma_receiver(double es_n0_db) const;
  double sigma_transmitter(double es_n0_db) const;
  /// Mean energy gain of the channel on the sine and cosine templates of
  /// both tones; tends to the mean |H|^2 at the tones for long windows.
  double template_gain() const { return tone_gain_; }
  /// Number of leading symbols per chunk that only warm up the channel.
  int warmup_symbols() const { return warmup_; }

  /// Bits are drawn from (seed, chunk); noise from (seed, point, chunk).
  BerPoint run(double es_n0_db, const StopRule& stop, std::uint64_t seed,
               std::uint64_t point = 0) const;

  /// Correlator outputs for noise alone (coherent receiver templates).
  NoiseMeasurement measure_correlator_noise(double es_n0_db, std::uint64_t symbols,
                                            std::uint64_t seed) const;

 private:
  struct ChunkResult {
    std::uint64_t bits = 0;
    std::uint64_t errors = 0;
  };
  ChunkResult run_chunk(std::uint64_t chunk, std::size_t chunk_bits, double sigma1,
                        double sigma2, std::uint64_t seed, std::uint64_t point) const;
  std::vector<double> noise(std::size_t n, double sigma1, double sigma2,
                            std::uint64_t stream) const;
  std::pair<double, double> sigmas(double es_n0_db) const;

  LinkSetup setup_;
  ModalChannel channel_;
  Correlator correlator_;
  std::optional<FilterBank> filterbank_;
  double p_rx_ = 0.0;
  double peak_rx_ = 0.0;
  double tone_gain_ = 0.0;  // |H|^2 seen through the correlator windows
  int warmup_ = 1;
};

/// Q^-1(p) = sqrt(2) erfc^-1(2 p).
double q_inverse(double p);

struct Extrapolation {
  double es_n0_db = 0.0;  // required Es/N0 at the target BER
  double gain = 0.0;      // fitted g in Pb = Q(sqrt(g Es/N0))
  int points_used = 0;
};

/// Fits Pb = Q(sqrt(g gamma)) to the highest-SNR points that have at least
/// `min_errors` errors (up to three) and solves for `target`.
/// NumericFailure if no point qualifies.
Extrapolation extrapolate_required_snr(const std::vector<BerPoint>& curve, double target = 1e-6,
                                       std::uint64_t min_errors = 20);

}  // namespace swipt
