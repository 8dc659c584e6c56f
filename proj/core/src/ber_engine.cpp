#include "swipt/ber_engine.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <future>
#include <string>
#include <thread>

#include <boost/math/special_functions/erf.hpp>

#include "swipt/error.hpp"
#include "swipt/rng.hpp"

namespace swipt {

namespace {

constexpr int kBatchChunks = 8;
constexpr double kWarmupSeconds = 30e-6;
constexpr std::uint64_t kCalibrationSeed = 0x5eedca1bu;
constexpr int kCalibrationBits = 2000;
constexpr double kTemplateTailSeconds = 200e-6;

std::string lower(std::string_view s) {
  std::string v(s);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  return v;
}

std::vector<std::uint8_t> draw_bits(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  std::vector<std::uint8_t> b(n);
  for (std::size_t i = 0; i < n; i += 64) {
    std::uint64_t word = rng();
    for (std::size_t j = i; j < std::min(n, i + 64); ++j, word >>= 1) b[j] = word & 1u;
  }
  return b;
}

double mean_square_useful(const std::vector<double>& y, const ModemConfig& cfg, int skip) {
  const auto n = static_cast<std::size_t>(cfg.samples_per_symbol);
  const auto ng = static_cast<std::size_t>(cfg.guard_samples);
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t k = static_cast<std::size_t>(skip); (k + 1) * n <= y.size(); ++k)
    for (std::size_t i = k * n + ng; i < (k + 1) * n; ++i) {
      acc += y[i] * y[i];
      ++count;
    }
  return count ? acc / static_cast<double>(count) : 0.0;
}

// Energy of h * t over energy of t, averaged over the four templates. The
// zero padding lets the channel ring out to a negligible tail.
double windowed_gain(const ModalChannel& ch, const ModemConfig& cfg) {
  if (ch.is_flat()) return 1.0;
  const int nu = cfg.useful_samples();
  const auto pad = static_cast<std::size_t>(std::ceil(kTemplateTailSeconds * cfg.fs));
  double in = 0.0, out = 0.0;
  for (double f : {cfg.f_minus, cfg.f_plus})
    for (double offset : {0.0, 0.25 * kTwoPi}) {
      std::vector<double> t(static_cast<std::size_t>(nu) + pad, 0.0);
      for (int i = 0; i < nu; ++i) {
        t[static_cast<std::size_t>(i)] = std::sin(kTwoPi * f * i / cfg.fs + offset);
        in += t[static_cast<std::size_t>(i)] * t[static_cast<std::size_t>(i)];
      }
      for (double v : ch.filter(t)) out += v * v;
    }
  return out / in;
}

}  // namespace

std::string_view to_string(NoiseSide side) {
  switch (side) {
    case NoiseSide::Receiver: return "receiver";
    case NoiseSide::Transmitter: return "transmitter";
    case NoiseSide::Mixed: return "mixed";
  }
  return "unknown";
}

NoiseSide noise_side_from_string(std::string_view s) {
  const std::string v = lower(s);
  if (v == "receiver" || v == "sigma2") return NoiseSide::Receiver;
  if (v == "transmitter" || v == "sigma1") return NoiseSide::Transmitter;
  if (v == "mixed") return NoiseSide::Mixed;
  fail(ErrorCode::ConfigError, "unknown noise side '" + v + "'");
}

std::string_view to_string(ReceiverKind r) {
  return r == ReceiverKind::Coherent ? "coherent" : "noncoherent";
}

ReceiverKind receiver_kind_from_string(std::string_view s) {
  const std::string v = lower(s);
  if (v == "coherent") return ReceiverKind::Coherent;
  if (v == "noncoherent") return ReceiverKind::Noncoherent;
  fail(ErrorCode::ConfigError, "unknown receiver '" + v + "'");
}

Interval wilson_interval(std::uint64_t errors, std::uint64_t trials, double z) {
  if (trials == 0) return {0.0, 1.0};
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(errors) / n;
  const double z2 = z * z;
  const double den = 1.0 + z2 / n;
  const double centre = (p + z2 / (2.0 * n)) / den;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / den;
  return {errors == 0 ? 0.0 : std::max(0.0, centre - half),
          errors == trials ? 1.0 : std::min(1.0, centre + half)};
}

LinkSimulator::LinkSimulator(const LinkSetup& setup)
    : setup_(setup),
      channel_(setup.flat_channel ? ModalChannel::flat()
                                  : ModalChannel(setup.channel, 1.0 / setup.modem.fs)),
      correlator_(setup.modem,
                  std::arg(channel_.response(setup.modem.f_minus)) +
                      kTwoPi * setup.modem.f_minus * setup.timing_offset / setup.modem.fs,
                  std::arg(channel_.response(setup.modem.f_plus)) +
                      kTwoPi * setup.modem.f_plus * setup.timing_offset / setup.modem.fs) {
  const ModemConfig& cfg = setup_.modem;
  if (setup_.timing_offset < 0 || setup_.timing_offset >= cfg.samples_per_symbol)
    fail(ErrorCode::ConfigError, "timing offset must lie in [0, N)");
  if (setup_.timing_offset > 0 && setup_.receiver != ReceiverKind::Coherent)
    fail(ErrorCode::ConfigError, "timing offset applies to the coherent receiver only");
  if (!(setup_.transmitter_share >= 0.0 && setup_.transmitter_share <= 1.0))
    fail(ErrorCode::ConfigError, "transmitter noise share must be in [0, 1]");
  warmup_ = std::max(1, static_cast<int>(std::ceil(kWarmupSeconds / cfg.T())));
  if (setup_.receiver == ReceiverKind::Noncoherent) {
    FilterBankSpecs specs;
    specs.fs = cfg.fs;
    specs.f0 = setup_.flat_channel ? specs.f0 : setup_.channel.omega0() / kTwoPi;
    filterbank_ = design_filterbank(specs);
  }
  const auto bits = draw_bits(kCalibrationSeed, static_cast<std::size_t>(kCalibrationBits + warmup_));
  const auto y = channel_.filter(transmit(bits, cfg));
  p_rx_ = mean_square_useful(y, cfg, warmup_);
  for (double v : y) peak_rx_ = std::max(peak_rx_, std::abs(v));
  tone_gain_ = windowed_gain(channel_, cfg);
  if (!(p_rx_ > 0.0)) fail(ErrorCode::NumericFailure, "link delivers no power at the tones");
}

std::pair<double, double> LinkSimulator::sigmas(double es_n0_db) const {
  if (std::isinf(es_n0_db) && es_n0_db > 0) return {0.0, 0.0};
  const double n0 = es() / std::pow(10.0, es_n0_db / 10.0);
  double share = 0.0;
  if (setup_.side == NoiseSide::Transmitter) share = 1.0;
  if (setup_.side == NoiseSide::Mixed) share = setup_.transmitter_share;
  const double fs = setup_.modem.fs;
  const double s2 = std::sqrt((1.0 - share) * n0 * fs / 2.0);
  const double s1 = std::sqrt(share * n0 * fs * channel_.energy() / (2.0 * tone_gain_));
  return {s1, s2};
}

double LinkSimulator::sigma_receiver(double es_n0_db) const { return sigmas(es_n0_db).second; }
double LinkSimulator::sigma_transmitter(double es_n0_db) const { return sigmas(es_n0_db).first; }

std::vector<double> LinkSimulator::noise(std::size_t n, double sigma1, double sigma2,
                                         std::uint64_t stream) const {
  std::vector<double> w(n, 0.0);
  if (sigma2 > 0.0) {
    Rng rng(derive_seed(stream, 2));
    fill_gaussian(rng, w, sigma2);
  }
  if (sigma1 > 0.0) {
    Rng rng(derive_seed(stream, 1));
    std::vector<double> n1(n);
    fill_gaussian(rng, n1, 1.0);
    const auto shaped = channel_.filter(n1);
    const double g = sigma1 / std::sqrt(channel_.energy());
    for (std::size_t i = 0; i < n; ++i) w[i] += g * shaped[i];
  }
  return w;
}

LinkSimulator::ChunkResult LinkSimulator::run_chunk(std::uint64_t chunk, std::size_t chunk_bits,
                                                    double sigma1, double sigma2,
                                                    std::uint64_t seed, std::uint64_t point) const {
  const ModemConfig& cfg = setup_.modem;
  const std::size_t nbits = static_cast<std::size_t>(warmup_) + chunk_bits;
  // A delayed window reaches into one extra trailing symbol.
  const std::size_t tail = setup_.timing_offset > 0 ? 1 : 0;
  const auto bits = draw_bits(derive_seed(seed, 0xB175, chunk), nbits + tail);
  auto y = channel_.filter(transmit(bits, cfg));
  const auto w = noise(y.size(), sigma1, sigma2, derive_seed(derive_seed(seed, 1, point), chunk));
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += w[i];
  if (setup_.quantize) {
    const double scale = (peak_rx_ + 4.0 * std::hypot(sigma1, sigma2)) / 127.0;
    for (auto& v : y) v = scale * static_cast<double>(std::clamp(std::lround(v / scale), -127L, 127L));
  }

  ChunkResult res;
  const auto n = static_cast<std::size_t>(cfg.samples_per_symbol);
  if (setup_.receiver == ReceiverKind::Coherent) {
    const SymbolFrame frame = make_frame(bits, cfg);
    for (std::size_t k = static_cast<std::size_t>(warmup_); k < nbits; ++k) {
      double cm, cp;
      correlator_.correlate(
          y.data() + k * n + static_cast<std::size_t>(cfg.guard_samples + setup_.timing_offset),
          frame.phase[k], cm, cp);
      res.errors += static_cast<std::uint8_t>(cp > cm ? 1 : 0) != bits[k];
    }
  } else {
    const auto dec = noncoherent_demod(y, cfg, *filterbank_);
    for (std::size_t k = static_cast<std::size_t>(warmup_); k < nbits; ++k)
      res.errors += dec.bits[k] != bits[k];
  }
  res.bits = nbits - static_cast<std::size_t>(warmup_);
  return res;
}

BerPoint LinkSimulator::run(double es_n0_db, const StopRule& stop, std::uint64_t seed,
                            std::uint64_t point) const {
  if (stop.chunk_bits < 1 || stop.max_bits < 1)
    fail(ErrorCode::ConfigError, "trial budget and chunk size must be >= 1");
  const auto [s1, s2] = sigmas(es_n0_db);
  const auto chunk_bits = static_cast<std::size_t>(stop.chunk_bits);
  const std::uint64_t max_chunks = (stop.max_bits + chunk_bits - 1) / chunk_bits;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::uint64_t threads = stop.threads > 0 ? static_cast<unsigned>(stop.threads) : hw;

  BerPoint pt;
  pt.es_n0_db = es_n0_db;
  pt.theory = theoretical_ber(es_n0_db);
  std::uint64_t next = 0;
  // Batches have a fixed size so the stopping point, and therefore the
  // result, does not depend on the thread count.
  while (next < max_chunks && pt.errors < stop.target_errors) {
    const std::uint64_t end = std::min<std::uint64_t>(max_chunks, next + kBatchChunks);
    std::vector<ChunkResult> results;
    for (std::uint64_t c = next; c < end; c += threads) {
      std::vector<std::future<ChunkResult>> futs;
      for (std::uint64_t j = c; j < std::min(end, c + threads); ++j)
        futs.push_back(std::async(threads > 1 ? std::launch::async : std::launch::deferred,
                                  [this, j, chunk_bits, s1 = s1, s2 = s2, seed, point] {
                                    return run_chunk(j, chunk_bits, s1, s2, seed, point);
                                  }));
      for (auto& f : futs) results.push_back(f.get());
    }
    for (const auto& r : results) {
      pt.bits += r.bits;
      pt.errors += r.errors;
    }
    next = end;
  }
  pt.ber = pt.bits ? static_cast<double>(pt.errors) / static_cast<double>(pt.bits) : 0.0;
  pt.ci = wilson_interval(pt.errors, pt.bits);
  pt.reached_target = pt.errors >= stop.target_errors;
  return pt;
}

NoiseMeasurement LinkSimulator::measure_correlator_noise(double es_n0_db, std::uint64_t symbols,
                                                         std::uint64_t seed) const {
  const ModemConfig& cfg = setup_.modem;
  const auto [s1, s2] = sigmas(es_n0_db);
  const auto n = static_cast<std::size_t>(cfg.samples_per_symbol);
  const std::size_t total = static_cast<std::size_t>(warmup_) + symbols;
  const auto w = noise(total * n, s1, s2, derive_seed(seed, 0x401));
  double sm = 0, sp = 0, sd = 0, qm = 0, qp = 0, qd = 0;
  for (std::size_t k = static_cast<std::size_t>(warmup_); k < total; ++k) {
    double cm, cp;
    correlator_.correlate(w.data() + k * n + static_cast<std::size_t>(cfg.guard_samples), 0.0, cm, cp);
    sm += cm;
    sp += cp;
    sd += cp - cm;
    qm += cm * cm;
    qp += cp * cp;
    qd += (cp - cm) * (cp - cm);
  }
  const double m = static_cast<double>(symbols);
  NoiseMeasurement out;
  out.symbols = symbols;
  out.var_minus = qm / m - (sm / m) * (sm / m);
  out.var_plus = qp / m - (sp / m) * (sp / m);
  out.var_difference = qd / m - (sd / m) * (sd / m);
  return out;
}

int group_delay_samples(const TransferFunction& tf, double f_minus, double f_plus, double fs) {
  auto delay = [&tf](double f) {
    const double df = 1e-4 * f;
    // arg of the ratio avoids the wrap at +-pi.
    const double dphi = std::arg(eval_H(tf, kTwoPi * (f + df)) / eval_H(tf, kTwoPi * (f - df)));
    return -dphi / (kTwoPi * 2.0 * df);
  };
  return static_cast<int>(std::lround(0.5 * (delay(f_minus) + delay(f_plus)) * fs));
}

double q_inverse(double p) {
  if (!(p > 0.0 && p < 1.0)) fail(ErrorCode::DomainError, "q_inverse: p must be in (0, 1)");
  return std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

Extrapolation extrapolate_required_snr(const std::vector<BerPoint>& curve, double target,
                                       std::uint64_t min_errors) {
  std::vector<BerPoint> usable;
  for (const auto& p : curve)
    if (p.errors >= min_errors && p.ber > 0.0 && p.ber < 0.5) usable.push_back(p);
  if (usable.empty()) fail(ErrorCode::NumericFailure, "no sweep point has enough errors to fit");
  std::sort(usable.begin(), usable.end(),
            [](const BerPoint& a, const BerPoint& b) { return a.es_n0_db > b.es_n0_db; });
  usable.resize(std::min<std::size_t>(3, usable.size()));
  double g = 0.0;
  for (const auto& p : usable) {
    const double q = q_inverse(p.ber);
    g += q * q / std::pow(10.0, p.es_n0_db / 10.0);
  }
  g /= static_cast<double>(usable.size());
  const double qt = q_inverse(target);
  Extrapolation e;
  e.gain = g;
  e.points_used = static_cast<int>(usable.size());
  e.es_n0_db = 10.0 * std::log10(qt * qt / g);
  return e;
}

}  // namespace swipt
