#include "swipt/modem.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "swipt/circuit_model.hpp"
#include "swipt/error.hpp"
#include "swipt/filter_design.hpp"
#include "swipt/spectrum.hpp"

namespace swipt {

namespace {

constexpr double kSqrt2 = 1.41421356237309504880;

bool near_integer(double v) { return std::abs(v - std::round(v)) <= 1e-9 * std::max(1.0, std::abs(v)); }

double wrap_phase(double phi) {
  phi = std::fmod(phi, kTwoPi);
  return phi < 0.0 ? phi + kTwoPi : phi;
}

}  // namespace

std::string_view to_string(WaveformKind kind) {
  switch (kind) {
    case WaveformKind::FSK: return "fsk";
    case WaveformKind::RFSK_BIPOLAR: return "rfsk_bipolar";
    case WaveformKind::RFSK_UNIPOLAR: return "rfsk_unipolar";
  }
  return "unknown";
}

WaveformKind waveform_kind_from_string(std::string_view s) {
  std::string v(s);
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "fsk") return WaveformKind::FSK;
  if (v == "rfsk" || v == "rfsk_bipolar") return WaveformKind::RFSK_BIPOLAR;
  if (v == "rfsk_unipolar") return WaveformKind::RFSK_UNIPOLAR;
  fail(ErrorCode::ConfigError, "unknown waveform kind '" + v + "'");
}

void ModemConfig::validate() const {
  if (!(fs > 0.0)) fail(ErrorCode::DomainError, "sample rate must be positive");
  if (!(f_minus > 0.0 && f_minus < f_plus && f_plus < 0.5 * fs))
    fail(ErrorCode::DomainError, "tones must satisfy 0 < f- < f+ < fs/2");
  if (guard_samples < 0 || useful_samples() <= 0)
    fail(ErrorCode::DomainError, "need Tg >= 0 and Tu > 0");
}

ModemConfig ModemConfig::for_rate(double f_minus, double f_plus, double rate,
                                  WaveformKind kind, double fs_target, double guard_ratio) {
  if (!(rate > 0.0) || !(fs_target > 0.0) || !(guard_ratio >= 0.0))
    fail(ErrorCode::DomainError, "rate, sample rate and guard ratio must be positive");
  ModemConfig cfg;
  cfg.samples_per_symbol = std::max(1, static_cast<int>(std::lround(fs_target / rate)));
  cfg.fs = cfg.samples_per_symbol * rate;
  // Tg = guard_ratio * Tu  =>  Ng = N * g / (1 + g).
  cfg.guard_samples = static_cast<int>(
      std::lround(cfg.samples_per_symbol * guard_ratio / (1.0 + guard_ratio)));
  cfg.f_minus = f_minus;
  cfg.f_plus = f_plus;
  cfg.kind = kind;
  cfg.validate();
  return cfg;
}

ModemConfig ModemConfig::from_durations(double f_minus, double f_plus, double fs, double T,
                                        double Tg, WaveformKind kind) {
  if (!near_integer(T * fs) || !near_integer(Tg * fs))
    fail(ErrorCode::DomainError, "T and Tg must be whole numbers of samples");
  ModemConfig cfg;
  cfg.f_minus = f_minus;
  cfg.f_plus = f_plus;
  cfg.fs = fs;
  cfg.samples_per_symbol = static_cast<int>(std::lround(T * fs));
  cfg.guard_samples = static_cast<int>(std::lround(Tg * fs));
  cfg.kind = kind;
  cfg.validate();
  return cfg;
}

SymbolFrame make_frame(std::span<const std::uint8_t> bits, const ModemConfig& cfg, double phi0) {
  SymbolFrame fr;
  fr.bits.assign(bits.begin(), bits.end());
  fr.symbols.reserve(bits.size());
  fr.phase.reserve(bits.size());
  // Accumulated in long double so the phase does not drift over long frames.
  constexpr long double two_pi = 6.283185307179586476925286766559L;
  const auto increment = [&](double f) {
    const long double cycles = static_cast<long double>(f) * cfg.samples_per_symbol / cfg.fs;
    return two_pi * (cycles - std::floor(cycles));
  };
  const long double inc[2] = {increment(cfg.f_minus), increment(cfg.f_plus)};
  long double phi = wrap_phase(phi0);
  for (std::uint8_t b : bits) {
    fr.symbols.push_back(b ? 1 : -1);
    fr.phase.push_back(static_cast<double>(phi));
    phi = std::fmod(phi + inc[b ? 1 : 0], two_pi);
  }
  return fr;
}

std::vector<double> modulate(std::span<const std::uint8_t> bits, const ModemConfig& cfg,
                             double phi0) {
  cfg.validate();
  if (bits.empty()) fail(ErrorCode::InvalidArgument, "modulate: no bits");
  const int n = cfg.samples_per_symbol;
  // sin(w t' + phi) = sin(w t') cos(phi) + cos(w t') sin(phi), with the
  // per-tone tables evaluated exactly at each sample.
  std::vector<double> tab_s[2], tab_c[2];
  for (int b = 0; b < 2; ++b) {
    tab_s[b].resize(n);
    tab_c[b].resize(n);
    const double w = kTwoPi * cfg.tone(b) / cfg.fs;
    for (int i = 0; i < n; ++i) {
      tab_s[b][i] = std::sin(w * i);
      tab_c[b][i] = std::cos(w * i);
    }
  }
  const SymbolFrame fr = make_frame(bits, cfg, phi0);
  std::vector<double> out(bits.size() * static_cast<std::size_t>(n));
  for (std::size_t k = 0; k < bits.size(); ++k) {
    const int b = bits[k] ? 1 : 0;
    const double cp = kSqrt2 * std::cos(fr.phase[k]);
    const double sp = kSqrt2 * std::sin(fr.phase[k]);
    double* dst = out.data() + k * static_cast<std::size_t>(n);
    for (int i = 0; i < n; ++i) dst[i] = tab_s[b][i] * cp + tab_c[b][i] * sp;
  }
  return out;
}

std::vector<double> rectify(std::span<const double> s, WaveformKind kind) {
  if (kind == WaveformKind::FSK) fail(ErrorCode::InvalidArgument, "rectify: FSK is not rectified");
  const double low = kind == WaveformKind::RFSK_BIPOLAR ? -1.0 : 0.0;
  std::vector<double> out(s.size());
  std::transform(s.begin(), s.end(), out.begin(), [low](double v) { return v >= 0.0 ? 1.0 : low; });
  return out;
}

std::vector<double> transmit(std::span<const std::uint8_t> bits, const ModemConfig& cfg,
                             double phi0) {
  auto s = modulate(bits, cfg, phi0);
  if (cfg.kind != WaveformKind::FSK) s = rectify(s, cfg.kind);
  return s;
}

Correlator::Correlator(const ModemConfig& cfg, double channel_phase_minus,
                       double channel_phase_plus)
    : nu_(cfg.useful_samples()), ph_minus_(channel_phase_minus), ph_plus_(channel_phase_plus) {
  cfg.validate();
  const int ng = cfg.guard_samples;
  const auto fill = [&](double f, double theta, std::vector<double>& s, std::vector<double>& c) {
    s.resize(nu_);
    c.resize(nu_);
    const double w = kTwoPi * f / cfg.fs;
    for (int i = 0; i < nu_; ++i) {
      const double arg = w * (ng + i) + theta;
      s[i] = std::sin(arg);
      c[i] = std::cos(arg);
    }
  };
  fill(cfg.f_minus, ph_minus_, s_minus_, c_minus_);
  fill(cfg.f_plus, ph_plus_, s_plus_, c_plus_);
}

void Correlator::correlate(const double* useful, double symbol_phase, double& c_minus,
                           double& c_plus) const {
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  for (int i = 0; i < nu_; ++i) {
    const double r = useful[i];
    a += r * s_minus_[i];
    b += r * c_minus_[i];
    c += r * s_plus_[i];
    d += r * c_plus_[i];
  }
  const double cp = std::cos(symbol_phase);
  const double sp = std::sin(symbol_phase);
  c_minus = a * cp + b * sp;
  c_plus = c * cp + d * sp;
}

CoherentDecision coherent_demod(std::span<const double> r, const ModemConfig& cfg,
                                const PhaseReference& ref) {
  const std::size_t nsym = ref.symbol_phase.size();
  const auto n = static_cast<std::size_t>(cfg.samples_per_symbol);
  if (r.size() < nsym * n) fail(ErrorCode::LengthMismatch, "received signal shorter than the frame");
  const Correlator corr(cfg, ref.channel_phase_minus, ref.channel_phase_plus);
  CoherentDecision out;
  out.bits.resize(nsym);
  out.corr_minus.resize(nsym);
  out.corr_plus.resize(nsym);
  for (std::size_t k = 0; k < nsym; ++k) {
    corr.correlate(r.data() + k * n + static_cast<std::size_t>(cfg.guard_samples),
                   ref.symbol_phase[k], out.corr_minus[k], out.corr_plus[k]);
    out.bits[k] = out.corr_plus[k] > out.corr_minus[k] ? 1 : 0;
  }
  return out;
}

FilterBank design_filterbank(const FilterBankSpecs& specs) {
  const double f0 = specs.f0;
  const double fs = specs.fs;
  const double dt = specs.transition_fraction;
  if (!(f0 > 0.0 && f0 < 0.5 * fs)) fail(ErrorCode::DomainError, "filterbank: need 0 < f0 < fs/2");
  if (!(dt > 0.0 && dt < 1.0)) fail(ErrorCode::DomainError, "filterbank: transition fraction in (0, 1)");
  const double bp_lo = f0 * (1.0 + dt);
  const double bp_hi = f0 + specs.bandwidth - f0 * dt;
  const double bp_stop = f0 + specs.bandwidth + f0 * dt;
  if (!(bp_hi > bp_lo && bp_stop < 0.5 * fs))
    fail(ErrorCode::DomainError, "filterbank: bandpass does not fit below Nyquist");

  const double gp = std::pow(10.0, specs.ripple_db / 20.0);
  const double dp = (gp - 1.0) / (gp + 1.0);
  const double ds = std::pow(10.0, -specs.attenuation_db / 20.0);
  const double ws = dp / ds;

  const RemezBand lp_bands[] = {{0.0, f0 * (1.0 - dt) / fs, 1.0, 1.0},
                                {f0 * (1.0 + dt) / fs, 0.5, 0.0, ws}};
  const RemezBand bp_bands[] = {{0.0, f0 * (1.0 - dt) / fs, 0.0, ws},
                                {bp_lo / fs, bp_hi / fs, 1.0, 1.0},
                                {bp_stop / fs, 0.5, 0.0, ws}};
  FilterBank fb;
  fb.specs = specs;
  fb.lowpass = remez(specs.taps, lp_bands).taps;
  fb.bandpass = remez(specs.taps, bp_bands).taps;

  const FrequencyRange lp_pass[] = {{0.0, f0 * (1.0 - dt)}};
  const FrequencyRange lp_stop[] = {{f0 * (1.0 + dt), 0.5 * fs}};
  const FrequencyRange bp_pass[] = {{bp_lo, bp_hi}};
  const FrequencyRange bp_stopb[] = {{0.0, f0 * (1.0 - dt)}, {bp_stop, 0.5 * fs}};
  const BandMetrics ml = measure_filter(fb.lowpass, fs, lp_pass, lp_stop);
  const BandMetrics mb = measure_filter(fb.bandpass, fs, bp_pass, bp_stopb);
  const double ripple = std::max(ml.ripple_db, mb.ripple_db);
  const double atten = std::min(ml.attenuation_db, mb.attenuation_db);
  if (ripple > specs.ripple_db || atten < specs.attenuation_db)
    fail(ErrorCode::SpecInfeasible,
         "filterbank misses spec with " + std::to_string(specs.taps) + " taps: ripple " +
             std::to_string(ripple) + " dB, attenuation " + std::to_string(atten) + " dB");
  return fb;
}

NoncoherentDecision noncoherent_demod(std::span<const double> r, const ModemConfig& cfg,
                                      const FilterBank& fb) {
  const auto n = static_cast<std::size_t>(cfg.samples_per_symbol);
  const std::size_t nsym = r.size() / n;
  if (nsym == 0 || r.size() % n != 0)
    fail(ErrorCode::LengthMismatch, "received signal is not a whole number of symbols");
  const auto lp = fft_convolve(r, fb.lowpass);
  const auto bp = fft_convolve(r, fb.bandpass);
  const auto delay = static_cast<std::size_t>(fb.group_delay());
  NoncoherentDecision out;
  out.bits.resize(nsym);
  out.mean_lowpass.resize(nsym);
  out.mean_bandpass.resize(nsym);
  const std::size_t ng = static_cast<std::size_t>(cfg.guard_samples);
  const double inv = 1.0 / cfg.useful_samples();
  for (std::size_t k = 0; k < nsym; ++k) {
    double al = 0.0, ab = 0.0;
    for (std::size_t i = k * n + ng; i < (k + 1) * n; ++i) {
      al += std::abs(lp[i + delay]);
      ab += std::abs(bp[i + delay]);
    }
    out.mean_lowpass[k] = al * inv;
    out.mean_bandpass[k] = ab * inv;
    out.bits[k] = ab > al ? 1 : 0;
  }
  return out;
}

double theoretical_ber(double es_n0_db) {
  if (std::isinf(es_n0_db)) return es_n0_db < 0 ? 0.5 : 0.0;
  const double g = std::pow(10.0, es_n0_db / 10.0);
  return 0.5 * std::erfc(std::sqrt(0.5 * g));
}

double guard_penalty_db(const ModemConfig& cfg) {
  return 10.0 * std::log10(static_cast<double>(cfg.samples_per_symbol) / cfg.useful_samples());
}

}  // namespace swipt
