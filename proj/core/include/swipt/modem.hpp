#pragma once

// Binary continuous-phase FSK and rectified FSK with a cyclic extension,
// plus the coherent correlator and the lowpass/bandpass energy receiver.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace swipt {

enum class WaveformKind { FSK, RFSK_BIPOLAR, RFSK_UNIPOLAR };

std::string_view to_string(WaveformKind kind);
/// Accepts "fsk", "rfsk", "rfsk_bipolar", "rfsk_unipolar" (any case).
WaveformKind waveform_kind_from_string(std::string_view s);

/// Symbol timing lives on the sample grid: N samples per symbol, the first
/// Ng of which are the cyclic extension.
struct ModemConfig {
  double f_minus = 0.0;
  double f_plus = 0.0;
  double fs = 0.0;
  int samples_per_symbol = 0;
  int guard_samples = 0;
  WaveformKind kind = WaveformKind::FSK;

  double T() const { return samples_per_symbol / fs; }
  double Tg() const { return guard_samples / fs; }
  double Tu() const { return useful_samples() / fs; }
  int useful_samples() const { return samples_per_symbol - guard_samples; }
  double f_center() const { return 0.5 * (f_plus + f_minus); }
  double delta_f() const { return 0.5 * (f_plus - f_minus); }
  double tone(int bit) const { return bit ? f_plus : f_minus; }

  /// DomainError unless 0 < f- < f+ < fs/2, Ng >= 0 and Nu > 0.
  void validate() const;

  /// fs = J * rate with J = round(fs_target / rate) and Tg = Tu/10, i.e.
  /// Ng = round(N / 11).
  static ModemConfig for_rate(double f_minus, double f_plus, double rate,
                              WaveformKind kind = WaveformKind::FSK,
                              double fs_target = 20e6, double guard_ratio = 0.1);

  /// From physical durations. DomainError unless T*fs and Tg*fs are integers
  /// within 1e-9.
  static ModemConfig from_durations(double f_minus, double f_plus, double fs, double T,
                                    double Tg, WaveformKind kind = WaveformKind::FSK);
};

/// Bits, antipodal symbols and the phase of each symbol's first sample.
struct SymbolFrame {
  std::vector<std::uint8_t> bits;
  std::vector<int> symbols;   // 2u - 1
  std::vector<double> phase;  // [0, 2 pi)
};

/// phi_{k+1} = (phi_k + 2 pi f_k T) mod 2 pi.
SymbolFrame make_frame(std::span<const std::uint8_t> bits, const ModemConfig& cfg,
                       double phi0 = 0.0);

/// sqrt(2) sin(2 pi f_k t' + phi_k) per symbol, t' from the symbol start.
/// Returns the FSK waveform regardless of cfg.kind.
std::vector<double> modulate(std::span<const std::uint8_t> bits, const ModemConfig& cfg,
                             double phi0 = 0.0);

/// Bipolar: +1 where s >= 0, -1 elsewhere. Unipolar: +1 / 0.
/// InvalidArgument for kind == FSK.
std::vector<double> rectify(std::span<const double> s, WaveformKind kind);

/// modulate followed by rectify when cfg.kind asks for it.
std::vector<double> transmit(std::span<const std::uint8_t> bits, const ModemConfig& cfg,
                             double phi0 = 0.0);

/// Genie-aided carrier reference: the transmitter's symbol phases and the
/// channel phase at each tone.
struct PhaseReference {
  std::vector<double> symbol_phase;
  double channel_phase_minus = 0.0;
  double channel_phase_plus = 0.0;
};

struct CoherentDecision {
  std::vector<std::uint8_t> bits;
  std::vector<double> corr_minus;
  std::vector<double> corr_plus;
};

/// Correlates each symbol's useful window against both tones; bit 1 iff the
/// f+ correlation is strictly larger. LengthMismatch if r is short.
CoherentDecision coherent_demod(std::span<const double> r, const ModemConfig& cfg,
                                const PhaseReference& ref);

/// Precomputed correlator templates; the Monte Carlo engine uses this
/// directly to avoid rebuilding them per call.
class Correlator {
 public:
  explicit Correlator(const ModemConfig& cfg, double channel_phase_minus = 0.0,
                      double channel_phase_plus = 0.0);
  /// Correlations of one symbol's useful-window samples (Nu of them).
  void correlate(const double* useful, double symbol_phase, double& c_minus,
                 double& c_plus) const;

 private:
  int nu_;
  double ph_minus_;
  double ph_plus_;
  std::vector<double> s_minus_, c_minus_, s_plus_, c_plus_;
};

struct FilterBankSpecs {
  double f0 = 1e6;
  double fs = 20e6;
  int taps = 291;
  double ripple_db = 0.4;
  double attenuation_db = 30.0;
  double transition_fraction = 0.05;  // delta_t
  double bandwidth = 1e6;
};

struct FilterBank {
  std::vector<double> lowpass;
  std::vector<double> bandpass;
  FilterBankSpecs specs;
  int group_delay() const { return (specs.taps - 1) / 2; }
};

/// Equiripple lowpass (pass [0, f0(1-dt)]) and bandpass (pass
/// [f0(1+dt), f0 + B - f0 dt]) filters. SpecInfeasible with the achieved
/// figures if the measured response misses ripple or attenuation.
FilterBank design_filterbank(const FilterBankSpecs& specs = {});

struct NoncoherentDecision {
  std::vector<std::uint8_t> bits;
  std::vector<double> mean_lowpass;
  std::vector<double> mean_bandpass;
};

/// Bit 1 iff the bandpass branch's mean |output| over the useful window
/// exceeds the lowpass branch's; ties go to 0.
NoncoherentDecision noncoherent_demod(std::span<const double> r, const ModemConfig& cfg,
                                      const FilterBank& fb);

/// 0.5 erfc(sqrt(Es / (2 N0))).
double theoretical_ber(double es_n0_db);

/// Energy lost to the cyclic extension, 10 log10(T / Tu) dB.
double guard_penalty_db(const ModemConfig& cfg);

}  // namespace swipt
