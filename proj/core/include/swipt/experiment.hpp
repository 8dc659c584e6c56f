#pragma once

// Reproduction experiments: configuration, result records and the runs
// behind each CLI subcommand.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "swipt/ber_engine.hpp"
#include "swipt/circuit_model.hpp"
#include "swipt/modem.hpp"
#include "swipt/waveform_io.hpp"

namespace swipt {

enum class GuardPolicy { Ratio, Absolute };
enum class ToneRule { Exact, Approx };
/// Coherent receiver window: transmitter-aligned, or delayed by the
/// channel's group delay at the tones.
enum class ReceiverTiming { Aligned, GroupDelay };

struct ExperimentConfig {
  std::string preset = "paper-default";
  Components components = paper_default_components();
  double k = 0.4;
  std::optional<double> k_tx;
  std::optional<double> k_rx;
  std::vector<double> rates{20e3};
  GuardPolicy guard_policy = GuardPolicy::Ratio;
  double guard_value = 0.1;  // Tg/Tu, or seconds
  std::vector<WaveformKind> kinds{WaveformKind::FSK};
  std::vector<double> es_n0_db{4, 6, 8, 10, 12};
  NoiseSide noise_side = NoiseSide::Receiver;
  double transmitter_share = 0.5;
  ReceiverKind receiver = ReceiverKind::Coherent;
  ReceiverTiming timing = ReceiverTiming::Aligned;
  std::uint64_t target_errors = 100;
  std::uint64_t max_bits = 1'000'000;
  int chunk_bits = 2000;
  int threads = 0;
  std::uint64_t seed = 1;
  double fs = 20e6;
  ToneRule tones = ToneRule::Exact;
  std::vector<double> k_estimates{0.3, 0.5};
  std::vector<double> windows{10e-6, 100e-6, 1000e-6};
  std::vector<double> efficiency_couplings{0.0, 0.2, 0.4, 0.6, 0.8};
  double transient_span = 40e-6;
  int capture_bits = 400;

  /// ConfigError on out-of-range values.
  void validate() const;
};

/// Named presets: "paper-default" (tuned C) and "paper-nominal" (4 nF).
ExperimentConfig preset_config(const std::string& name);

/// Strict JSON: unknown keys or wrong types raise ConfigError. Missing keys
/// keep the preset's values ("preset" is read first).
ExperimentConfig parse_config(const std::string& json_text);
/// Same, starting from `base` instead of the built-in defaults.
ExperimentConfig parse_config(const std::string& json_text, const ExperimentConfig& base);
/// Defaults for a CLI subcommand (grids and rates sized for that run).
ExperimentConfig default_config(const std::string& experiment);
std::string config_to_json(const ExperimentConfig& cfg);
/// FNV-1a 64 of the canonical JSON (sorted keys, fixed number format).
std::uint64_t config_hash(const ExperimentConfig& cfg);

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  void add(std::vector<std::string> row);
};

/// Fixed "%.10g" so output is byte-stable across runs.
std::string fmt(double v);

struct ResultRecord {
  std::string experiment;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double runtime_seconds = 0.0;
  std::map<std::string, double> metrics;
  std::map<std::string, std::string> notes;
  std::vector<Table> tables;

  const Table& table(const std::string& name) const;
};

/// Writes <experiment>_<table>.csv per table (with the notes as leading
/// '#' lines) and <experiment>.json with metrics, notes, hash and runtime.
void write_outputs(const ResultRecord& r, const std::filesystem::path& dir);
std::string record_to_json(const ResultRecord& r);

/// Circuit at the configured k (and RL from components).
CircuitParams circuit(const ExperimentConfig& cfg, std::optional<double> k = {});

/// Tones for a circuit: exact (real-H frequencies, or f0/sqrt(1 -+ k) when
/// H is never real off f0) or the approximation.
std::pair<double, double> tones_for(const CircuitParams& p, ToneRule rule);

ModemConfig modem_for(const ExperimentConfig& cfg, double f_minus, double f_plus, double rate,
                      WaveformKind kind);

/// Link with the config's receiver, noise side and timing.
LinkSetup link_for(const ExperimentConfig& cfg, const TransferFunction& tf, const ModemConfig& m);

ResultRecord run_analyze(const ExperimentConfig& cfg);
ResultRecord run_ber_sweep(const ExperimentConfig& cfg);
ResultRecord run_noise_side_equivalence(const ExperimentConfig& cfg);
ResultRecord run_mismatch_sweep(const ExperimentConfig& cfg);
ResultRecord run_offpeak_cases(const ExperimentConfig& cfg);
ResultRecord run_efficiency_report(const ExperimentConfig& cfg);
ResultRecord run_transient_study(const ExperimentConfig& cfg);

/// Mean v2^2 of a random-bit transient run (first symbol skipped) over the
/// phasor steady-state value of the same tone sequence.
double output_power_ratio(const CircuitParams& p, const ModemConfig& m, int nbits,
                          std::uint64_t seed);

/// Horizontal distance (dB) between two waterfalls at a common BER,
/// by log-linear interpolation; NaN where either curve does not bracket it.
double snr_at_ber(const std::vector<BerPoint>& curve, double ber);

struct SyntheticCapture {
  WaveformHeader header;
  std::vector<std::uint8_t> bits;
  std::vector<double> samples;          // float waveform at the coil
  std::vector<std::int8_t> quantized;   // int8 capture
};

/// Noiseless (es_n0_db = +inf) or noisy received waveform for `nbits`
/// alternating-or-random bits, quantised to 8 bits at full scale.
SyntheticCapture make_synthetic_capture(const ExperimentConfig& cfg, double rate, int nbits,
                                        bool alternating, double es_n0_db, std::uint64_t seed);

struct DecodeReport {
  std::vector<std::uint8_t> bits;
  std::vector<double> mean_lowpass;
  std::vector<double> mean_bandpass;
  std::vector<bool> low_confidence;
  std::optional<std::uint64_t> errors;
  std::optional<double> ber;
};

/// Noncoherent decoding of a capture (int8 or float32 with sidecar).
/// Tones come from the header, else from the config's circuit.
DecodeReport decode_capture(const std::filesystem::path& data, const ExperimentConfig& cfg,
                            const std::optional<std::vector<std::uint8_t>>& reference = {});

/// decode subcommand: decodes `capture` if given, otherwise writes a
/// synthetic int8 capture plus a float32 waveform into `dir` and decodes
/// that. Also measures the 8-bit and noncoherent penalties at 12 dB.
ResultRecord run_decode(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                        const std::optional<std::filesystem::path>& capture,
                        const std::optional<std::filesystem::path>& reference_bits);

}  // namespace swipt
