#pragma once

// Raw sample files with a key=value text sidecar ("<data>.hdr").
//
//   format = float32le | int8
//   fs = 20000000
//   T = 5e-05
//   Tg = 4.55e-06
//   kind = fsk
//   f_minus = 842354.2      (optional)
//   f_plus = 1295286.1      (optional)
//   scale = 0.0123          (int8 only: volts per LSB)

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "swipt/modem.hpp"

namespace swipt {

enum class SampleFormat { Float32LE, Int8 };

struct WaveformHeader {
  SampleFormat format = SampleFormat::Float32LE;
  double fs = 0.0;
  double T = 0.0;
  double Tg = 0.0;
  WaveformKind kind = WaveformKind::FSK;
  std::optional<double> f_minus;
  std::optional<double> f_plus;
  double scale = 1.0;
};

std::filesystem::path sidecar_path(const std::filesystem::path& data);

/// Parses sidecar text. FormatError on unknown format/kind, malformed lines,
/// missing or non-positive fs/T, or Tg outside [0, T).
WaveformHeader parse_header(const std::string& text);
std::string format_header(const WaveformHeader& h);

/// Writes float32 little-endian samples and the sidecar.
void write_waveform(const std::filesystem::path& data, std::span<const double> x,
                    WaveformHeader h);

/// Symmetric 8-bit quantiser: round(x / scale) clamped to [-127, 127].
std::vector<std::int8_t> quantize_int8(std::span<const double> x, double scale);
/// Scale that maps max |x| to 127 (1 for an all-zero input).
double int8_scale_for(std::span<const double> x);

/// Writes int8 samples and the sidecar (format forced to int8).
void write_capture(const std::filesystem::path& data, std::span<const std::int8_t> q,
                   WaveformHeader h);

struct Waveform {
  WaveformHeader header;
  std::vector<double> samples;  // scaled back to volts for int8
};

/// Reads data plus sidecar. FormatError if the sidecar is missing or
/// malformed, or the file size does not fit the sample format.
Waveform read_waveform(const std::filesystem::path& data);

/// ModemConfig implied by the header; needs f_minus/f_plus present or given.
ModemConfig modem_config_from(const WaveformHeader& h, std::optional<double> f_minus = {},
                              std::optional<double> f_plus = {});

/// Bit strings: '0'/'1' characters, whitespace ignored. FormatError otherwise.
std::vector<std::uint8_t> parse_bits(const std::string& text);
std::string format_bits(std::span<const std::uint8_t> bits);

}  // namespace swipt
