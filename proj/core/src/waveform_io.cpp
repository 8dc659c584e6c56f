#include "swipt/waveform_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "swipt/error.hpp"

namespace swipt {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double parse_number(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out))
    fail(ErrorCode::FormatError, "header: '" + key + "' is not a number: '" + v + "'");
  return out;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::FormatError, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& p, const void* data, std::size_t n) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::InvalidArgument, "cannot write " + p.string());
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
  if (!out) fail(ErrorCode::InvalidArgument, "short write to " + p.string());
}

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& data) {
  std::filesystem::path p = data;
  p += ".hdr";
  return p;
}

WaveformHeader parse_header(const std::string& text) {
  WaveformHeader h;
  bool have_format = false, have_fs = false, have_T = false, have_Tg = false, have_scale = false;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      fail(ErrorCode::FormatError, "header line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string val = trim(std::string_view(t).substr(eq + 1));
    if (key == "format") {
      if (val == "float32le") h.format = SampleFormat::Float32LE;
      else if (val == "int8") h.format = SampleFormat::Int8;
      else fail(ErrorCode::FormatError, "header: unknown format '" + val + "'");
      have_format = true;
    } else if (key == "fs") {
      h.fs = parse_number(key, val);
      have_fs = true;
    } else if (key == "T") {
      h.T = parse_number(key, val);
      have_T = true;
    } else if (key == "Tg") {
      h.Tg = parse_number(key, val);
      have_Tg = true;
    } else if (key == "kind") {
      try {
        h.kind = waveform_kind_from_string(val);
      } catch (const Error&) {
        fail(ErrorCode::FormatError, "header: unknown kind '" + val + "'");
      }
    } else if (key == "f_minus") {
      h.f_minus = parse_number(key, val);
    } else if (key == "f_plus") {
      h.f_plus = parse_number(key, val);
    } else if (key == "scale") {
      h.scale = parse_number(key, val);
      have_scale = true;
    } else {
      fail(ErrorCode::FormatError, "header: unknown key '" + key + "'");
    }
  }
  if (!have_format || !have_fs || !have_T || !have_Tg)
    fail(ErrorCode::FormatError, "header: format, fs, T and Tg are required");
  if (!(h.fs > 0.0) || !(h.T > 0.0) || !(h.Tg >= 0.0 && h.Tg < h.T))
    fail(ErrorCode::FormatError, "header: need fs > 0, T > 0 and 0 <= Tg < T");
  if (h.format == SampleFormat::Int8 && !(have_scale && h.scale > 0.0))
    fail(ErrorCode::FormatError, "header: int8 data needs a positive scale");
  return h;
}

std::string format_header(const WaveformHeader& h) {
  std::ostringstream os;
  os << std::setprecision(17);
  os << "format = " << (h.format == SampleFormat::Int8 ? "int8" : "float32le") << '\n'
     << "fs = " << h.fs << '\n'
     << "T = " << h.T << '\n'
     << "Tg = " << h.Tg << '\n'
     << "kind = " << to_string(h.kind) << '\n';
  if (h.f_minus) os << "f_minus = " << *h.f_minus << '\n';
  if (h.f_plus) os << "f_plus = " << *h.f_plus << '\n';
  if (h.format == SampleFormat::Int8) os << "scale = " << h.scale << '\n';
  return os.str();
}

void write_waveform(const std::filesystem::path& data, std::span<const double> x,
                    WaveformHeader h) {
  h.format = SampleFormat::Float32LE;
  std::vector<std::uint32_t> words(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    words[i] = to_le(std::bit_cast<std::uint32_t>(static_cast<float>(x[i])));
  write_file(data, words.data(), words.size() * sizeof(std::uint32_t));
  const std::string hdr = format_header(h);
  write_file(sidecar_path(data), hdr.data(), hdr.size());
}

std::vector<std::int8_t> quantize_int8(std::span<const double> x, double scale) {
  if (!(scale > 0.0)) fail(ErrorCode::InvalidArgument, "quantize_int8: scale must be positive");
  std::vector<std::int8_t> q(x.size());
  std::transform(x.begin(), x.end(), q.begin(), [scale](double v) {
    return static_cast<std::int8_t>(std::clamp(std::lround(v / scale), -127L, 127L));
  });
  return q;
}

double int8_scale_for(std::span<const double> x) {
  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  return peak > 0.0 ? peak / 127.0 : 1.0;
}

void write_capture(const std::filesystem::path& data, std::span<const std::int8_t> q,
                   WaveformHeader h) {
  h.format = SampleFormat::Int8;
  write_file(data, q.data(), q.size());
  const std::string hdr = format_header(h);
  write_file(sidecar_path(data), hdr.data(), hdr.size());
}

Waveform read_waveform(const std::filesystem::path& data) {
  const auto side = sidecar_path(data);
  if (!std::filesystem::exists(side)) fail(ErrorCode::FormatError, "missing sidecar " + side.string());
  Waveform w;
  w.header = parse_header(read_file(side));
  const std::string raw = read_file(data);
  if (w.header.format == SampleFormat::Int8) {
    w.samples.resize(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i)
      w.samples[i] = w.header.scale * static_cast<double>(static_cast<std::int8_t>(raw[i]));
  } else {
    if (raw.size() % 4 != 0)
      fail(ErrorCode::FormatError, "float32 data size is not a multiple of 4 bytes");
    w.samples.resize(raw.size() / 4);
    for (std::size_t i = 0; i < w.samples.size(); ++i) {
      std::uint32_t word;
      std::memcpy(&word, raw.data() + 4 * i, 4);
      w.samples[i] = std::bit_cast<float>(to_le(word));
    }
  }
  return w;
}

ModemConfig modem_config_from(const WaveformHeader& h, std::optional<double> f_minus,
                              std::optional<double> f_plus) {
  const auto fm = f_minus ? f_minus : h.f_minus;
  const auto fp = f_plus ? f_plus : h.f_plus;
  if (!fm || !fp) fail(ErrorCode::ConfigError, "tone frequencies missing from header and config");
  try {
    return ModemConfig::from_durations(*fm, *fp, h.fs, h.T, h.Tg, h.kind);
  } catch (const Error& e) {
    fail(ErrorCode::FormatError, std::string("header timing: ") + e.what());
  }
}

std::vector<std::uint8_t> parse_bits(const std::string& text) {
  std::vector<std::uint8_t> bits;
  for (char c : text) {
    if (c == '0' || c == '1') bits.push_back(static_cast<std::uint8_t>(c - '0'));
    else if (!std::isspace(static_cast<unsigned char>(c)))
      fail(ErrorCode::FormatError, std::string("bit string: unexpected character '") + c + "'");
  }
  return bits;
}

std::string format_bits(std::span<const std::uint8_t> bits) {
  std::string s(bits.size(), '0');
  for (std::size_t i = 0; i < bits.size(); ++i) s[i] = bits[i] ? '1' : '0';
  return s;
}

}  // namespace swipt
