#include "swipt/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "swipt/discrete_channel.hpp"
#include "swipt/error.hpp"
#include "swipt/rng.hpp"
#include "swipt/transient_sim.hpp"

namespace swipt {

using nlohmann::json;

namespace {

constexpr const char* kEsN0Note =
    "Es = mean noiseless r^2 over the useful windows at the correlator input times Tu; "
    "N0 = one-sided PSD of the injected noise referred to the same point";

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

ResultRecord new_record(const ExperimentConfig& cfg, std::string name) {
  ResultRecord r;
  r.experiment = std::move(name);
  r.config_hash = config_hash(cfg);
  r.seed = cfg.seed;
  return r;
}

std::string guard_name(GuardPolicy g) { return g == GuardPolicy::Ratio ? "ratio" : "absolute"; }
std::string tone_name(ToneRule t) { return t == ToneRule::Exact ? "exact" : "approx"; }
std::string timing_name(ReceiverTiming t) {
  return t == ReceiverTiming::Aligned ? "aligned" : "group_delay";
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string key_of(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

StopRule stop_rule(const ExperimentConfig& cfg) {
  StopRule s;
  s.target_errors = cfg.target_errors;
  s.max_bits = cfg.max_bits;
  s.chunk_bits = cfg.chunk_bits;
  s.threads = cfg.threads;
  return s;
}

std::vector<std::uint8_t> random_bits(std::uint64_t seed, int n) {
  Rng rng(seed);
  std::vector<std::uint8_t> b(static_cast<std::size_t>(n));
  for (auto& v : b) v = static_cast<std::uint8_t>(rng() >> 63);
  return b;
}

void add_ber_row(Table& t, std::vector<std::string> prefix, const BerPoint& p) {
  for (const std::string& s :
       {fmt(p.es_n0_db), std::to_string(p.bits), std::to_string(p.errors), fmt(p.ber),
        fmt(p.ci.lo), fmt(p.ci.hi), fmt(p.theory), std::string(p.reached_target ? "1" : "0")})
    prefix.push_back(s);
  t.add(std::move(prefix));
}

std::vector<std::string> ber_columns(std::vector<std::string> prefix) {
  for (const char* c : {"es_n0_db", "bits", "errors", "ber", "ci_lo", "ci_hi", "theory",
                        "reached_target"})
    prefix.emplace_back(c);
  return prefix;
}

struct Curve {
  std::string label;
  ModemConfig modem;
  std::vector<BerPoint> points;
};

Curve sweep(const ExperimentConfig& cfg, const LinkSetup& setup, std::uint64_t point_base,
            std::string label) {
  const LinkSimulator sim(setup);
  Curve c{std::move(label), setup.modem, {}};
  for (std::size_t i = 0; i < cfg.es_n0_db.size(); ++i)
    c.points.push_back(sim.run(cfg.es_n0_db[i], stop_rule(cfg), cfg.seed, point_base + i));
  return c;
}

Table link_table() {
  return Table{"links",
               {"label", "rate", "kind", "f_minus", "f_plus", "fs", "N", "Ng", "T", "Tg",
                "guard_penalty_db"},
               {}};
}

void add_link_row(Table& t, const std::string& label, double rate, const ModemConfig& m) {
  t.add({label, fmt(rate), std::string(to_string(m.kind)), fmt(m.f_minus), fmt(m.f_plus),
         fmt(m.fs), std::to_string(m.samples_per_symbol), std::to_string(m.guard_samples),
         fmt(m.T()), fmt(m.Tg()), fmt(guard_penalty_db(m))});
}

double required_theory_db(double ber) {
  const double q = q_inverse(ber);
  return 10.0 * std::log10(q * q);
}

/// Largest horizontal distance between two curves, over the points of each
/// with at least `min_errors` errors that the other curve brackets.
double max_curve_gap(const std::vector<BerPoint>& a, const std::vector<BerPoint>& b,
                     std::uint64_t min_errors) {
  double gap = std::numeric_limits<double>::quiet_NaN();
  auto scan = [&](const std::vector<BerPoint>& from, const std::vector<BerPoint>& to) {
    for (const auto& p : from) {
      if (p.errors < min_errors) continue;
      const double x = snr_at_ber(to, p.ber);
      if (std::isnan(x)) continue;
      const double d = std::abs(x - p.es_n0_db);
      gap = std::isnan(gap) ? d : std::max(gap, d);
    }
  };
  scan(a, b);
  scan(b, a);
  return gap;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// JSON helpers with ConfigError on type mismatches.
double num(const json& j, const std::string& key) {
  if (!j.is_number()) fail(ErrorCode::ConfigError, "config: '" + key + "' must be a number");
  return j.get<double>();
}

std::uint64_t count(const json& j, const std::string& key) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0)
    fail(ErrorCode::ConfigError, "config: '" + key + "' must be a non-negative integer");
  return j.get<std::uint64_t>();
}

std::string str(const json& j, const std::string& key) {
  if (!j.is_string()) fail(ErrorCode::ConfigError, "config: '" + key + "' must be a string");
  return j.get<std::string>();
}

std::vector<double> nums(const json& j, const std::string& key) {
  if (!j.is_array()) fail(ErrorCode::ConfigError, "config: '" + key + "' must be an array");
  std::vector<double> v;
  for (const auto& e : j) v.push_back(num(e, key));
  return v;
}

}  // namespace

void Table::add(std::vector<std::string> row) {
  if (row.size() != columns.size())
    fail(ErrorCode::LengthMismatch, "table " + name + ": row width does not match columns");
  rows.push_back(std::move(row));
}

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

const Table& ResultRecord::table(const std::string& name) const {
  for (const auto& t : tables)
    if (t.name == name) return t;
  fail(ErrorCode::InvalidArgument, "no table named " + name);
}

// ---------------------------------------------------------------------------
// Configuration

void ExperimentConfig::validate() const {
  auto coupling = [](double v, const char* what) {
    if (!(v >= 0.0 && v < 1.0) || v > kMaxCoupling)
      fail(ErrorCode::ConfigError, std::string(what) + " must lie in [0, 1)");
  };
  coupling(k, "k");
  if (k_tx) coupling(*k_tx, "k_tx");
  if (k_rx) coupling(*k_rx, "k_rx");
  if (k_tx && k_rx && *k_tx != *k_rx)
    fail(ErrorCode::ConfigError, "k_tx and k_rx must be equal (shared tone estimate)");
  for (double e : k_estimates) coupling(e, "k_estimates entries");
  if (rates.empty()) fail(ErrorCode::ConfigError, "at least one rate is required");
  for (double r : rates)
    if (!(r > 0.0)) fail(ErrorCode::ConfigError, "rates must be positive");
  if (kinds.empty()) fail(ErrorCode::ConfigError, "at least one waveform kind is required");
  if (es_n0_db.empty()) fail(ErrorCode::ConfigError, "Es/N0 grid is empty");
  for (double e : es_n0_db)
    if (!std::isfinite(e)) fail(ErrorCode::ConfigError, "Es/N0 grid values must be finite");
  if (target_errors < 1 || max_bits < 1 || chunk_bits < 1)
    fail(ErrorCode::ConfigError, "trial budget, error target and chunk size must be >= 1");
  if (threads < 0) fail(ErrorCode::ConfigError, "threads must be >= 0");
  if (!(transmitter_share >= 0.0 && transmitter_share <= 1.0))
    fail(ErrorCode::ConfigError, "transmitter_share must lie in [0, 1]");
  if (!(guard_value >= 0.0)) fail(ErrorCode::ConfigError, "guard_value must be >= 0");
  if (!(fs > 0.0)) fail(ErrorCode::ConfigError, "fs must be positive");
  for (double w : windows)
    if (!(w > 0.0)) fail(ErrorCode::ConfigError, "transient windows must be positive");
  for (double c : efficiency_couplings) coupling(c, "efficiency_couplings entries");
  if (!(transient_span > 0.0)) fail(ErrorCode::ConfigError, "transient_span must be positive");
  if (capture_bits < 1) fail(ErrorCode::ConfigError, "capture_bits must be >= 1");
  try {
    CircuitParams(components, k);
  } catch (const Error& e) {
    fail(ErrorCode::ConfigError, std::string("circuit: ") + e.what());
  }
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  c.preset = name;
  if (name == "paper-default") c.components = paper_default_components();
  else if (name == "paper-nominal") c.components = paper_nominal_components();
  else fail(ErrorCode::ConfigError, "unknown preset '" + name + "'");
  return c;
}

ExperimentConfig parse_config(const std::string& json_text) {
  return parse_config(json_text, ExperimentConfig{});
}

ExperimentConfig parse_config(const std::string& json_text, const ExperimentConfig& base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigError, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorCode::ConfigError, "config must be a JSON object");
  ExperimentConfig c = base;
  if (j.contains("preset")) {
    const std::string name = str(j["preset"], "preset");
    c.preset = name;
    c.components = preset_config(name).components;
  }
  for (const auto& [key, v] : j.items()) {
    if (key == "preset") continue;
    if (key == "components") {
      if (!v.is_object()) fail(ErrorCode::ConfigError, "config: 'components' must be an object");
      for (const auto& [ck, cv] : v.items()) {
        double* slot = ck == "C1"   ? &c.components.C1
                       : ck == "C2" ? &c.components.C2
                       : ck == "L1" ? &c.components.L1
                       : ck == "L2" ? &c.components.L2
                       : ck == "R1" ? &c.components.R1
                       : ck == "R2" ? &c.components.R2
                       : ck == "RS" ? &c.components.RS
                       : ck == "RL" ? &c.components.RL
                                    : nullptr;
        if (!slot) fail(ErrorCode::ConfigError, "config: unknown component '" + ck + "'");
        *slot = num(cv, ck);
      }
    } else if (key == "k") c.k = num(v, key);
    else if (key == "k_tx") c.k_tx = v.is_null() ? std::nullopt : std::optional(num(v, key));
    else if (key == "k_rx") c.k_rx = v.is_null() ? std::nullopt : std::optional(num(v, key));
    else if (key == "rates") c.rates = nums(v, key);
    else if (key == "guard_policy") {
      const std::string g = str(v, key);
      if (g == "ratio") c.guard_policy = GuardPolicy::Ratio;
      else if (g == "absolute") c.guard_policy = GuardPolicy::Absolute;
      else fail(ErrorCode::ConfigError, "config: guard_policy must be 'ratio' or 'absolute'");
    } else if (key == "guard_value") c.guard_value = num(v, key);
    else if (key == "kind" || key == "kinds") {
      c.kinds.clear();
      const json arr = v.is_array() ? v : json::array({v});
      for (const auto& e : arr) {
        try {
          c.kinds.push_back(waveform_kind_from_string(str(e, key)));
        } catch (const Error& err) {
          fail(ErrorCode::ConfigError, std::string("config: ") + err.what());
        }
      }
    } else if (key == "es_n0_db") c.es_n0_db = nums(v, key);
    else if (key == "noise_side") c.noise_side = noise_side_from_string(str(v, key));
    else if (key == "transmitter_share") c.transmitter_share = num(v, key);
    else if (key == "receiver") c.receiver = receiver_kind_from_string(str(v, key));
    else if (key == "receiver_timing") {
      const std::string t = str(v, key);
      if (t == "aligned") c.timing = ReceiverTiming::Aligned;
      else if (t == "group_delay") c.timing = ReceiverTiming::GroupDelay;
      else fail(ErrorCode::ConfigError, "config: receiver_timing must be 'aligned' or 'group_delay'");
    }
    else if (key == "target_errors") c.target_errors = count(v, key);
    else if (key == "max_bits") c.max_bits = count(v, key);
    else if (key == "chunk_bits") c.chunk_bits = static_cast<int>(count(v, key));
    else if (key == "threads") c.threads = static_cast<int>(count(v, key));
    else if (key == "seed") c.seed = count(v, key);
    else if (key == "fs") c.fs = num(v, key);
    else if (key == "tones") {
      const std::string t = str(v, key);
      if (t == "exact") c.tones = ToneRule::Exact;
      else if (t == "approx") c.tones = ToneRule::Approx;
      else fail(ErrorCode::ConfigError, "config: tones must be 'exact' or 'approx'");
    } else if (key == "k_estimates") c.k_estimates = nums(v, key);
    else if (key == "windows") c.windows = nums(v, key);
    else if (key == "efficiency_couplings") c.efficiency_couplings = nums(v, key);
    else if (key == "transient_span") c.transient_span = num(v, key);
    else if (key == "capture_bits") c.capture_bits = static_cast<int>(count(v, key));
    else fail(ErrorCode::ConfigError, "config: unknown key '" + key + "'");
  }
  c.validate();
  return c;
}

std::string config_to_json(const ExperimentConfig& c) {
  json j;
  j["preset"] = c.preset;
  j["components"] = {{"C1", c.components.C1}, {"C2", c.components.C2}, {"L1", c.components.L1},
                     {"L2", c.components.L2}, {"R1", c.components.R1}, {"R2", c.components.R2},
                     {"RS", c.components.RS}, {"RL", c.components.RL}};
  j["k"] = c.k;
  j["k_tx"] = c.k_tx ? json(*c.k_tx) : json(nullptr);
  j["k_rx"] = c.k_rx ? json(*c.k_rx) : json(nullptr);
  j["rates"] = c.rates;
  j["guard_policy"] = guard_name(c.guard_policy);
  j["guard_value"] = c.guard_value;
  json kinds = json::array();
  for (auto k : c.kinds) kinds.push_back(std::string(to_string(k)));
  j["kinds"] = kinds;
  j["es_n0_db"] = c.es_n0_db;
  j["noise_side"] = std::string(to_string(c.noise_side));
  j["transmitter_share"] = c.transmitter_share;
  j["receiver"] = std::string(to_string(c.receiver));
  j["receiver_timing"] = timing_name(c.timing);
  j["target_errors"] = c.target_errors;
  j["max_bits"] = c.max_bits;
  j["chunk_bits"] = c.chunk_bits;
  j["threads"] = c.threads;
  j["seed"] = c.seed;
  j["fs"] = c.fs;
  j["tones"] = tone_name(c.tones);
  j["k_estimates"] = c.k_estimates;
  j["windows"] = c.windows;
  j["efficiency_couplings"] = c.efficiency_couplings;
  j["transient_span"] = c.transient_span;
  j["capture_bits"] = c.capture_bits;
  // nlohmann::json objects are key-sorted, so dump() is canonical.
  return j.dump();
}

std::uint64_t config_hash(const ExperimentConfig& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : config_to_json(cfg)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return h;
}

ExperimentConfig default_config(const std::string& experiment) {
  ExperimentConfig c;
  if (experiment == "ber") {
    c.rates = {20e3, 50e3, 100e3, 200e3};
    c.kinds = {WaveformKind::FSK, WaveformKind::RFSK_BIPOLAR};
    c.es_n0_db = {0, 2, 4, 6, 8, 10, 12};
  } else if (experiment == "mismatch") {
    c.rates = {10e3};
    c.k_estimates = {0.3, 0.35, 0.4, 0.45, 0.5};
    c.es_n0_db = {0, 2, 4, 6, 8, 10, 12};
    c.tones = ToneRule::Approx;
  } else if (experiment == "offpeak") {
    c.rates = {300e3};
    c.es_n0_db = {8, 10, 12, 14, 16, 18};
    c.max_bits = 2'000'000;
  } else if (experiment == "decode") {
    c.rates = {20e3, 50e3, 100e3};
  }
  return c;
}

// ---------------------------------------------------------------------------
// Output

std::string record_to_json(const ResultRecord& r) {
  json j;
  j["experiment"] = r.experiment;
  j["config_hash"] = hex64(r.config_hash);
  j["seed"] = r.seed;
  j["runtime_seconds"] = r.runtime_seconds;
  json m = json::object();
  for (const auto& [k, v] : r.metrics) m[k] = std::isfinite(v) ? json(v) : json(nullptr);
  j["metrics"] = m;
  j["notes"] = r.notes;
  json files = json::array();
  for (const auto& t : r.tables) files.push_back(r.experiment + "_" + t.name + ".csv");
  j["tables"] = files;
  return j.dump(2);
}

void write_outputs(const ResultRecord& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& t : r.tables) {
    const auto path = dir / (r.experiment + "_" + t.name + ".csv");
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) fail(ErrorCode::InvalidArgument, "cannot write " + path.string());
    for (const auto& [k, v] : r.notes) os << "# " << k << ": " << v << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(row[i]);
      os << '\n';
    }
  }
  const auto path = dir / (r.experiment + ".json");
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) fail(ErrorCode::InvalidArgument, "cannot write " + path.string());
  os << record_to_json(r) << '\n';
}

// ---------------------------------------------------------------------------
// Shared setup

CircuitParams circuit(const ExperimentConfig& cfg, std::optional<double> k) {
  return CircuitParams(cfg.components, k.value_or(cfg.k));
}

std::pair<double, double> tones_for(const CircuitParams& p, ToneRule rule) {
  if (rule == ToneRule::Exact) {
    if (const auto w = real_gain_frequencies(derive_transfer_function(p)))
      return {w->first / kTwoPi, w->second / kTwoPi};
  }
  return peak_frequencies_approx(p.k(), p.f0());
}

ModemConfig modem_for(const ExperimentConfig& cfg, double f_minus, double f_plus, double rate,
                      WaveformKind kind) {
  if (cfg.guard_policy == GuardPolicy::Ratio)
    return ModemConfig::for_rate(f_minus, f_plus, rate, kind, cfg.fs, cfg.guard_value);
  ModemConfig m;
  m.f_minus = f_minus;
  m.f_plus = f_plus;
  m.kind = kind;
  m.samples_per_symbol = static_cast<int>(std::lround(cfg.fs / rate));
  if (m.samples_per_symbol < 1) fail(ErrorCode::ConfigError, "rate too high for fs");
  m.fs = m.samples_per_symbol * rate;
  m.guard_samples = static_cast<int>(std::lround(cfg.guard_value * m.fs));
  m.validate();
  return m;
}

LinkSetup link_for(const ExperimentConfig& cfg, const TransferFunction& tf, const ModemConfig& m) {
  LinkSetup s;
  s.channel = tf;
  s.modem = m;
  s.receiver = cfg.receiver;
  s.side = cfg.noise_side;
  s.transmitter_share = cfg.transmitter_share;
  if (cfg.timing == ReceiverTiming::GroupDelay && cfg.receiver == ReceiverKind::Coherent)
    s.timing_offset = std::clamp(group_delay_samples(tf, m.f_minus, m.f_plus, m.fs), 0,
                                 m.samples_per_symbol - 1);
  return s;
}

double snr_at_ber(const std::vector<BerPoint>& curve, double ber) {
  std::vector<BerPoint> pts;
  for (const auto& p : curve)
    if (p.errors > 0 && p.ber > 0.0) pts.push_back(p);
  std::sort(pts.begin(), pts.end(),
            [](const BerPoint& a, const BerPoint& b) { return a.es_n0_db < b.es_n0_db; });
  const double y = std::log10(ber);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double y0 = std::log10(pts[i].ber), y1 = std::log10(pts[i + 1].ber);
    if (y0 == y1) {
      if (y == y0) return pts[i].es_n0_db;
      continue;
    }
    if ((y0 - y) * (y1 - y) <= 0.0)
      return pts[i].es_n0_db + (y - y0) / (y1 - y0) * (pts[i + 1].es_n0_db - pts[i].es_n0_db);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// ---------------------------------------------------------------------------
// Experiments

ResultRecord run_analyze(const ExperimentConfig& cfg) {
  cfg.validate();
  const Stopwatch sw;
  ResultRecord r = new_record(cfg, "analyze");
  const CircuitParams p = circuit(cfg);
  const TransferFunction tf = derive_transfer_function(p);
  const PeakAnalysis pa = peak_frequencies_exact(tf);
  const auto [fa_m, fa_p] = peak_frequencies_approx(p.k(), p.f0());
  const auto [ft_m, ft_p] = tones_for(p, cfg.tones);
  auto& m = r.metrics;
  m["f0_hz"] = p.f0();
  m["k"] = p.k();
  m["Q1"] = p.Q1();
  m["Q2"] = p.Q2();
  m["split"] = pa.split ? 1.0 : 0.0;
  try {
    m["k_split"] = find_k_split(cfg.components);
  } catch (const Error&) {
    m["k_split"] = std::numeric_limits<double>::quiet_NaN();
  }
  m["f_minus_hz"] = pa.f_minus;
  m["f_plus_hz"] = pa.f_plus;
  m["f_max_minus_hz"] = pa.f_max_minus;
  m["f_max_plus_hz"] = pa.f_max_plus;
  m["mag_minus"] = pa.mag_minus;
  m["mag_plus"] = pa.mag_plus;
  m["phase_minus_rad"] = pa.phase_minus;
  m["phase_plus_rad"] = pa.phase_plus;
  m["f_minus_approx_hz"] = fa_m;
  m["f_plus_approx_hz"] = fa_p;
  m["peak_ratio_approx"] = peak_ratio(p.k());
  m["tone_minus_hz"] = ft_m;
  m["tone_plus_hz"] = ft_p;
  m["eta_minus"] = solve_steady_state(p, kTwoPi * ft_m).eta;
  m["eta_0"] = solve_steady_state(p, p.omega0()).eta;
  m["eta_plus"] = solve_steady_state(p, kTwoPi * ft_p).eta;
  const PolePairs poles = find_poles(tf);
  m["pole1_sigma"] = poles.first.real();
  m["pole1_omega"] = poles.first.imag();
  m["pole2_sigma"] = poles.second.real();
  m["pole2_omega"] = poles.second.imag();
  m["pole_residual"] = poles.residual;

  const double Ts = 1.0 / cfg.fs;
  const ImpulseResponse ir = impulse_response(tf, Ts, 100e-6);
  const FirChannel fir = fir_from_impulse_response(ir);
  m["T_eff_s"] = ir.T_eff;
  m["taps"] = static_cast<double>(fir.taps.size());
  m["tap_energy"] = fir.energy();

  Table taps{"taps", {"l", "t_seconds", "h_l"}, {}};
  for (std::size_t l = 0; l < fir.taps.size(); ++l)
    taps.add({std::to_string(l), fmt(static_cast<double>(l) * Ts), fmt(fir.taps[l])});
  Table resp{"response", {"f_hz", "mag", "phase_rad", "eta"}, {}};
  for (int i = 0; i <= 1500; ++i) {
    const double f = 0.5e6 + 1e3 * i;
    const cdouble h = eval_H(tf, kTwoPi * f);
    resp.add({fmt(f), fmt(std::abs(h)), fmt(std::arg(h)), fmt(solve_steady_state(p, kTwoPi * f).eta)});
  }
  r.tables = {std::move(taps), std::move(resp)};
  r.notes["tones"] = tone_name(cfg.tones);
  r.runtime_seconds = sw.seconds();
  return r;
}

ResultRecord run_ber_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const Stopwatch sw;
  ResultRecord r = new_record(cfg, "ber");
  const CircuitParams p = circuit(cfg);
  const auto [fm, fp] = tones_for(p, cfg.tones);
  Table links = link_table();
  Table ber{"curves", ber_columns({"kind", "rate"}), {}};
  for (std::size_t ri = 0; ri < cfg.rates.size(); ++ri) {
    for (WaveformKind kind : cfg.kinds) {
      LinkSetup s = link_for(cfg, derive_transfer_function(p), modem_for(cfg, fm, fp, cfg.rates[ri], kind));
      const std::string label = std::string(to_string(kind)) + "_" + key_of(cfg.rates[ri]);
      // Same point indices for every kind: the kinds see common noise streams.
      const Curve c = sweep(cfg, s, 1000 * ri, label);
      add_link_row(links, label, cfg.rates[ri], c.modem);
      for (const auto& pt : c.points)
        add_ber_row(ber, {std::string(to_string(kind)), fmt(cfg.rates[ri])}, pt);
      for (double target : {1e-3, 1e-4})
        r.metrics["gap_db_" + label + "_at_" + key_of(target)] =
            snr_at_ber(c.points, target) - required_theory_db(target);
    }
  }
  r.tables = {std::move(ber), std::move(links)};
  r.notes["es_n0"] = kEsN0Note;
  r.notes["receiver"] = std::string(to_string(cfg.receiver));
  r.notes["noise_side"] = std::string(to_string(cfg.noise_side));
  r.notes["theory"] = "binary orthogonal signalling, 0.5 erfc(sqrt(Es/(2 N0)))";
  r.runtime_seconds = sw.seconds();
  return r;
}

ResultRecord run_noise_side_equivalence(const ExperimentConfig& cfg) {
  cfg.validate();
  const Stopwatch sw;
  ResultRecord r = new_record(cfg, "noise_side");
  const CircuitParams p = circuit(cfg);
  const auto [fm, fp] = tones_for(p, cfg.tones);
  Table ber{"curves", ber_columns({"side", "rate"}), {}};
  Table links = link_table();
  double worst = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t ri = 0; ri < cfg.rates.size(); ++ri) {
    std::vector<Curve> curves;
    for (NoiseSide side : {NoiseSide::Receiver, NoiseSide::Transmitter}) {
      LinkSetup s = link_for(cfg, derive_transfer_function(p), modem_for(cfg, fm, fp, cfg.rates[ri], cfg.kinds.front()));
      s.side = side;
      const LinkSimulator sim(s);
      const NoiseMeasurement nm = sim.measure_correlator_noise(cfg.es_n0_db.front(), 20000, cfg.seed);
      const std::string label = std::string(to_string(side)) + "_" + key_of(cfg.rates[ri]);
      r.metrics["correlator_var_" + label] = nm.var_difference;
      curves.push_back(sweep(cfg, s, 1000 * ri, label));
      add_link_row(links, label, cfg.rates[ri], s.modem);
      for (const auto& pt : curves.back().points)
        add_ber_row(ber, {std::string(to_string(side)), fmt(cfg.rates[ri])}, pt);
    }
    const std::string rk = key_of(cfg.rates[ri]);
    r.metrics["correlator_var_ratio_" + rk] =
        r.metrics["correlator_var_transmitter_" + rk] / r.metrics["correlator_var_receiver_" + rk];
    const double gap = max_curve_gap(curves[0].points, curves[1].points, 20);
    r.metrics["max_gap_db_" + rk] = gap;
    if (!std::isnan(gap)) worst = std::isnan(worst) ? gap : std::max(worst, gap);
  }
  r.metrics["max_gap_db"] = worst;
  r.tables = {std::move(ber), std::move(links)};
  r.notes["es_n0"] = kEsN0Note;
  r.notes["matching"] = "transmitter noise scaled so its PSD at the tones (mean |H|^2) equals N0";
  r.runtime_seconds = sw.seconds();
  return r;
}

ResultRecord run_mismatch_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  const Stopwatch sw;
  ResultRecord r = new_record(cfg, "mismatch");
  const CircuitParams p = circuit(cfg);
  std::vector<double> estimates = cfg.k_estimates;
  if (cfg.k_tx) estimates = {*cfg.k_tx};
  Table ber{"curves", ber_columns({"k_estimate", "rate"}), {}};
  Table links = link_table();
  for (std::size_t ri = 0; ri < cfg.rates.size(); ++ri) {
    std::vector<Curve> curves;
    for (std::size_t ei = 0; ei < estimates.size(); ++ei) {
      const auto [fm, fp] = peak_frequencies_approx(estimates[ei], p.f0());
      LinkSetup s = link_for(cfg, derive_transfer_function(p), modem_for(cfg, fm, fp, cfg.rates[ri], cfg.kinds.front()));
      const std::string label = "k" + key_of(estimates[ei]) + "_" + key_of(cfg.rates[ri]);
      curves.push_back(sweep(cfg, s, 1000 * ri, label));
      add_link_row(links, label, cfg.rates[ri], s.modem);
      for (const auto& pt : curves.back().points)
        add_ber_row(ber, {fmt(estimates[ei]), fmt(cfg.rates[ri])}, pt);
      const auto& last = curves.back().points;
      const auto best = std::min_element(last.begin(), last.end(), [](const auto& a, const auto& b) {
        return a.ci.hi < b.ci.hi;
      });
      r.metrics["min_ci_hi_" + label] = best->ci.hi;
    }
    // Under- versus overestimation at equal |dk| around the true k.
    int violations = 0, separated = 0;
    for (std::size_t a = 0; a < estimates.size(); ++a)
      for (std::size_t b = 0; b < estimates.size(); ++b) {
        const double du = cfg.k - estimates[a], dov = estimates[b] - cfg.k;
        if (!(du > 0.0 && std::abs(du - dov) < 1e-9)) continue;
        for (std::size_t i = 0; i < cfg.es_n0_db.size(); ++i) {
          const BerPoint& u = curves[a].points[i];
          const BerPoint& o = curves[b].points[i];
          if (u.ci.hi < o.ci.lo || o.ci.hi < u.ci.lo) {
            ++separated;
            violations += u.ber > o.ber;
          }
        }
      }
    r.metrics["separated_points_" + key_of(cfg.rates[ri])] = separated;
    r.metrics["under_worse_points_" + key_of(cfg.rates[ri])] = violations;
  }
  r.tables = {std::move(ber), std::move(links)};
  r.notes["es_n0"] = kEsN0Note;
  r.notes["tones"] = "approximate peaks from the estimate, channel at the true coupling";
  r.runtime_seconds = sw.seconds();
  return r;
}

ResultRecord run_offpeak_cases(const ExperimentConfig& cfg) {
  cfg.validate();
  const Stopwatch sw;
  ResultRecord r = new_record(cfg, "offpeak");
  struct Case {
    std::string name;
    CircuitParams p;
    ToneRule rule;
  };
  const CircuitParams base = circuit(cfg);
  const std::vector<Case> cases{{"case_i", base.with_coupling(0.2), ToneRule::Exact},
                                {"case_ii", base.with_coupling(0.4).with_load(40.0), ToneRule::Approx}};
  Table ber{"curves", ber_columns({"case", "rate", "timing"}), {}};
  Table links = link_table();
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    const Case& c = cases[ci];
    const TransferFunction tf = derive_transfer_function(c.p);
    const auto [fm, fp] = tones_for(c.p, c.rule);
    r.metrics[c.name + "_f_minus_hz"] = fm;
    r.metrics[c.name + "_f_plus_hz"] = fp;
    r.metrics[c.name + "_mag_minus"] = std::abs(eval_H(tf, kTwoPi * fm));
    r.metrics[c.name + "_mag_plus"] = std::abs(eval_H(tf, kTwoPi * fp));
    r.metrics[c.name + "_split"] = peak_frequencies_exact(tf).split ? 1.0 : 0.0;
    for (std::size_t ri = 0; ri < cfg.rates.size(); ++ri) {
      const ModemConfig m = modem_for(cfg, fm, fp, cfg.rates[ri], cfg.kinds.front());
      // The configured timing gives the headline figure; a group-delay
      // aligned receiver is reported alongside as a sensitivity check.
      std::vector<ReceiverTiming> timings{cfg.timing};
      if (cfg.timing == ReceiverTiming::Aligned && cfg.receiver == ReceiverKind::Coherent)
        timings.push_back(ReceiverTiming::GroupDelay);
      for (std::size_t ti = 0; ti < timings.size(); ++ti) {
        ExperimentConfig tc = cfg;
        tc.timing = timings[ti];
        const LinkSetup s = link_for(tc, tf, m);
        const std::string label =
            c.name + "_" + key_of(cfg.rates[ri]) + (ti == 0 ? "" : "_group_delay");
        const Curve curve = sweep(cfg, s, 1000 * (ci * cfg.rates.size() + ri), label);
        add_link_row(links, label, cfg.rates[ri], s.modem);
        r.metrics["timing_offset_" + label] = s.timing_offset;
        for (const auto& pt : curve.points)
          add_ber_row(ber, {c.name, fmt(cfg.rates[ri]), timing_name(tc.timing)}, pt);
        try {
          const Extrapolation e = extrapolate_required_snr(curve.points, 1e-6, 20);
          r.metrics["required_db_" + label] = e.es_n0_db;
          r.metrics["fit_gain_" + label] = e.gain;
          r.metrics["fit_points_" + label] = e.points_used;
        } catch (const Error&) {
          r.metrics["required_db_" + label] = std::numeric_limits<double>::quiet_NaN();
        }
      }
    }
  }
  r.tables = {std::move(ber), std::move(links)};
  r.notes["es_n0"] = kEsN0Note;
  r.notes["required_db"] = "extrapolated to BER 1e-6 by fitting Pb = Q(sqrt(g Es/N0))";
  r.notes["case_i"] = "k = 0.2, tones where H is real";
  r.notes["case_ii"] = "RL = 40 ohm, k = 0.4, approximate peak tones";
  r.runtime_seconds = sw.seconds();
  return r;
}

ResultRecord run_efficiency_report(const ExperimentConfig& cfg) {
  cfg.validate();
  const Stopwatch sw;
  ResultRecord r = new_record(cfg, "efficiency");
  const CircuitParams p = circuit(cfg);
  std::vector<double> grid;
  for (int i = 0; i <= 1500; ++i) grid.push_back(kTwoPi * (0.5e6 + 1e3 * i));
  Table curve{"curves", {"k", "f_hz", "eta"}, {}};
  for (double k : cfg.efficiency_couplings) {
    const auto pts = efficiency_curve(p.with_coupling(k), grid);
    double best = -1.0, argmax = 0.0;
    for (const auto& e : pts) {
      curve.add({fmt(k), fmt(e.omega / kTwoPi), fmt(e.eta)});
      if (e.eta > best) best = e.eta, argmax = e.omega / kTwoPi;
    }
    r.metrics["eta_max_k" + key_of(k)] = best;
    r.metrics["eta_argmax_hz_k" + key_of(k)] = argmax;
  }

  const auto [fm, fp] = tones_for(p, cfg.tones);
  const WaveformKind kind = cfg.kinds.front();
  r.metrics["eta_minus_phasor"] = solve_steady_state(p, kTwoPi * fm).eta;
  r.metrics["eta_0_phasor"] = solve_steady_state(p, p.omega0()).eta;
  r.metrics["eta_plus_phasor"] = solve_steady_state(p, kTwoPi * fp).eta;
  r.metrics["eta_minus_transient"] = steady_state_settle(p, fm, 200, kind).eta_last_cycle;
  r.metrics["eta_0_transient"] = steady_state_settle(p, p.f0(), 200, kind).eta_last_cycle;
  r.metrics["eta_plus_transient"] = steady_state_settle(p, fp, 200, kind).eta_last_cycle;

  Table tr{"transient", {"window_s", "eta_plus_to_minus", "eta_minus_to_plus", "average"}, {}};
  for (double w : cfg.windows) {
    const double down = transient_efficiency(p, Transition::PlusToMinus, w, kind);
    const double up = transient_efficiency(p, Transition::MinusToPlus, w, kind);
    tr.add({fmt(w), fmt(down), fmt(up), fmt(0.5 * (down + up))});
    r.metrics["eta_T_down_" + key_of(w)] = down;
    r.metrics["eta_T_up_" + key_of(w)] = up;
    r.metrics["eta_T_average_" + key_of(w)] = 0.5 * (down + up);
  }
  r.tables = {std::move(curve), std::move(tr)};
  r.notes["tones"] = tone_name(cfg.tones);
  r.notes["kind"] = std::string(to_string(kind));
  r.notes["window"] = "starts at the tone switch; the old tone is settled beforehand";
  r.runtime_seconds = sw.seconds();
  return r;
}

double output_power_ratio(const CircuitParams& p, const ModemConfig& m, int nbits,
                          std::uint64_t seed) {
  const auto bits = random_bits(seed, nbits);
  IntegrateOptions opt;
  opt.record_stride = 4;
  const auto run = integrate(p, symbol_drive(make_frame(bits, m), m, m.kind), 0.0,
                             m.T() * static_cast<double>(nbits), default_step(p), opt);
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < run.t.size(); ++i) {
    if (run.t[i] < m.T()) continue;
    sum += run.v2[i] * run.v2[i];
    ++n;
  }
  double steady = 0.0;
  for (std::size_t k = 1; k < bits.size(); ++k)
    steady += std::norm(solve_steady_state(p, kTwoPi * m.tone(bits[k])).V2);
  steady /= static_cast<double>(bits.size() - 1);
  return (sum / static_cast<double>(n)) / steady;
}

ResultRecord run_transient_study(const ExperimentConfig& cfg) {
  cfg.validate();
  const Stopwatch sw;
  ResultRecord r = new_record(cfg, "transient");
  const CircuitParams p = circuit(cfg);
  const auto [fm, fp] = tones_for(p, cfg.tones);
  for (WaveformKind kind : cfg.kinds) {
    const std::string kn(to_string(kind));
    for (Transition t : {Transition::PlusToMinus, Transition::MinusToPlus}) {
      const bool down = t == Transition::PlusToMinus;
      const std::string name = std::string(down ? "plus_to_minus_" : "minus_to_plus_") + kn;
      const TransientResult run = run_transition(p, t, cfg.transient_span, kind);
      const double f_new = down ? fm : fp;
      const double amp = std::sqrt(2.0) * std::abs(solve_steady_state(p, kTwoPi * f_new).V2);
      r.metrics["eta_T_" + name] = run.eta_T();
      r.metrics["settling_s_" + name] = settling_time(run, f_new, amp);
      Table tab{name, {"t", "v1", "i1", "v2", "i2"}, {}};
      for (std::size_t i = 0; i < run.t.size(); ++i)
        tab.add({fmt(run.t[i]), fmt(run.v1[i]), fmt(run.i1[i]), fmt(run.v2[i]), fmt(run.i2[i])});
      r.tables.push_back(std::move(tab));
    }
  }
  ImpulseResponse ir = impulse_response(derive_transfer_function(p), 1.0 / cfg.fs, 100e-6);
  const double rate = std::min(1.0 / (10.0 * ir.T_eff), cfg.rates.front());
  const ModemConfig m = modem_for(cfg, fm, fp, rate, cfg.kinds.front());
  r.metrics["T_eff_s"] = ir.T_eff;
  r.metrics["power_ratio_rate"] = rate;
  r.metrics["power_ratio"] = output_power_ratio(p, m, 40, cfg.seed);
  r.notes["window"] = "t = 0 is the tone switch; the old tone is settled beforehand";
  r.notes["settling"] = "time after which the per-period |v2| peak stays within 5% of steady state";
  r.runtime_seconds = sw.seconds();
  return r;
}

// ---------------------------------------------------------------------------
// Captures

SyntheticCapture make_synthetic_capture(const ExperimentConfig& cfg, double rate, int nbits,
                                        bool alternating, double es_n0_db, std::uint64_t seed) {
  if (nbits < 1) fail(ErrorCode::InvalidArgument, "capture needs at least one bit");
  const CircuitParams p = circuit(cfg);
  const auto [fm, fp] = tones_for(p, cfg.tones);
  const ModemConfig m = modem_for(cfg, fm, fp, rate, cfg.kinds.front());
  SyntheticCapture c;
  if (alternating) {
    c.bits.resize(static_cast<std::size_t>(nbits));
    for (std::size_t i = 0; i < c.bits.size(); ++i) c.bits[i] = static_cast<std::uint8_t>(i & 1u);
  } else {
    c.bits = random_bits(derive_seed(seed, 0xCA97), nbits);
  }
  const ModalChannel ch(derive_transfer_function(p), 1.0 / m.fs);
  c.samples = ch.filter(transmit(c.bits, m));
  if (std::isfinite(es_n0_db)) {
    double es = 0.0;
    std::size_t n = 0;
    for (std::size_t k = 0; k < c.bits.size(); ++k)
      for (int i = m.guard_samples; i < m.samples_per_symbol; ++i, ++n) {
        const double v = c.samples[k * static_cast<std::size_t>(m.samples_per_symbol) + static_cast<std::size_t>(i)];
        es += v * v;
      }
    es = es / static_cast<double>(n) * m.Tu();
    const double n0 = es / std::pow(10.0, es_n0_db / 10.0);
    Rng rng(derive_seed(seed, 0x9015E));
    add_gaussian(rng, c.samples, std::sqrt(n0 * m.fs / 2.0));
  }
  c.header.format = SampleFormat::Int8;
  c.header.fs = m.fs;
  c.header.T = m.T();
  c.header.Tg = m.Tg();
  c.header.kind = m.kind;
  c.header.f_minus = m.f_minus;
  c.header.f_plus = m.f_plus;
  c.header.scale = int8_scale_for(c.samples);
  c.quantized = quantize_int8(c.samples, c.header.scale);
  return c;
}

DecodeReport decode_capture(const std::filesystem::path& data, const ExperimentConfig& cfg,
                            const std::optional<std::vector<std::uint8_t>>& reference) {
  Waveform w = read_waveform(data);
  const CircuitParams p = circuit(cfg);
  std::optional<double> fm, fp;
  if (!w.header.f_minus || !w.header.f_plus) {
    const auto t = tones_for(p, cfg.tones);
    fm = t.first;
    fp = t.second;
  }
  const ModemConfig m = modem_config_from(w.header, fm, fp);
  const auto n = static_cast<std::size_t>(m.samples_per_symbol);
  const std::size_t symbols = w.samples.size() / n;
  if (symbols == 0) fail(ErrorCode::FormatError, "capture is shorter than one symbol");
  w.samples.resize(symbols * n);

  FilterBankSpecs specs;
  specs.fs = m.fs;
  specs.f0 = p.f0();
  const NoncoherentDecision d = noncoherent_demod(w.samples, m, design_filterbank(specs));
  DecodeReport rep;
  rep.bits = d.bits;
  rep.mean_lowpass = d.mean_lowpass;
  rep.mean_bandpass = d.mean_bandpass;
  rep.low_confidence.resize(d.bits.size());
  for (std::size_t k = 0; k < d.bits.size(); ++k) {
    const double lp = d.mean_lowpass[k], bp = d.mean_bandpass[k];
    rep.low_confidence[k] = std::abs(bp - lp) <= 1e-3 * (bp + lp);
  }
  if (reference) {
    if (reference->size() != rep.bits.size())
      fail(ErrorCode::LengthMismatch, "reference has " + std::to_string(reference->size()) +
                                          " bits, capture holds " + std::to_string(rep.bits.size()));
    std::uint64_t e = 0;
    for (std::size_t k = 0; k < rep.bits.size(); ++k) e += rep.bits[k] != (*reference)[k];
    rep.errors = e;
    rep.ber = static_cast<double>(e) / static_cast<double>(rep.bits.size());
  }
  return rep;
}

namespace {

std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) fail(ErrorCode::FormatError, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void add_trace_rows(Table& t, const std::string& source, const DecodeReport& rep,
                    const std::optional<std::vector<std::uint8_t>>& ref) {
  for (std::size_t k = 0; k < rep.bits.size(); ++k)
    t.add({source, std::to_string(k), std::to_string(rep.bits[k]),
           ref ? std::to_string((*ref)[k]) : std::string(""), fmt(rep.mean_lowpass[k]),
           fmt(rep.mean_bandpass[k]), rep.low_confidence[k] ? "1" : "0"});
}

void summarise(ResultRecord& r, const std::string& label, const DecodeReport& rep) {
  r.metrics["bits_" + label] = static_cast<double>(rep.bits.size());
  r.metrics["low_confidence_" + label] = static_cast<double>(
      std::count(rep.low_confidence.begin(), rep.low_confidence.end(), true));
  if (rep.errors) {
    r.metrics["errors_" + label] = static_cast<double>(*rep.errors);
    r.metrics["ber_" + label] = *rep.ber;
  }
}

}  // namespace

ResultRecord run_decode(const ExperimentConfig& cfg, const std::filesystem::path& dir,
                        const std::optional<std::filesystem::path>& capture,
                        const std::optional<std::filesystem::path>& reference_bits) {
  cfg.validate();
  const Stopwatch sw;
  ResultRecord r = new_record(cfg, "decode");
  Table traces{"traces", {"source", "symbol", "bit", "reference", "mean_lowpass", "mean_bandpass",
                          "low_confidence"}, {}};
  if (capture) {
    std::optional<std::vector<std::uint8_t>> ref;
    if (reference_bits) ref = parse_bits(read_text(*reference_bits));
    const DecodeReport rep = decode_capture(*capture, cfg, ref);
    const std::string label = capture->filename().string();
    add_trace_rows(traces, label, rep, ref);
    summarise(r, "capture", rep);
    r.notes["capture"] = label;
    r.notes["bits"] = format_bits(rep.bits);
  } else {
    std::filesystem::create_directories(dir);
    for (std::size_t ri = 0; ri < cfg.rates.size(); ++ri) {
      const std::string rk = key_of(cfg.rates[ri]);
      const SyntheticCapture c = make_synthetic_capture(
          cfg, cfg.rates[ri], cfg.capture_bits, false, std::numeric_limits<double>::infinity(),
          derive_seed(cfg.seed, ri));
      const auto s8 = dir / ("capture_" + rk + ".s8");
      write_capture(s8, c.quantized, c.header);
      write_waveform(dir / ("waveform_" + rk + ".f32"), c.samples, c.header);
      std::ofstream(dir / ("capture_" + rk + ".bits"), std::ios::trunc) << format_bits(c.bits) << '\n';
      const DecodeReport rep = decode_capture(s8, cfg, c.bits);
      add_trace_rows(traces, s8.filename().string(), rep, c.bits);
      summarise(r, rk, rep);
    }
    // Penalties at 12 dB: 8-bit input and noncoherent detection.
    const CircuitParams p = circuit(cfg);
    const auto [fm, fp] = tones_for(p, cfg.tones);
    LinkSetup s;
    s.channel = derive_transfer_function(p);
    s.modem = modem_for(cfg, fm, fp, cfg.rates.front(), cfg.kinds.front());
    const double db = 12.0;
    const BerPoint coherent = LinkSimulator(s).run(db, stop_rule(cfg), cfg.seed, 7001);
    s.receiver = ReceiverKind::Noncoherent;
    const BerPoint nc_float = LinkSimulator(s).run(db, stop_rule(cfg), cfg.seed, 7002);
    s.quantize = true;
    const BerPoint nc_int8 = LinkSimulator(s).run(db, stop_rule(cfg), cfg.seed, 7002);
    Table pen{"penalty", ber_columns({"receiver", "input"}), {}};
    add_ber_row(pen, {"coherent", "float"}, coherent);
    add_ber_row(pen, {"noncoherent", "float"}, nc_float);
    add_ber_row(pen, {"noncoherent", "int8"}, nc_int8);
    r.metrics["penalty_rate"] = cfg.rates.front();
    r.metrics["ber_coherent_12db"] = coherent.ber;
    r.metrics["ber_noncoherent_float_12db"] = nc_float.ber;
    r.metrics["ber_noncoherent_int8_12db"] = nc_int8.ber;
    r.tables.push_back(std::move(pen));
    r.notes["es_n0"] = kEsN0Note;
  }
  r.tables.insert(r.tables.begin(), std::move(traces));
  r.notes["receiver"] = "noncoherent lowpass/bandpass filterbank; ties decide 0";
  r.notes["low_confidence"] = "|bandpass - lowpass| <= 1e-3 (bandpass + lowpass)";
  r.runtime_seconds = sw.seconds();
  return r;
}

}  // namespace swipt
