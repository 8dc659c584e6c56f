// Command line front end for the reproduction experiments.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "swipt/error.hpp"
#include "swipt/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
  std::string out = "out";
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("-c,--config", f.config, "JSON experiment config")->check(CLI::ExistingFile);
  cmd->add_option("-s,--seed", f.seed, "master RNG seed (overrides the config)");
  cmd->add_option("-j,--threads", f.threads, "worker threads, 0 = all cores");
  cmd->add_option("-o,--out", f.out, "output directory")->capture_default_str();
}

swipt::ExperimentConfig load(const std::string& experiment, const CommonFlags& f) {
  swipt::ExperimentConfig cfg = swipt::default_config(experiment);
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) swipt::fail(swipt::ErrorCode::ConfigError, "cannot read " + f.config);
    std::stringstream ss;
    ss << in.rdbuf();
    cfg = swipt::parse_config(ss.str(), cfg);
  }
  if (f.seed) cfg.seed = *f.seed;
  if (f.threads) cfg.threads = *f.threads;
  cfg.validate();
  return cfg;
}

int report_error(std::string_view code, const std::string& message, int status) {
  nlohmann::json j;
  j["error"] = {{"code", code}, {"message", message}};
  std::cerr << j.dump() << '\n';
  return status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inductive-link FSK modem: channel analysis and Monte Carlo experiments"};
  app.require_subcommand(1);

  CommonFlags flags;
  auto* analyze = app.add_subcommand("analyze", "circuit report, tap dump and frequency response");
  auto* ber = app.add_subcommand("ber", "BER sweep over rates, kinds and Es/N0");
  bool noise_sides = false;
  ber->add_flag("--noise-sides", noise_sides,
                "compare transmitter-side and receiver-side noise instead");
  auto* mismatch = app.add_subcommand("mismatch", "BER under coupling-estimate mismatch");
  auto* offpeak = app.add_subcommand("offpeak", "300 kbps off-peak cases with extrapolation");
  auto* efficiency = app.add_subcommand("efficiency", "efficiency curves and transient efficiency");
  auto* transient = app.add_subcommand("transient", "tone-switch waveforms and settling");
  auto* decode = app.add_subcommand("decode", "noncoherent decoding of 8-bit captures");
  std::string capture, reference;
  decode->add_option("--capture", capture, "capture file (sidecar <file>.hdr)")
      ->check(CLI::ExistingFile);
  decode->add_option("--reference", reference, "reference bit string file")
      ->check(CLI::ExistingFile);
  for (auto* cmd : {analyze, ber, mismatch, offpeak, efficiency, transient, decode})
    add_common(cmd, flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("UsageError", e.what(), 2);
  }

  try {
    CLI::App* cmd = app.get_subcommands().front();
    const std::string name = cmd->get_name();
    const swipt::ExperimentConfig cfg = load(name, flags);
    swipt::ResultRecord rec;
    if (name == "analyze") rec = swipt::run_analyze(cfg);
    else if (name == "ber") rec = noise_sides ? swipt::run_noise_side_equivalence(cfg) : swipt::run_ber_sweep(cfg);
    else if (name == "mismatch") rec = swipt::run_mismatch_sweep(cfg);
    else if (name == "offpeak") rec = swipt::run_offpeak_cases(cfg);
    else if (name == "efficiency") rec = swipt::run_efficiency_report(cfg);
    else if (name == "transient") rec = swipt::run_transient_study(cfg);
    else {
      std::optional<std::filesystem::path> cap, ref;
      if (!capture.empty()) cap = capture;
      if (!reference.empty()) ref = reference;
      if (ref && !cap)
        swipt::fail(swipt::ErrorCode::ConfigError, "--reference needs --capture");
      rec = swipt::run_decode(cfg, flags.out, cap, ref);
    }
    swipt::write_outputs(rec, flags.out);
    std::cout << swipt::record_to_json(rec) << '\n';
    return EXIT_SUCCESS;
  } catch (const swipt::Error& e) {
    return report_error(swipt::to_string(e.code()), e.what(),
                        e.code() == swipt::ErrorCode::ConfigError ? 2 : 1);
  } catch (const std::exception& e) {
    return report_error("InternalError", e.what(), 1);
  }
}
