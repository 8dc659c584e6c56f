#include <benchmark/benchmark.h>

#include <cstdint>
#include <random>
#include <vector>

#include "swipt/ber_engine.hpp"
#include "swipt/circuit_model.hpp"
#include "swipt/discrete_channel.hpp"
#include "swipt/filter_design.hpp"
#include "swipt/modem.hpp"
#include "swipt/transient_sim.hpp"

namespace {

using namespace swipt;

CircuitParams default_circuit() { return {paper_default_components(), 0.4}; }

ModemConfig modem_at(double rate) {
  const auto w = real_gain_frequencies(derive_transfer_function(default_circuit()));
  return ModemConfig::for_rate(w->first / kTwoPi, w->second / kTwoPi, rate);
}

std::vector<std::uint8_t> random_bits(std::size_t n) {
  std::mt19937_64 g(7);
  std::vector<std::uint8_t> b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(g() & 1);
  return b;
}

void BM_ModalChannelFilter(benchmark::State& st) {
  const ModalChannel ch(derive_transfer_function(default_circuit()), 1.0 / 20e6);
  std::vector<double> x(static_cast<std::size_t>(st.range(0)), 1.0), y(x.size());
  for (auto _ : st) {
    ModalChannel::State s;
    ch.filter(x, y, s);
    benchmark::DoNotOptimize(y.data());
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_ModalChannelFilter)->Arg(1 << 14)->Arg(1 << 18);

void BM_DirectFormChannel(benchmark::State& st) {
  const TransferFunction tf = derive_transfer_function(default_circuit());
  const FirChannel fir = fir_from_impulse_response(impulse_response(tf, 1.0 / 20e6, 40e-6));
  std::vector<double> x(static_cast<std::size_t>(st.range(0)), 1.0);
  for (auto _ : st) benchmark::DoNotOptimize(apply_channel(x, fir, {}, 1));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_DirectFormChannel)->Arg(1 << 14);

void BM_Modulate(benchmark::State& st) {
  const ModemConfig m = modem_at(20e3);
  const auto bits = random_bits(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(modulate(bits, m));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}
BENCHMARK(BM_Modulate)->Arg(256);

void BM_CoherentCorrelator(benchmark::State& st) {
  const ModemConfig m = modem_at(20e3);
  const Correlator c(m);
  const std::vector<double> useful(static_cast<std::size_t>(m.useful_samples()), 0.5);
  double cm = 0.0, cp = 0.0;
  for (auto _ : st) {
    c.correlate(useful.data(), 0.3, cm, cp);
    benchmark::DoNotOptimize(cm + cp);
  }
  st.SetItemsProcessed(st.iterations());
}
BENCHMARK(BM_CoherentCorrelator);

void BM_NoncoherentDemod(benchmark::State& st) {
  const ModemConfig m = modem_at(100e3);
  const FilterBank fb = design_filterbank();
  const auto bits = random_bits(64);
  const auto r = modulate(bits, m);
  for (auto _ : st) benchmark::DoNotOptimize(noncoherent_demod(r, m, fb));
  st.SetItemsProcessed(st.iterations() * 64);
}
BENCHMARK(BM_NoncoherentDemod);

void BM_FilterbankDesign(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(design_filterbank());
}
BENCHMARK(BM_FilterbankDesign)->Unit(benchmark::kMillisecond);

void BM_BerChunk(benchmark::State& st) {
  LinkSetup s;
  s.channel = derive_transfer_function(default_circuit());
  s.modem = modem_at(100e3);
  const LinkSimulator sim(s);
  StopRule stop;
  stop.target_errors = ~0ull;
  stop.max_bits = 2000;
  stop.threads = 1;
  for (auto _ : st) benchmark::DoNotOptimize(sim.run(6.0, stop, 1));
  st.SetItemsProcessed(st.iterations() * 2000);
}
BENCHMARK(BM_BerChunk)->Unit(benchmark::kMillisecond);

void BM_Rk4Transient(benchmark::State& st) {
  const CircuitParams p = default_circuit();
  const Drive d = tone_drive(1e6);
  IntegrateOptions opt;
  opt.record = false;
  for (auto _ : st) benchmark::DoNotOptimize(integrate(p, d, 0.0, 100e-6, default_step(p), opt));
  st.SetItemsProcessed(st.iterations() * 100);
}
BENCHMARK(BM_Rk4Transient)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
