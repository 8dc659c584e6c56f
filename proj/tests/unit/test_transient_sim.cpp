#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "swipt/circuit_model.hpp"
#include "swipt/error.hpp"
#include "swipt/modem.hpp"
#include "swipt/transient_sim.hpp"

namespace swipt {
namespace {

CircuitParams fig2() { return CircuitParams(paper_default_components(), 0.4); }

PeakAnalysis peaks(const CircuitParams& p) {
  return peak_frequencies_exact(derive_transfer_function(p));
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::NumericFailure;
}

// Amplitude of the component at f over the last `cycles` periods.
double tone_amplitude(const std::vector<double>& t, const std::vector<double>& x, double f,
                      double span) {
  const double t_end = t.back();
  double re = 0.0, im = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] <= t_end - span) continue;
    re += x[i] * std::cos(kTwoPi * f * t[i]);
    im += x[i] * std::sin(kTwoPi * f * t[i]);
    ++n;
  }
  return 2.0 * std::hypot(re, im) / static_cast<double>(n);
}

TEST(Derivatives, TrivialCases) {
  const CircuitParams p = fig2();
  const StateVector zero = derivatives({}, 0.0, p);
  EXPECT_EQ(zero.i1, 0.0);
  EXPECT_EQ(zero.i2, 0.0);
  EXPECT_EQ(zero.vC1, 0.0);
  EXPECT_EQ(zero.vC2, 0.0);

  const CircuitParams decoupled(paper_default_components(), 0.0);
  const auto r = integrate(decoupled, tone_drive(1e6), 0.0, 20e-6, default_step(decoupled));
  EXPECT_TRUE(std::all_of(r.i2.begin(), r.i2.end(), [](double v) { return v == 0.0; }));
  EXPECT_GT(*std::max_element(r.i1.begin(), r.i1.end()), 0.01);
}

TEST(Derivatives, MeshEquations) {
  const CircuitParams p = fig2();
  const Components& c = p.components();
  const StateVector x{0.3, -0.2, 1.5, -0.7};
  const double v1 = 2.0;
  const StateVector d = derivatives(x, v1, p);
  // Residuals of the unsolved system.
  EXPECT_NEAR(c.L1 * d.i1 - p.M() * d.i2, v1 - p.source_loop_resistance() * x.i1 - x.vC1, 1e-12);
  EXPECT_NEAR(-p.M() * d.i1 + c.L2 * d.i2, -x.vC2 - p.load_loop_resistance() * x.i2, 1e-12);
  EXPECT_DOUBLE_EQ(d.vC1, x.i1 / c.C1);
  EXPECT_DOUBLE_EQ(d.vC2, x.i2 / c.C2);
}

TEST(Derivatives, SingularInductance) {
  EXPECT_EQ(code_of([] { MeshSystem::from(paper_default_components(), 1.0); }),
            ErrorCode::SingularInductance);
  EXPECT_EQ(code_of([] { MeshSystem::from(paper_default_components(), 1.5); }),
            ErrorCode::SingularInductance);
}

TEST(Integrate, StepTooLarge) {
  const CircuitParams p = fig2();
  const double limit = 1.0 / (50.0 * peaks(p).f_plus);
  EXPECT_EQ(code_of([&] { integrate(p, tone_drive(1e6), 0.0, 1e-6, 1.01 * limit); }),
            ErrorCode::StepTooLarge);
  EXPECT_NO_THROW(integrate(p, tone_drive(1e6), 0.0, 1e-6, limit));
  EXPECT_NEAR(default_step(p), 0.5 * limit, 1e-20);
}

TEST(Integrate, SinusoidalSteadyStateMatchesPhasor) {
  const CircuitParams p = fig2();
  const double f = p.f0();
  const auto r = integrate(p, tone_drive(f), 0.0, 50.0 / f, default_step(p));
  const SteadyState ss = solve_steady_state(p, kTwoPi * f);
  // Drive is sqrt(2) sin, so amplitudes are sqrt(2) |I| for a unit phasor.
  EXPECT_NEAR(tone_amplitude(r.t, r.i1, f, 5.0 / f) / (std::sqrt(2.0) * std::abs(ss.I1)), 1.0, 0.005);
  EXPECT_NEAR(tone_amplitude(r.t, r.i2, f, 5.0 / f) / (std::sqrt(2.0) * std::abs(ss.I2)), 1.0, 0.005);
}

TEST(Integrate, LoadVoltageIsOhmic) {
  const CircuitParams p = fig2();
  const auto r = integrate(p, tone_drive(0.9e6), 0.0, 5e-6, default_step(p));
  for (std::size_t i = 0; i < r.t.size(); ++i)
    EXPECT_DOUBLE_EQ(r.v2[i], p.components().RL * r.i2[i]);
}

TEST(Integrate, Linearity) {
  const CircuitParams p = fig2();
  const Drive d = tone_drive(1.1e6);
  Drive d2 = d;
  d2.value = [d](double t) { return 2.0 * d.value(t); };
  const auto a = integrate(p, d, 0.0, 20e-6, default_step(p));
  const auto b = integrate(p, d2, 0.0, 20e-6, default_step(p));
  double peak = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < a.v2.size(); ++i) {
    peak = std::max(peak, std::abs(b.v2[i]));
    worst = std::max(worst, std::abs(b.v2[i] - 2.0 * a.v2[i]));
  }
  EXPECT_LT(worst, 1e-12 * peak);
}

TEST(Integrate, ChirpFindsGainMaxima) {
  const CircuitParams p = fig2();
  const double fa = 0.6e6, fb = 1.6e6, duration = 2e-3;
  const double rate = (fb - fa) / duration;
  IntegrateOptions opt;
  opt.record_stride = 2;
  const auto r = integrate(p, chirp_drive(fa, rate), 0.0, duration, default_step(p), opt);
  // Per-microsecond envelope against instantaneous frequency.
  std::vector<double> env, freq;
  const double block = 1e-6;
  std::size_t i = 0;
  for (double t = 0.0; t + block <= duration; t += block) {
    double peak = 0.0;
    while (i < r.t.size() && r.t[i] < t + block) peak = std::max(peak, std::abs(r.v2[i++]));
    env.push_back(peak);
    freq.push_back(fa + rate * (t + 0.5 * block));
  }
  std::vector<double> found;
  for (std::size_t k = 5; k + 5 < env.size(); ++k) {
    const auto lo = env.begin() + static_cast<std::ptrdiff_t>(k - 5);
    const auto hi = env.begin() + static_cast<std::ptrdiff_t>(k + 6);
    if (env[k] == *std::max_element(lo, hi) && env[k] > 0.5 * *std::max_element(env.begin(), env.end()))
      found.push_back(freq[k]);
  }
  const auto maxima = gain_maxima(derive_transfer_function(p));
  ASSERT_EQ(found.size(), 2u);
  ASSERT_EQ(maxima.size(), 2u);
  for (int j = 0; j < 2; ++j) EXPECT_NEAR(found[j] / (maxima[j] / kTwoPi), 1.0, 0.01);
}

class ConservationTest : public ::testing::TestWithParam<WaveformKind> {};

TEST_P(ConservationTest, EnergyBalanceOverRandomRuns) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> kdist(0.25, 0.8);
  for (int trial = 0; trial < 6; ++trial) {
    const CircuitParams p(paper_default_components(), kdist(rng));
    const PeakAnalysis pa = peaks(p);
    const ModemConfig cfg = ModemConfig::for_rate(pa.f_minus, pa.f_plus, 200e3);
    std::vector<std::uint8_t> bits(12);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
    IntegrateOptions opt;
    opt.initial = {0.01 * trial, -0.02, 0.5, 0.1 * trial};
    opt.record = false;
    const auto r = integrate(p, symbol_drive(make_frame(bits, cfg, 0.7), cfg, GetParam()), 0.0,
                             cfg.T() * bits.size(), default_step(p), opt);
    const double dstored = stored_energy(p, r.final_state) - stored_energy(p, r.initial);
    const double balance = r.E1 - (r.E2 + r.E_loss + dstored);
    EXPECT_LT(std::abs(balance), 1e-3 * std::abs(r.E1)) << "k=" << p.k();
  }
}

INSTANTIATE_TEST_SUITE_P(AllDrives, ConservationTest,
                         ::testing::Values(WaveformKind::FSK, WaveformKind::RFSK_BIPOLAR,
                                           WaveformKind::RFSK_UNIPOLAR));

TEST(Integrate, EfficiencyBoundedFromRest) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> kdist(0.02, 0.9);
  std::uniform_real_distribution<double> fdist(0.3e6, 2.0e6);
  std::uniform_real_distribution<double> rl(2.0, 40.0);
  for (int trial = 0; trial < 20; ++trial) {
    const CircuitParams p = CircuitParams(paper_default_components(), kdist(rng)).with_load(rl(rng));
    const auto kind = trial % 2 ? WaveformKind::RFSK_BIPOLAR : WaveformKind::FSK;
    IntegrateOptions opt;
    opt.record = false;
    const auto r = integrate(p, tone_drive(fdist(rng), kind), 0.0, 15e-6, default_step(p), opt);
    EXPECT_GE(r.eta_T(), 0.0);
    EXPECT_LE(r.eta_T(), 1.0);
  }
}

TEST(SymbolDrive, MatchesModulatorSamples) {
  const PeakAnalysis pa = peaks(fig2());
  const ModemConfig cfg = ModemConfig::for_rate(pa.f_minus, pa.f_plus, 100e3);
  const std::vector<std::uint8_t> bits{0, 1, 1, 0, 1, 0, 0, 1};
  const auto s = modulate(bits, cfg, 1.1);
  const Drive d = symbol_drive(make_frame(bits, cfg, 1.1), cfg);
  for (std::size_t n = 0; n < s.size(); ++n) EXPECT_NEAR(d.value(n / cfg.fs), s[n], 1e-9);
}

TEST(SymbolDrive, SquareBreakpointsAreZeroCrossings) {
  const PeakAnalysis pa = peaks(fig2());
  const ModemConfig cfg = ModemConfig::for_rate(pa.f_minus, pa.f_plus, 100e3);
  const std::vector<std::uint8_t> bits{1, 0, 1, 1};
  const Drive d = symbol_drive(make_frame(bits, cfg, 0.4), cfg, WaveformKind::RFSK_BIPOLAR);
  ASSERT_TRUE(d.piecewise_constant);
  double t = 0.0;
  int flips = 0;
  while ((t = d.next_breakpoint(t)) < cfg.T() * bits.size()) {
    const double eps = 1e-13;
    if (d.value(t - eps) != d.value(t + eps)) ++flips;
    // Constant between consecutive breakpoints.
    const double nxt = std::min(d.next_breakpoint(t), cfg.T() * bits.size());
    for (int j = 1; j < 8; ++j) EXPECT_EQ(d.value(t + (nxt - t) * j / 8.0), d.value(t + 0.5 * (nxt - t)));
  }
  // Two zero crossings per period of each tone (to within one per symbol edge).
  double expect = 0.0;
  for (auto b : bits) expect += 2.0 * cfg.tone(b) * cfg.T();
  EXPECT_NEAR(flips, expect, 1.0 * bits.size());
}

TEST(Settle, SteadyStateEfficiencies) {
  const CircuitParams p = fig2();
  const PeakAnalysis pa = peaks(p);
  const struct {
    double f, want;
  } cases[] = {{pa.f_minus, 0.837}, {p.f0(), 0.911}, {pa.f_plus, 0.861}};
  for (const auto& c : cases) {
    const SettledState s = steady_state_settle(p, c.f);
    EXPECT_NEAR(s.eta_last_cycle, c.want, 0.005) << c.f;
    EXPECT_NEAR(s.eta_last_cycle, solve_steady_state(p, kTwoPi * c.f).eta, 1e-3) << c.f;
    EXPECT_GE(s.cycles_run, 200);
  }
  EXPECT_EQ(code_of([&] { steady_state_settle(p, 1e6, 10); }), ErrorCode::DomainError);
}

TEST(Transition, EfficiencyAtTenMicroseconds) {
  const CircuitParams p = fig2();
  const double down = transient_efficiency(p, Transition::PlusToMinus, 10e-6);
  const double up = transient_efficiency(p, Transition::MinusToPlus, 10e-6);
  RecordProperty("eta_down", std::to_string(down));
  RecordProperty("eta_up", std::to_string(up));
  EXPECT_NEAR(down, 0.734, 0.02);
  EXPECT_NEAR(up, 0.964, 0.02);
  EXPECT_NEAR(0.5 * (down + up), 0.849, 0.02);
  const PeakAnalysis pa = peaks(p);
  const double steady = 0.5 * (solve_steady_state(p, kTwoPi * pa.f_minus).eta +
                               solve_steady_state(p, kTwoPi * pa.f_plus).eta);
  EXPECT_NEAR(0.5 * (down + up), steady, 0.02);
}

TEST(Transition, SquareWaveGivesSameNumbers) {
  const CircuitParams p = fig2();
  const double down = transient_efficiency(p, Transition::PlusToMinus, 10e-6, WaveformKind::RFSK_BIPOLAR);
  const double up = transient_efficiency(p, Transition::MinusToPlus, 10e-6, WaveformKind::RFSK_BIPOLAR);
  EXPECT_NEAR(down, 0.734, 0.02);
  EXPECT_NEAR(up, 0.964, 0.02);
  EXPECT_NEAR(0.5 * (down + up), 0.849, 0.02);
}

TEST(Transition, AverageStableForLongerWindows) {
  const CircuitParams p = fig2();
  for (double window : {100e-6, 1000e-6}) {
    const double avg = 0.5 * (transient_efficiency(p, Transition::PlusToMinus, window) +
                              transient_efficiency(p, Transition::MinusToPlus, window));
    EXPECT_NEAR(avg, 0.849, 0.02) << window;
  }
}

TEST(Transition, StepHalvingConverges) {
  const CircuitParams p = fig2();
  const double dt = default_step(p);
  for (auto kind : {WaveformKind::FSK, WaveformKind::RFSK_BIPOLAR}) {
    const double a = transient_efficiency(p, Transition::PlusToMinus, 10e-6, kind, dt);
    const double b = transient_efficiency(p, Transition::PlusToMinus, 10e-6, kind, 0.5 * dt);
    EXPECT_LT(std::abs(a - b), 1e-4);
  }
}

TEST(Transition, SettlesWithinFiveToTenMicroseconds) {
  const CircuitParams p = fig2();
  const PeakAnalysis pa = peaks(p);
  for (auto tr : {Transition::PlusToMinus, Transition::MinusToPlus}) {
    const double f_to = tr == Transition::PlusToMinus ? pa.f_minus : pa.f_plus;
    const auto r = run_transition(p, tr, 40e-6);
    const double amp = std::sqrt(2.0) * std::abs(solve_steady_state(p, kTwoPi * f_to).V2);
    const double ts = settling_time(r, f_to, amp, 0.05);
    RecordProperty(tr == Transition::PlusToMinus ? "settle_down_us" : "settle_up_us",
                   std::to_string(ts * 1e6));
    EXPECT_GE(ts, 5e-6);
    EXPECT_LE(ts, 10e-6);
  }
}

TEST(Transition, DataModulationKeepsOutputPower) {
  const CircuitParams p = fig2();
  const PeakAnalysis pa = peaks(p);
  // T = 200 us is well beyond ten effective response lengths.
  const ModemConfig cfg = ModemConfig::for_rate(pa.f_minus, pa.f_plus, 5e3);
  std::mt19937_64 rng(8);
  std::vector<std::uint8_t> bits(40);
  for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1u);
  IntegrateOptions opt;
  opt.record_stride = 4;
  const auto r = integrate(p, symbol_drive(make_frame(bits, cfg), cfg), 0.0,
                           cfg.T() * bits.size(), default_step(p), opt);
  double run = 0.0, steady = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    if (r.t[i] < cfg.T()) continue;
    run += r.v2[i] * r.v2[i];
    ++n;
  }
  run /= static_cast<double>(n);
  for (std::size_t k = 1; k < bits.size(); ++k)
    steady += std::norm(solve_steady_state(p, kTwoPi * cfg.tone(bits[k])).V2);
  steady /= static_cast<double>(bits.size() - 1);
  EXPECT_NEAR(run / steady, 1.0, 0.03);
}

TEST(TransientCsv, HeaderAndRows) {
  const CircuitParams p = fig2();
  IntegrateOptions opt;
  opt.record_stride = 10;
  const auto r = integrate(p, tone_drive(1e6), 0.0, 1e-6, default_step(p), opt);
  std::ostringstream os;
  write_transient_csv(os, r);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line, "t,v1,i1,v2,i2");
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 4);
    ++rows;
  }
  EXPECT_EQ(rows, r.t.size());
  EXPECT_DOUBLE_EQ(r.t.back(), 1e-6);
}

}  // namespace
}  // namespace swipt
