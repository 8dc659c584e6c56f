#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <limits>

#include "swipt/ber_engine.hpp"
#include "swipt/circuit_model.hpp"
#include "swipt/error.hpp"
#include "swipt/modem.hpp"

namespace swipt {
namespace {

TransferFunction fig2_channel() {
  return derive_transfer_function(CircuitParams(paper_default_components(), 0.4));
}

LinkSetup fig2_link(double rate, WaveformKind kind = WaveformKind::FSK) {
  const TransferFunction tf = fig2_channel();
  const PeakAnalysis pa = peak_frequencies_exact(tf);
  LinkSetup s;
  s.channel = tf;
  s.modem = ModemConfig::for_rate(pa.f_minus, pa.f_plus, rate, kind);
  return s;
}

// Orthogonal tones over a short useful window on a flat channel.
LinkSetup awgn_link() {
  LinkSetup s;
  s.flat_channel = true;
  s.modem = ModemConfig::from_durations(2e6, 4e6, 20e6, 110 / 20e6, 10 / 20e6);
  return s;
}

TEST(Wilson, MatchesQuadraticRoots) {
  // The interval solves (phat - p)^2 = z^2 p (1 - p) / n for p.
  const double z = 1.959963984540054;
  for (auto [e, n] : {std::pair<std::uint64_t, std::uint64_t>{100, 100000}, {0, 50}, {7, 9}, {3, 1000}}) {
    const double ph = static_cast<double>(e) / n;
    const double a = 1.0 + z * z / n;
    const double b = -(2.0 * ph + z * z / n);
    const double c = ph * ph;
    const double disc = std::sqrt(b * b - 4.0 * a * c);
    const Interval ci = wilson_interval(e, n);
    EXPECT_NEAR(ci.lo, (-b - disc) / (2.0 * a), 1e-12);
    EXPECT_NEAR(ci.hi, (-b + disc) / (2.0 * a), 1e-12);
    EXPECT_LE(ci.lo, ph);
    EXPECT_GE(ci.hi, ph);
  }
  const Interval none = wilson_interval(0, 0);
  EXPECT_EQ(none.lo, 0.0);
  EXPECT_EQ(none.hi, 1.0);
}

TEST(QInverse, InvertsTheoreticalBer) {
  for (double db : {0.0, 4.0, 9.6, 13.5}) {
    const double p = theoretical_ber(db);
    const double q = q_inverse(p);
    EXPECT_NEAR(q * q, std::pow(10.0, db / 10.0), 1e-8 * q * q);
  }
  EXPECT_THROW(q_inverse(0.0), Error);
}

TEST(Extrapolation, RecoversSyntheticWaterfall) {
  const double g = 0.63;
  std::vector<BerPoint> curve;
  for (double db : {6.0, 8.0, 10.0, 12.0}) {
    BerPoint p;
    p.es_n0_db = db;
    p.ber = 0.5 * std::erfc(std::sqrt(0.5 * g * std::pow(10.0, db / 10.0)));
    p.bits = 1'000'000'000;
    p.errors = static_cast<std::uint64_t>(p.ber * p.bits);
    curve.push_back(p);
  }
  const Extrapolation e = extrapolate_required_snr(curve, 1e-6, 20);
  EXPECT_NEAR(e.gain, g, 1e-3);
  const double q = q_inverse(1e-6);
  EXPECT_NEAR(e.es_n0_db, 10.0 * std::log10(q * q / g), 0.01);
  EXPECT_EQ(e.points_used, 3);
  EXPECT_THROW(extrapolate_required_snr({}, 1e-6), Error);
}

TEST(LinkSimulator, NoiselessRunsAreErrorFree) {
  for (auto side : {NoiseSide::Receiver, NoiseSide::Transmitter}) {
    LinkSetup s = fig2_link(20e3);
    s.side = side;
    const LinkSimulator sim(s);
    StopRule stop;
    stop.max_bits = 4000;
    const BerPoint pt = sim.run(std::numeric_limits<double>::infinity(), stop, 1);
    EXPECT_EQ(pt.errors, 0u);
    EXPECT_EQ(pt.bits, 4000u);
    EXPECT_EQ(sim.sigma_receiver(std::numeric_limits<double>::infinity()), 0.0);
  }
}

TEST(LinkSimulator, BudgetAndTargetStopRules) {
  const LinkSimulator sim(awgn_link());
  StopRule stop;
  stop.max_bits = 10'000;
  stop.chunk_bits = 1000;
  const BerPoint capped = sim.run(20.0, stop, 3);
  EXPECT_EQ(capped.bits, 10'000u);
  EXPECT_FALSE(capped.reached_target);
  stop.max_bits = 10'000'000;
  stop.target_errors = 50;
  const BerPoint hit = sim.run(0.0, stop, 3);
  EXPECT_TRUE(hit.reached_target);
  EXPECT_LT(hit.bits, 10'000'000u);
}

TEST(LinkSimulator, DeterministicAcrossThreadCounts) {
  const LinkSimulator sim(fig2_link(100e3));
  StopRule stop;
  stop.max_bits = 40'000;
  stop.chunk_bits = 1000;
  stop.target_errors = 30;
  stop.threads = 1;
  const BerPoint a = sim.run(6.0, stop, 99, 2);
  stop.threads = 3;
  const BerPoint b = sim.run(6.0, stop, 99, 2);
  EXPECT_EQ(a.bits, b.bits);
  EXPECT_EQ(a.errors, b.errors);
  const BerPoint c = sim.run(6.0, stop, 100, 2);
  EXPECT_NE(a.errors, c.errors);
}

TEST(LinkSimulator, SigmaCalibration) {
  const LinkSimulator sim(awgn_link());
  // Flat channel, unit-power sinusoid: Es = Nu / fs.
  EXPECT_NEAR(sim.received_power(), 1.0, 1e-9);
  const double db = 7.0;
  const double g = std::pow(10.0, db / 10.0);
  EXPECT_NEAR(sim.sigma_receiver(db), std::sqrt(100.0 / (2.0 * g)), 1e-9);
  EXPECT_EQ(sim.sigma_transmitter(db), 0.0);
}

TEST(LinkSimulator, MatchedCorrelatorNoiseAcrossSides) {
  LinkSetup rx = fig2_link(20e3);
  LinkSetup tx = rx;
  tx.side = NoiseSide::Transmitter;
  const LinkSimulator a(rx), b(tx);
  const NoiseMeasurement ma = a.measure_correlator_noise(10.0, 20000, 5);
  const NoiseMeasurement mb = b.measure_correlator_noise(10.0, 20000, 5);
  RecordProperty("var_ratio", std::to_string(mb.var_difference / ma.var_difference));
  EXPECT_NEAR(mb.var_minus / ma.var_minus, 1.0, 0.04);
  EXPECT_NEAR(mb.var_plus / ma.var_plus, 1.0, 0.04);
  EXPECT_NEAR(mb.var_difference / ma.var_difference, 1.0, 0.04);
}

TEST(LinkSimulator, TemplateGainMatchesSpectralIntegral) {
  // Parseval: sum over the spectrum of |T(f)|^2 |H(f)|^2 against |T(f)|^2.
  const LinkSetup s = fig2_link(20e3);
  const LinkSimulator sim(s);
  const ModalChannel ch(s.channel, 1.0 / s.modem.fs);
  const int nu = s.modem.useful_samples();
  const double fs = s.modem.fs;
  double num = 0.0, den = 0.0;
  const int grid = 16000;
  for (int g = 0; g <= grid; ++g) {
    const double f = 0.5 * fs * g / grid;
    const double h2 = std::norm(ch.response(f));
    for (double tone : {s.modem.f_minus, s.modem.f_plus})
      for (double offset : {0.0, 0.5 * kPi}) {
        std::complex<double> t = 0.0;
        for (int i = 0; i < nu; ++i)
          t += std::sin(kTwoPi * tone * i / fs + offset) * std::polar(1.0, -kTwoPi * f * i / fs);
        const double w = (g == 0 || g == grid ? 0.5 : 1.0) * std::norm(t);
        num += w * h2;
        den += w;
      }
  }
  EXPECT_NEAR(sim.template_gain(), num / den, 1e-3 * num / den);
  // Long windows approach the mean |H|^2 at the tone centres.
  const double centre =
      0.5 * (std::norm(ch.response(s.modem.f_minus)) + std::norm(ch.response(s.modem.f_plus)));
  EXPECT_NEAR(sim.template_gain() / centre, 1.0, 0.1);
  EXPECT_EQ(LinkSimulator(awgn_link()).template_gain(), 1.0);
}

TEST(LinkSimulator, TimingOffsetValidation) {
  LinkSetup s = fig2_link(20e3);
  s.timing_offset = s.modem.samples_per_symbol;
  EXPECT_THROW(LinkSimulator{s}, Error);
  s.timing_offset = 10;
  s.receiver = ReceiverKind::Noncoherent;
  EXPECT_THROW(LinkSimulator{s}, Error);
}

TEST(LinkSimulator, DelayedWindowRemovesIsiAtHighRate) {
  // 300 kbps on the default link: the transmitter-aligned window straddles
  // two symbols, the group-delay window does not.
  LinkSetup s = fig2_link(300e3);
  StopRule stop;
  stop.max_bits = 4000;
  const double inf = std::numeric_limits<double>::infinity();
  const BerPoint aligned = LinkSimulator(s).run(inf, stop, 2);
  s.timing_offset = group_delay_samples(s.channel, s.modem.f_minus, s.modem.f_plus, s.modem.fs);
  EXPECT_GT(s.timing_offset, 0);
  const BerPoint delayed = LinkSimulator(s).run(inf, stop, 2);
  EXPECT_GT(aligned.errors, 0u);
  EXPECT_EQ(delayed.errors, 0u);
}

TEST(GroupDelay, MatchesPhaseSlope) {
  const TransferFunction tf = fig2_channel();
  const PeakAnalysis pa = peak_frequencies_exact(tf);
  // Central difference of the unwrapped phase with a wider step.
  auto tau = [&tf](double f) {
    const double df = 50.0;
    return -std::arg(eval_H(tf, kTwoPi * (f + df)) / eval_H(tf, kTwoPi * (f - df))) /
           (kTwoPi * 2.0 * df);
  };
  const double fs = 20e6;
  const double expect = 0.5 * (tau(pa.f_minus) + tau(pa.f_plus)) * fs;
  EXPECT_NEAR(group_delay_samples(tf, pa.f_minus, pa.f_plus, fs), expect, 0.5 + 1e-6);
}

TEST(LinkSimulator, WilsonIntervalsCoverTruthOnAwgn) {
  const LinkSimulator sim(awgn_link());
  StopRule stop;
  stop.max_bits = 40'000;
  stop.chunk_bits = 2000;
  stop.target_errors = 1'000'000;
  int covered = 0;
  const int runs = 40;
  for (int r = 0; r < runs; ++r) {
    const BerPoint pt = sim.run(7.0, stop, 1000 + r);
    covered += pt.ci.lo <= pt.theory && pt.theory <= pt.ci.hi;
  }
  EXPECT_GE(covered, static_cast<int>(0.9 * runs));
}

TEST(LinkSimulator, NoncoherentCostsSnr) {
  LinkSetup s = fig2_link(20e3);
  const LinkSimulator coh(s);
  s.receiver = ReceiverKind::Noncoherent;
  const LinkSimulator non(s);
  StopRule stop;
  stop.max_bits = 200'000;
  stop.target_errors = 200;
  const BerPoint a = coh.run(8.0, stop, 11);
  const BerPoint b = non.run(8.0, stop, 11);
  RecordProperty("coherent_ber", std::to_string(a.ber));
  RecordProperty("noncoherent_ber", std::to_string(b.ber));
  EXPECT_GT(b.ber, a.ber);
}

TEST(LinkSimulator, RejectsBadStopRule) {
  const LinkSimulator sim(awgn_link());
  StopRule stop;
  stop.chunk_bits = 0;
  EXPECT_THROW(sim.run(5.0, stop, 1), Error);
  LinkSetup bad = awgn_link();
  bad.transmitter_share = 1.5;
  EXPECT_THROW(LinkSimulator{bad}, Error);
}

}  // namespace
}  // namespace swipt
