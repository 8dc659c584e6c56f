#include "swipt/transient_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iomanip>
#include <ostream>

#include "swipt/error.hpp"

namespace swipt {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.41421356237309504880;

// First multiple of `period` (offset by `origin`) strictly after t, skipping
// ones that coincide with t up to rounding.
double next_multiple(double t, double origin, double period) {
  const double u = (t - origin) / period;
  double c = origin + (std::floor(u) + 1.0) * period;
  if (c - t <= 1e-9 * period) c += period;
  return c;
}

double shape(double phase, WaveformKind kind) {
  const double s = std::sin(phase);
  switch (kind) {
    case WaveformKind::FSK: return kSqrt2 * s;
    case WaveformKind::RFSK_BIPOLAR: return s >= 0.0 ? 1.0 : -1.0;
    case WaveformKind::RFSK_UNIPOLAR: return s >= 0.0 ? 1.0 : 0.0;
  }
  return 0.0;
}

// Augmented state: i1, i2, vC1, vC2, E1, E2, E_loss.
using Aug = std::array<double, 7>;

struct Loop {
  MeshSystem m;
  double RL;
  double R2;
};

Aug rhs(const Aug& y, double v1, const Loop& lp) {
  const StateVector d = derivatives({y[0], y[1], y[2], y[3]}, v1, lp.m);
  return {d.i1,     d.i2, d.vC1, d.vC2, v1 * y[0], lp.RL * y[1] * y[1],
          lp.m.RSp * y[0] * y[0] + lp.R2 * y[1] * y[1]};
}

Aug axpy(const Aug& y, double a, const Aug& k) {
  Aug out;
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * k[i];
  return out;
}

void rk4_step(Aug& y, double t, double h, const Drive& d, const Loop& lp) {
  double va, vm, vb;
  if (d.piecewise_constant) {
    va = vm = vb = d.value(t + 0.5 * h);
  } else {
    va = d.value(t);
    vm = d.value(t + 0.5 * h);
    vb = d.value(t + h);
  }
  const Aug k1 = rhs(y, va, lp);
  const Aug k2 = rhs(axpy(y, 0.5 * h, k1), vm, lp);
  const Aug k3 = rhs(axpy(y, 0.5 * h, k2), vm, lp);
  const Aug k4 = rhs(axpy(y, h, k3), vb, lp);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
}

Loop make_loop(const CircuitParams& p) {
  return {MeshSystem::from(p.components(), p.k()), p.components().RL, p.components().R2};
}

TransientResult run(const Loop& lp, const Drive& drive, double t0, double t1, double dt,
                    const IntegrateOptions& opt) {
  const auto n = static_cast<long long>(std::ceil((t1 - t0) / dt - 1e-9));
  const double h = (t1 - t0) / static_cast<double>(n);
  const int stride = std::max(1, opt.record_stride);

  TransientResult r;
  r.initial = opt.initial;
  Aug y{opt.initial.i1, opt.initial.i2, opt.initial.vC1, opt.initial.vC2, 0.0, 0.0, 0.0};
  const auto record = [&](double t) {
    r.t.push_back(t);
    r.v1.push_back(drive.value(t));
    r.i1.push_back(y[0]);
    r.i2.push_back(y[1]);
    r.v2.push_back(lp.RL * y[1]);
  };
  if (opt.record) {
    const auto count = static_cast<std::size_t>(n / stride + 1);
    for (auto* v : {&r.t, &r.v1, &r.i1, &r.i2, &r.v2}) v->reserve(count);
    record(t0);
  }
  const bool has_breaks = static_cast<bool>(drive.next_breakpoint);
  for (long long k = 0; k < n; ++k) {
    const double ta = t0 + static_cast<double>(k) * h;
    const double tb = (k + 1 == n) ? t1 : t0 + static_cast<double>(k + 1) * h;
    double t = ta;
    while (t < tb) {
      double te = tb;
      if (has_breaks) {
        const double bp = drive.next_breakpoint(t);
        if (bp < tb - 1e-9 * h) te = bp;
      }
      rk4_step(y, t, te - t, drive, lp);
      t = te;
    }
    if (opt.record && ((k + 1) % stride == 0 || k + 1 == n)) record(tb);
  }
  r.E1 = y[4];
  r.E2 = y[5];
  r.E_loss = y[6];
  r.final_state = {y[0], y[1], y[2], y[3]};
  return r;
}

double max_step(const CircuitParams& p) {
  const PeakAnalysis pa = peak_frequencies_exact(derive_transfer_function(p));
  return 1.0 / (50.0 * pa.f_plus);
}

}  // namespace

MeshSystem MeshSystem::from(const Components& c, double k) {
  if (!(k >= 0.0 && k < 1.0))
    fail(ErrorCode::SingularInductance, "inductance matrix is singular for k >= 1");
  const double M = k * std::sqrt(c.L1 * c.L2);
  const double det = c.L1 * c.L2 - M * M;
  if (!(det > 1e-12 * c.L1 * c.L2))
    fail(ErrorCode::SingularInductance, "inductance matrix is numerically singular");
  MeshSystem m;
  m.inv11 = c.L2 / det;
  m.inv12 = M / det;
  m.inv22 = c.L1 / det;
  m.RSp = c.RS + c.R1;
  m.RLp = c.RL + c.R2;
  m.C1 = c.C1;
  m.C2 = c.C2;
  return m;
}

StateVector derivatives(const StateVector& x, double v1, const MeshSystem& m) {
  const double e1 = v1 - m.RSp * x.i1 - x.vC1;
  const double e2 = -x.vC2 - m.RLp * x.i2;
  return {m.inv11 * e1 + m.inv12 * e2, m.inv12 * e1 + m.inv22 * e2, x.i1 / m.C1, x.i2 / m.C2};
}

StateVector derivatives(const StateVector& x, double v1, const CircuitParams& p) {
  return derivatives(x, v1, MeshSystem::from(p.components(), p.k()));
}

double stored_energy(const CircuitParams& p, const StateVector& x) {
  const Components& c = p.components();
  return 0.5 * c.L1 * x.i1 * x.i1 + 0.5 * c.L2 * x.i2 * x.i2 - p.M() * x.i1 * x.i2 +
         0.5 * c.C1 * x.vC1 * x.vC1 + 0.5 * c.C2 * x.vC2 * x.vC2;
}

Drive tone_drive(double f, WaveformKind kind) {
  if (!(f > 0.0)) fail(ErrorCode::DomainError, "tone frequency must be positive");
  Drive d;
  d.value = [f, kind](double t) { return shape(kTwoPi * f * t, kind); };
  if (kind != WaveformKind::FSK) {
    d.piecewise_constant = true;
    d.next_breakpoint = [f](double t) { return next_multiple(t, 0.0, 0.5 / f); };
  }
  return d;
}

Drive transition_drive(double f_from, double f_to, WaveformKind kind) {
  const Drive before = tone_drive(f_from, kind);
  const Drive after = tone_drive(f_to, kind);
  Drive d;
  d.piecewise_constant = before.piecewise_constant;
  d.value = [before, after](double t) { return t < 0.0 ? before.value(t) : after.value(t); };
  d.next_breakpoint = [before, after](double t) {
    if (t < 0.0) {
      const double bp = before.next_breakpoint ? before.next_breakpoint(t) : kInf;
      return std::min(bp, 0.0);
    }
    return after.next_breakpoint ? after.next_breakpoint(t) : kInf;
  };
  return d;
}

Drive symbol_drive(const SymbolFrame& frame, const ModemConfig& cfg, WaveformKind kind) {
  if (frame.bits.empty()) fail(ErrorCode::InvalidArgument, "symbol_drive: empty frame");
  const double T = cfg.T();
  const double tend = T * static_cast<double>(frame.bits.size());
  struct Seg {
    double f, phi;
  };
  std::vector<Seg> seg;
  seg.reserve(frame.bits.size());
  for (std::size_t k = 0; k < frame.bits.size(); ++k)
    seg.push_back({cfg.tone(frame.bits[k]), frame.phase[k]});
  const auto locate = [seg, T](double t) {
    const auto k = static_cast<std::size_t>(std::clamp(std::floor(t / T), 0.0,
                                                       static_cast<double>(seg.size() - 1)));
    return k;
  };
  Drive d;
  d.piecewise_constant = kind != WaveformKind::FSK;
  d.value = [seg, T, kind, locate, tend](double t) {
    if (t < 0.0 || t > tend) return 0.0;
    const std::size_t k = locate(t);
    return shape(kTwoPi * seg[k].f * (t - static_cast<double>(k) * T) + seg[k].phi, kind);
  };
  d.next_breakpoint = [seg, T, kind, locate](double t) {
    if (t < 0.0) return 0.0;
    std::size_t k = locate(t);
    double boundary = static_cast<double>(k + 1) * T;
    if (boundary - t <= 1e-9 * T) {
      ++k;
      boundary += T;
      if (k >= seg.size()) return kInf;
    }
    if (kind == WaveformKind::FSK) return boundary;
    // Zero crossings of sin(2 pi f tau + phi) within the symbol.
    const double start = static_cast<double>(k) * T;
    const double half = 0.5 / seg[k].f;
    const double origin = start - seg[k].phi / (kTwoPi * seg[k].f);
    return std::min(boundary, next_multiple(t, origin, half));
  };
  return d;
}

Drive chirp_drive(double f_start, double rate) {
  Drive d;
  d.value = [f_start, rate](double t) {
    return kSqrt2 * std::sin(kTwoPi * (f_start * t + 0.5 * rate * t * t));
  };
  return d;
}

double default_step(const CircuitParams& p) { return 0.5 * max_step(p); }

TransientResult integrate(const CircuitParams& p, const Drive& drive, double t0, double t1,
                          double dt, const IntegrateOptions& opt) {
  if (!drive.value) fail(ErrorCode::InvalidArgument, "integrate: drive has no waveform");
  if (!(t1 > t0)) fail(ErrorCode::InvalidArgument, "integrate: need t1 > t0");
  const double limit = max_step(p);
  if (!(dt > 0.0) || dt > limit * (1.0 + 1e-12))
    fail(ErrorCode::StepTooLarge, "integrate: dt = " + std::to_string(dt) +
                                      " s exceeds 1/(50 f+) = " + std::to_string(limit) + " s");
  return run(make_loop(p), drive, t0, t1, dt, opt);
}

SettledState steady_state_settle(const CircuitParams& p, double tone, int cycles,
                                 WaveformKind kind, double dt) {
  if (cycles < 50) fail(ErrorCode::DomainError, "steady_state_settle: need at least 50 cycles");
  if (dt <= 0.0) dt = default_step(p);
  if (dt > max_step(p) * (1.0 + 1e-12)) fail(ErrorCode::StepTooLarge, "steady_state_settle: dt too large");
  const double period = 1.0 / tone;
  // Even step count per period keeps the half-period edge on the grid.
  auto per_cycle = static_cast<long long>(std::ceil(period / dt));
  per_cycle += per_cycle % 2;
  const double h = period / static_cast<double>(per_cycle);

  const Loop lp = make_loop(p);
  const Drive drive = tone_drive(tone, kind);
  IntegrateOptions opt;
  opt.record = false;
  SettledState out;
  double prev = -1.0;
  for (int c = 1; c <= 10 * cycles; ++c) {
    const TransientResult r = run(lp, drive, 0.0, period, h, opt);
    opt.initial = r.final_state;
    const double eta = r.eta_T();
    if (c >= cycles && prev > 0.0 && std::abs(eta - prev) < 1e-3 * eta) {
      out.state = r.final_state;
      out.eta_last_cycle = eta;
      out.cycles_run = c;
      return out;
    }
    prev = eta;
  }
  fail(ErrorCode::NotSettled, "steady_state_settle: efficiency still drifting after " +
                                  std::to_string(10 * cycles) + " cycles");
}

TransientResult run_transition(const CircuitParams& p, Transition tr, double window,
                               WaveformKind kind, double dt) {
  if (!(window > 0.0)) fail(ErrorCode::DomainError, "run_transition: window must be positive");
  if (dt <= 0.0) dt = default_step(p);
  const PeakAnalysis pa = peak_frequencies_exact(derive_transfer_function(p));
  const double f_from = tr == Transition::PlusToMinus ? pa.f_plus : pa.f_minus;
  const double f_to = tr == Transition::PlusToMinus ? pa.f_minus : pa.f_plus;
  IntegrateOptions opt;
  opt.initial = steady_state_settle(p, f_from, 200, kind, dt).state;
  return integrate(p, transition_drive(f_from, f_to, kind), 0.0, window, dt, opt);
}

double transient_efficiency(const CircuitParams& p, Transition tr, double window,
                            WaveformKind kind, double dt) {
  return run_transition(p, tr, window, kind, dt).eta_T();
}

double settling_time(const TransientResult& r, double f, double amplitude, double level) {
  if (r.t.size() < 2) fail(ErrorCode::InvalidArgument, "settling_time: empty result");
  const double period = 1.0 / f;
  const double h = r.t[1] - r.t[0];
  const auto span = static_cast<std::size_t>(std::ceil(period / h));
  const std::size_t hop = std::max<std::size_t>(1, span / 8);
  double settled = 0.0;
  for (std::size_t i = 0; i + span < r.t.size(); i += hop) {
    double peak = 0.0;
    for (std::size_t j = i; j <= i + span; ++j) peak = std::max(peak, std::abs(r.v2[j]));
    if (std::abs(peak - amplitude) > level * amplitude) settled = r.t[i + hop] - r.t[0];
  }
  return settled;
}

void write_transient_csv(std::ostream& os, const TransientResult& r) {
  os << "t,v1,i1,v2,i2\n" << std::setprecision(12);
  for (std::size_t i = 0; i < r.t.size(); ++i)
    os << r.t[i] << ',' << r.v1[i] << ',' << r.i1[i] << ',' << r.v2[i] << ',' << r.i2[i] << '\n';
}

}  // namespace swipt
