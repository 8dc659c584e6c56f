#pragma once

// Time-domain integration of the two-coil series-series circuit.

#include <functional>
#include <iosfwd>
#include <limits>
#include <vector>

#include "swipt/circuit_model.hpp"
#include "swipt/modem.hpp"

namespace swipt {

struct StateVector {
  double i1 = 0.0;
  double i2 = 0.0;
  double vC1 = 0.0;
  double vC2 = 0.0;
};

/// Inverse of the inductance matrix [[L1, -M], [-M, L2]] plus the loop
/// constants. SingularInductance if k >= 1.
struct MeshSystem {
  double inv11 = 0.0, inv12 = 0.0, inv22 = 0.0;
  double RSp = 0.0, RLp = 0.0, C1 = 0.0, C2 = 0.0;

  static MeshSystem from(const Components& c, double k);
};

StateVector derivatives(const StateVector& x, double v1, const MeshSystem& m);
StateVector derivatives(const StateVector& x, double v1, const CircuitParams& p);

/// 1/2 L1 i1^2 + 1/2 L2 i2^2 - M i1 i2 + 1/2 C1 vC1^2 + 1/2 C2 vC2^2.
double stored_energy(const CircuitParams& p, const StateVector& x);

/// Source waveform. `next_breakpoint(t)` returns the first time > t at which
/// the drive or its derivative jumps (infinity if none); steps never
/// straddle one. Piecewise-constant drives are sampled at the midpoint of
/// each step so a jump is never evaluated on its edge.
struct Drive {
  std::function<double(double)> value;
  std::function<double(double)> next_breakpoint;
  bool piecewise_constant = false;
};

/// sqrt(2) sin(2 pi f t) for FSK, its sign (+1/-1) for bipolar RFSK, +1/0
/// for unipolar RFSK.
Drive tone_drive(double f, WaveformKind kind = WaveformKind::FSK);

/// Old tone for t < 0, new tone for t >= 0, both at phase zero at t = 0.
Drive transition_drive(double f_from, double f_to, WaveformKind kind = WaveformKind::FSK);

/// Continuous-phase bit stream starting at t = 0 (symbol phases from the
/// frame), optionally rectified.
Drive symbol_drive(const SymbolFrame& frame, const ModemConfig& cfg,
                   WaveformKind kind = WaveformKind::FSK);

/// sqrt(2) sin(2 pi (f_start t + rate t^2 / 2)).
Drive chirp_drive(double f_start, double rate);

struct TransientResult {
  std::vector<double> t;
  std::vector<double> v1;
  std::vector<double> i1;
  std::vector<double> v2;  // RL i2
  std::vector<double> i2;
  double E1 = 0.0;         // input energy, integral of v1 i1
  double E2 = 0.0;         // load energy, integral of v2 i2
  double E_loss = 0.0;     // R'S i1^2 + R2 i2^2
  StateVector initial;
  StateVector final_state;
  double eta_T() const { return E1 > 0.0 ? E2 / E1 : 0.0; }
};

struct IntegrateOptions {
  StateVector initial;
  /// Keep every n-th grid point in the series (energies always use all).
  int record_stride = 1;
  bool record = true;
};

/// Classical RK4 on a uniform grid from t0 to t1; the step is shrunk so an
/// integer number of steps lands on t1. Energies are integrated as extra
/// state components. StepTooLarge if dt > 1/(50 f+) of the circuit.
TransientResult integrate(const CircuitParams& p, const Drive& drive, double t0, double t1,
                          double dt, const IntegrateOptions& opt = {});

/// 1/(100 f+).
double default_step(const CircuitParams& p);

struct SettledState {
  StateVector state;
  double eta_last_cycle = 0.0;
  int cycles_run = 0;
};

/// Drives a pure tone from rest for at least `cycles` periods, then until
/// the per-cycle efficiency changes by less than 0.1%. The returned state
/// sits at phase zero of the tone. NotSettled after 10x cycles.
SettledState steady_state_settle(const CircuitParams& p, double tone, int cycles = 200,
                                 WaveformKind kind = WaveformKind::FSK, double dt = 0.0);

enum class Transition { PlusToMinus, MinusToPlus };

/// Settles on the old tone, switches at t = 0 and returns the run over
/// [0, window].
TransientResult run_transition(const CircuitParams& p, Transition tr, double window,
                               WaveformKind kind = WaveformKind::FSK, double dt = 0.0);

double transient_efficiency(const CircuitParams& p, Transition tr, double window,
                            WaveformKind kind = WaveformKind::FSK, double dt = 0.0);

/// Time after t = 0 beyond which the per-period peak of |v2| stays within
/// `level` of `amplitude`. Period = 1/f.
double settling_time(const TransientResult& r, double f, double amplitude, double level = 0.05);

/// Header "t,v1,i1,v2,i2".
void write_transient_csv(std::ostream& os, const TransientResult& r);

}  // namespace swipt
