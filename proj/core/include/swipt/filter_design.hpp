#pragma once

// Equiripple linear-phase FIR design (Parks-McClellan / Remez exchange) and
// measurement of the resulting magnitude response.

#include <span>
#include <vector>

namespace swipt {

/// A band in normalised frequency (cycles/sample, 0..0.5) with a constant
/// desired amplitude and error weight.
struct RemezBand {
  double lo = 0.0;
  double hi = 0.0;
  double desired = 0.0;
  double weight = 1.0;
};

struct RemezResult {
  std::vector<double> taps;
  double deviation = 0.0;  // weighted equiripple error
  int iterations = 0;
};

/// Type I (odd length, symmetric) minimax design. NumericFailure if the
/// exchange does not converge.
RemezResult remez(int num_taps, std::span<const RemezBand> bands, int grid_density = 16);

/// |H(e^{j 2 pi f / fs})| of a real FIR.
double fir_magnitude(std::span<const double> taps, double f, double fs);

struct BandMetrics {
  double ripple_db = 0.0;       // max/min gain in the passband, dB
  double mean_gain_db = 0.0;    // passband mean gain, dB
  double attenuation_db = 0.0;  // worst stopband attenuation below mean passband gain
  double noise_bandwidth = 0.0; // one-sided, Hz, referred to the mean passband gain
};

struct FrequencyRange {
  double lo = 0.0;
  double hi = 0.0;
};

/// Evaluates the response on an npoints grid over [0, fs/2].
BandMetrics measure_filter(std::span<const double> taps, double fs,
                           std::span<const FrequencyRange> passbands,
                           std::span<const FrequencyRange> stopbands, int npoints = 4096);

}  // namespace swipt
