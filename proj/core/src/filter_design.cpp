#include "swipt/filter_design.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "swipt/circuit_model.hpp"
#include "swipt/error.hpp"

namespace swipt {

namespace {

struct Grid {
  std::vector<double> x;  // cos(2 pi f)
  std::vector<double> f;
  std::vector<double> desired;
  std::vector<double> weight;
  std::vector<int> band;
};

Grid make_grid(int r, std::span<const RemezBand> bands, int density) {
  const double df = 0.5 / (density * r);
  Grid g;
  for (std::size_t bi = 0; bi < bands.size(); ++bi) {
    const auto& b = bands[bi];
    const int n = std::max(2, static_cast<int>(std::ceil((b.hi - b.lo) / df)) + 1);
    for (int i = 0; i < n; ++i) {
      const double f = b.lo + (b.hi - b.lo) * i / (n - 1);
      g.f.push_back(f);
      g.x.push_back(std::cos(kTwoPi * f));
      g.desired.push_back(b.desired);
      g.weight.push_back(b.weight);
      g.band.push_back(static_cast<int>(bi));
    }
  }
  return g;
}

// Barycentric weights for nodes x[idx[0..n)]. Products of ~n factors
// over- or underflow for long filters, so they are formed in the log domain
// and rescaled; the common factor cancels in every use.
std::vector<double> bary_weights(const std::vector<double>& x, const std::vector<int>& idx,
                                 std::size_t n) {
  std::vector<double> logw(n, 0.0);
  std::vector<int> sign(n, 1);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) {
        const double d = x[idx[i]] - x[idx[j]];
        logw[i] -= std::log(std::abs(d));
        if (d < 0.0) sign[i] = -sign[i];
      }
  const double top = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i) w[i] = sign[i] * std::exp(logw[i] - top);
  return w;
}

}  // namespace

RemezResult remez(int num_taps, std::span<const RemezBand> bands, int grid_density) {
  if (num_taps < 3 || num_taps % 2 == 0)
    fail(ErrorCode::InvalidArgument, "remez: type I design needs an odd tap count >= 3");
  if (bands.empty()) fail(ErrorCode::InvalidArgument, "remez: no bands");
  for (const auto& b : bands)
    if (!(b.lo >= 0.0 && b.hi <= 0.5 && b.lo < b.hi && b.weight > 0.0))
      fail(ErrorCode::InvalidArgument, "remez: malformed band");

  const int m = (num_taps - 1) / 2;  // A(w) = sum_{k<=m} a_k cos(k w)
  const int r = m + 2;               // extremal set size
  const Grid g = make_grid(r, bands, grid_density);
  const int ng = static_cast<int>(g.x.size());
  if (ng < r) fail(ErrorCode::InvalidArgument, "remez: grid too small");

  std::vector<int> ext(r);
  for (int i = 0; i < r; ++i)
    ext[i] = static_cast<int>(std::lround(static_cast<double>(i) * (ng - 1) / (r - 1)));

  std::vector<double> err(ng);
  double delta = 0.0;
  std::vector<double> wi;  // interpolation weights for the first r-1 extremals
  std::vector<double> ci;
  RemezResult result;

  const auto interpolate = [&](double x) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < r - 1; ++i) {
      const double d = x - g.x[ext[i]];
      if (d == 0.0) return ci[i];
      const double t = wi[i] / d;
      num += t * ci[i];
      den += t;
    }
    return num / den;
  };

  constexpr int kMaxIter = 100;
  bool converged = false;
  for (int iter = 0; iter < kMaxIter && !converged; ++iter) {
    result.iterations = iter + 1;
    const auto b = bary_weights(g.x, ext, r);
    double num = 0.0, den = 0.0;
    for (int i = 0; i < r; ++i) {
      num += b[i] * g.desired[ext[i]];
      den += b[i] * ((i % 2 == 0) ? 1.0 : -1.0) / g.weight[ext[i]];
    }
    delta = num / den;
    wi = bary_weights(g.x, ext, r - 1);
    ci.assign(r - 1, 0.0);
    for (int i = 0; i < r - 1; ++i)
      ci[i] = g.desired[ext[i]] - ((i % 2 == 0) ? 1.0 : -1.0) * delta / g.weight[ext[i]];

    for (int j = 0; j < ng; ++j) err[j] = g.weight[j] * (g.desired[j] - interpolate(g.x[j]));

    // Candidate extrema: local extrema of err within each band (band edges
    // always qualify on their open side) whose magnitude reaches |delta|.
    const double ad = std::abs(delta);
    std::vector<int> cand;
    for (int j = 0; j < ng; ++j) {
      const double e = err[j];
      if (std::abs(e) < ad * (1.0 - 1e-6)) continue;
      const bool left_edge = j == 0 || g.band[j - 1] != g.band[j];
      const bool right_edge = j == ng - 1 || g.band[j + 1] != g.band[j];
      const bool left_ok = left_edge || (e > 0 ? e >= err[j - 1] : e <= err[j - 1]);
      const bool right_ok = right_edge || (e > 0 ? e >= err[j + 1] : e <= err[j + 1]);
      if (left_ok && right_ok) cand.push_back(j);
    }
    // Enforce alternation, keeping the larger of same-sign neighbours.
    std::vector<int> alt;
    for (int j : cand) {
      if (!alt.empty() && (err[j] > 0) == (err[alt.back()] > 0)) {
        if (std::abs(err[j]) > std::abs(err[alt.back()])) alt.back() = j;
      } else {
        alt.push_back(j);
      }
    }
    while (static_cast<int>(alt.size()) > r) {
      // Drop the smaller end; this preserves alternation.
      if (std::abs(err[alt.front()]) < std::abs(err[alt.back()]))
        alt.erase(alt.begin());
      else
        alt.pop_back();
    }
    if (static_cast<int>(alt.size()) < r)
      fail(ErrorCode::NumericFailure, "remez: lost alternation at iteration " + std::to_string(iter) + " (" + std::to_string(alt.size()) + "/" + std::to_string(r) + ", cand " + std::to_string(cand.size()) + ", delta " + std::to_string(delta) + ")");

    double emax = 0.0;
    for (int j : alt) emax = std::max(emax, std::abs(err[j]));
    converged = (emax - ad) <= 1e-6 * emax || alt == ext;
    // On convergence keep ext: wi and ci belong to it.
    if (!converged) ext = alt;
  }
  if (!converged) fail(ErrorCode::NumericFailure, "remez: exchange did not converge");

  // Impulse response from N samples of A on the DFT grid.
  const int n = num_taps;
  std::vector<double> A(n);
  for (int k = 0; k < n; ++k) A[k] = interpolate(std::cos(kTwoPi * k / n));
  result.taps.assign(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = A[0];
    for (int k = 1; k < n; ++k) acc += A[k] * std::cos(kTwoPi * k * (i - m) / n);
    result.taps[i] = acc / n;
  }
  result.deviation = std::abs(delta);
  return result;
}

double fir_magnitude(std::span<const double> taps, double f, double fs) {
  const double w = kTwoPi * f / fs;
  double re = 0.0, im = 0.0;
  for (std::size_t i = 0; i < taps.size(); ++i) {
    re += taps[i] * std::cos(w * static_cast<double>(i));
    im -= taps[i] * std::sin(w * static_cast<double>(i));
  }
  return std::hypot(re, im);
}

BandMetrics measure_filter(std::span<const double> taps, double fs,
                           std::span<const FrequencyRange> passbands,
                           std::span<const FrequencyRange> stopbands, int npoints) {
  const auto inside = [](double f, std::span<const FrequencyRange> bands) {
    return std::any_of(bands.begin(), bands.end(),
                       [f](const FrequencyRange& b) { return f >= b.lo && f <= b.hi; });
  };
  double pmin = 1e300, pmax = 0.0, psum = 0.0, smax = 0.0;
  int pcount = 0;
  for (int i = 0; i < npoints; ++i) {
    const double f = 0.5 * fs * i / (npoints - 1);
    const double mag = fir_magnitude(taps, f, fs);
    if (inside(f, passbands)) {
      pmin = std::min(pmin, mag);
      pmax = std::max(pmax, mag);
      psum += mag;
      ++pcount;
    } else if (inside(f, stopbands)) {
      smax = std::max(smax, mag);
    }
  }
  if (pcount == 0) fail(ErrorCode::InvalidArgument, "measure_filter: empty passband");
  BandMetrics m;
  const double mean = psum / pcount;
  m.ripple_db = 20.0 * std::log10(pmax / pmin);
  m.mean_gain_db = 20.0 * std::log10(mean);
  m.attenuation_db = 20.0 * std::log10(mean / smax);
  const double energy = std::inner_product(taps.begin(), taps.end(), taps.begin(), 0.0);
  // Parseval: integral of |H|^2 over [0, fs/2] is (fs/2) sum h^2.
  m.noise_bandwidth = 0.5 * fs * energy / (mean * mean);
  return m;
}

}  // namespace swipt
