#include "swipt/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "swipt/error.hpp"

namespace swipt {

namespace {

// FFTW's planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct Plan {
  fftw_plan p = nullptr;
  ~Plan() {
    if (p) {
      std::lock_guard lock(planner_mutex());
      fftw_destroy_plan(p);
    }
  }
};

fftw_complex* as_fftw(std::complex<double>* p) {
  return reinterpret_cast<fftw_complex*>(p);
}

std::vector<std::complex<double>> complex_transform(
    std::span<const std::complex<double>> x, int sign) {
  std::vector<std::complex<double>> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(x.size());
  if (x.empty()) return out;
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.p = fftw_plan_dft_1d(static_cast<int>(x.size()), as_fftw(in.data()),
                              as_fftw(out.data()), sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan.p);
  return out;
}

std::size_t next_fast_size(std::size_t n) {
  std::size_t best = 1;
  while (best < n) best <<= 1;
  // Try 3*2^m and 5*2^m, which FFTW handles just as well.
  for (std::size_t f : {3u, 5u}) {
    std::size_t v = f;
    while (v < n) v <<= 1;
    best = std::min(best, v);
  }
  return best;
}

}  // namespace

std::vector<std::complex<double>> dft(std::span<const std::complex<double>> x) {
  return complex_transform(x, FFTW_FORWARD);
}

std::vector<std::complex<double>> idft(std::span<const std::complex<double>> X) {
  auto out = complex_transform(X, FFTW_BACKWARD);
  const double scale = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
  for (auto& v : out) v *= scale;
  return out;
}

std::vector<std::complex<double>> rdft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<double> in(x.begin(), x.end());
  std::vector<std::complex<double>> out(n / 2 + 1);
  if (n == 0) return {};
  Plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan.p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(),
                                  as_fftw(out.data()), FFTW_ESTIMATE);
  }
  fftw_execute(plan.p);
  return out;
}

std::vector<double> fft_convolve(std::span<const double> x, std::span<const double> h) {
  if (x.empty() || h.empty()) return {};
  const std::size_t out_len = x.size() + h.size() - 1;
  // Overlap-add with a block sized to a few times the filter length.
  const std::size_t nfft = next_fast_size(std::max<std::size_t>(8 * h.size(), 4096));
  const std::size_t block = nfft - h.size() + 1;
  const std::size_t nbins = nfft / 2 + 1;

  std::vector<double> buf(nfft, 0.0);
  std::vector<std::complex<double>> H(nbins), X(nbins);
  Plan fwd, fwd_h, inv;
  {
    std::lock_guard lock(planner_mutex());
    fwd_h.p = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), buf.data(),
                                   as_fftw(H.data()), FFTW_ESTIMATE);
    fwd.p = fftw_plan_dft_r2c_1d(static_cast<int>(nfft), buf.data(),
                                 as_fftw(X.data()), FFTW_ESTIMATE);
    inv.p = fftw_plan_dft_c2r_1d(static_cast<int>(nfft), as_fftw(X.data()),
                                 buf.data(), FFTW_ESTIMATE);
  }
  std::copy(h.begin(), h.end(), buf.begin());
  fftw_execute(fwd_h.p);

  std::vector<double> y(out_len, 0.0);
  const double scale = 1.0 / static_cast<double>(nfft);
  for (std::size_t start = 0; start < x.size(); start += block) {
    const std::size_t len = std::min(block, x.size() - start);
    std::fill(buf.begin(), buf.end(), 0.0);
    std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(start), len, buf.begin());
    fftw_execute(fwd.p);
    for (std::size_t k = 0; k < nbins; ++k) X[k] *= H[k];
    fftw_execute(inv.p);  // c2r destroys X, which is fine here
    const std::size_t n_out = std::min(nfft, out_len - start);
    for (std::size_t i = 0; i < n_out; ++i) y[start + i] += buf[i] * scale;
  }
  return y;
}

std::vector<double> periodogram(std::span<const double> x, std::size_t nseg) {
  if (nseg == 0 || x.size() < nseg)
    fail(ErrorCode::InvalidArgument, "periodogram: segment longer than input");
  const std::size_t nsegments = x.size() / nseg;
  std::vector<double> acc(nseg / 2 + 1, 0.0);
  for (std::size_t s = 0; s < nsegments; ++s) {
    const auto X = rdft(x.subspan(s * nseg, nseg));
    for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += std::norm(X[k]);
  }
  const double scale = 1.0 / (static_cast<double>(nseg) * static_cast<double>(nsegments));
  for (auto& v : acc) v *= scale;
  return acc;
}

}  // namespace swipt
