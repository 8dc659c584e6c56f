#pragma once

// Thin FFTW wrappers used by the channel, filter and test code.

#include <complex>
#include <span>
#include <vector>

namespace swipt {

/// Full complex DFT, X[k] = sum_n x[n] exp(-2 pi j k n / N).
std::vector<std::complex<double>> dft(std::span<const std::complex<double>> x);

/// Inverse of dft including the 1/N factor.
std::vector<std::complex<double>> idft(std::span<const std::complex<double>> X);

/// Real-input DFT; returns the N/2+1 non-negative-frequency bins.
std::vector<std::complex<double>> rdft(std::span<const double> x);

/// Linear convolution via FFT, length x.size() + h.size() - 1.
std::vector<double> fft_convolve(std::span<const double> x, std::span<const double> h);

/// One-sided-frequency periodogram |X[k]|^2 / N, k = 0..N/2, averaged over
/// non-overlapping segments of length nseg (Bartlett).
std::vector<double> periodogram(std::span<const double> x, std::size_t nseg);

}  // namespace swipt
