#include "swipt/rng.hpp"

#include <boost/random/normal_distribution.hpp>

namespace swipt {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b * 0xD1B54A32D192ED03ull));
}

void fill_gaussian(Rng& rng, std::span<double> out, double sigma) {
  boost::random::normal_distribution<double> dist(0.0, sigma);
  for (double& v : out) v = dist(rng);
}

void add_gaussian(Rng& rng, std::span<double> out, double sigma) {
  boost::random::normal_distribution<double> dist(0.0, 1.0);
  for (double& v : out) v += sigma * dist(rng);
}

}  // namespace swipt
