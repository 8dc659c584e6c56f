#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace swipt {

/// splitmix64 finaliser; good avalanche, used to derive stream seeds.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed for the stream identified by (master, a, b). Counter-based, so the
/// streams do not depend on evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0) noexcept;

using Rng = std::mt19937_64;

/// Fills out with independent N(0, sigma^2) samples.
void fill_gaussian(Rng& rng, std::span<double> out, double sigma = 1.0);

/// out[i] += sigma * N(0, 1).
void add_gaussian(Rng& rng, std::span<double> out, double sigma);

}  // namespace swipt
