#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace dapc {

using Rng = std::mt19937_64;

// Derives an independent stream seed from a base seed and a stream tag.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

// Order-independent sum: terms are sorted, then added with Neumaier
// compensation. Any permutation of the input gives the same bits.
double stable_sum(std::vector<double> terms);

double stable_mean(std::span<const double> values);

// Population standard deviation.
double population_stddev(std::span<const double> values);

double uniform_real(Rng& rng, double lo, double hi);
std::size_t uniform_index(Rng& rng, std::size_t n);

}  // namespace dapc
