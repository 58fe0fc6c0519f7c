#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>

namespace uiadapt {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seed of the sub-stream named `tag` under `root`. Every concern (drift,
/// tasks, emotion noise, exploration, ...) draws from its own sub-stream so a
/// trace does not depend on the interleaving of draws across concerns.
std::uint64_t derive_seed(std::uint64_t root, std::string_view tag) noexcept;

Rng make_stream(std::uint64_t root, std::string_view tag);

// The helpers below avoid std:: distributions so draws are identical across
// standard library implementations.

/// Uniform in [0, 1) with 53 bits of resolution.
double uniform01(Rng& rng);

/// Uniform integer in [0, n). n must be positive.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Standard normal via Box-Muller (no cached second variate).
double standard_normal(Rng& rng);

}  // namespace uiadapt
