#pragma once

#include <cstdint>
#include <random>

namespace greenflag {

using Rng = std::mt19937_64;

/// Independent, reproducible generator for the (seed, stream) pair. Every
/// random quantity of an episode is drawn from its own stream so that adding a
/// draw in one place never shifts the values seen elsewhere.
Rng make_rng(std::uint64_t seed, std::uint64_t stream);

/// Mixes several identifiers into one stream id.
std::uint64_t stream_id(std::uint64_t tag, std::uint64_t a = 0, std::uint64_t b = 0);

namespace streams {
inline constexpr std::uint64_t fleet = 1;
inline constexpr std::uint64_t outages = 2;
inline constexpr std::uint64_t weather = 3;
inline constexpr std::uint64_t local_iterations = 4;
inline constexpr std::uint64_t round_context = 5;
inline constexpr std::uint64_t policy = 6;
inline constexpr std::uint64_t datasets = 7;
}  // namespace streams

}  // namespace greenflag
