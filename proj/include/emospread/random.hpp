#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace emospread {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent seed for a named sub-stream, optionally indexed
/// (e.g. one stream per Monte Carlo path). Pure function of its inputs.
std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0);

inline Rng make_rng(std::uint64_t seed, std::string_view stream, std::uint64_t index = 0) {
	return Rng(derive_seed(seed, stream, index));
}

} // namespace emospread
