#include "emospread/random.hpp"

namespace emospread {

std::uint64_t splitmix64(std::uint64_t x) {
	x += 0x9E3779B97F4A7C15ull;
	x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
	x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
	return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::string_view stream, std::uint64_t index) {
	std::uint64_t h = 0xCBF29CE484222325ull; // FNV-1a
	for (unsigned char c : stream) {
		h ^= c;
		h *= 0x100000001B3ull;
	}
	return splitmix64(splitmix64(seed ^ h) + splitmix64(index));
}

} // namespace emospread
