#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace unpast {

using Rng = std::mt19937_64;

/// Combines two 64-bit values into a well-mixed seed (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

/// FNV-1a; stable across platforms, used to key seeds on identifiers.
std::uint64_t hash_string(std::string_view s);

} // namespace unpast
