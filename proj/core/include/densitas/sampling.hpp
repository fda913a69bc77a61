#pragma once

#include "densitas/natset.hpp"
#include "densitas/rng.hpp"

#include <string>
#include <vector>

namespace densitas {

/// m uniform in [1, max_modulus], each residue kept with probability 1/2,
/// t uniform in [0, max_threshold], each point below t flipped with probability 1/4.
NatSet random_periodic(SplitMix64& rng, std::uint64_t max_modulus = 360, std::uint64_t max_threshold = 20);

/// Eventually periodic fill rule: up to two prefix blocks, a cycle of one to three,
/// slices with breakpoints in (1/16)Z.
NatSet random_dyadic(SplitMix64& rng, Rounding rounding = Rounding::nearest);

NatSet random_finite(SplitMix64& rng, std::uint64_t max_value = 64, std::uint64_t max_size = 12);

/// Draws from `family` in {periodic, dyadic, finite, mixed}.
std::vector<NatSet> random_family(const std::string& family, std::size_t count, std::uint64_t seed);

/// ⋃_i [2^i, 2^i(1+2^{-n})), ceil rounding.
NatSet power_block_set(unsigned n);

}  // namespace densitas
