#pragma once

#include <densitas/metric.hpp>
#include <densitas/witness.hpp>

#include <string>
#include <vector>

namespace densitas::cli {

/// Named sequences for `limit` and `probe`:
///   points       A_n = ⋃_{j<n} [2^j, 2^j(1+2^{-j})) = {2^j : j < n}
///   valuation    A_n = ⋃_{j<n} (2^{j+1}ω + 2^j), limit ω∖{0}
///   witness      the κ=1/2 witness sequence at the given depth
///   constant:<literal>
SetSequence sequence_by_name(const std::string& name, unsigned depth, const Settings& s);

/// A limit for named sequences that declare one.
std::optional<NatSet> declared_limit(const std::string& name, unsigned depth, const Settings& s);

/// Named families for `probe ratio`: power-blocks (⋃_i [2^i, 2^i(1+2^{-n})), n < count)
/// or a random family (periodic, dyadic, finite, mixed) drawn with `seed`.
std::vector<NatSet> family_by_name(const std::string& name, std::size_t count, std::uint64_t seed);

}  // namespace densitas::cli
