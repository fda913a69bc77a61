#include "densitas/sampling.hpp"

#include "densitas/errors.hpp"

#include <algorithm>

namespace densitas {

NatSet random_periodic(SplitMix64& rng, std::uint64_t max_modulus, std::uint64_t max_threshold) {
  const std::uint64_t m = rng.between(1, max_modulus);
  std::vector<std::uint64_t> residues;
  for (std::uint64_t r = 0; r < m; ++r)
    if (rng.chance(1, 2)) residues.push_back(r);
  const std::uint64_t t = rng.between(0, max_threshold);
  std::vector<std::uint64_t> candidates, flipped;
  for (std::uint64_t x = 0; x < t; ++x) {
    candidates.push_back(x);
    flipped.push_back(rng.chance(1, 4) ? 1 : 0);
  }
  PeriodicSet base(m, residues, t);
  return PeriodicSet::with_corrections(m, residues, t, candidates,
                                       [&](std::uint64_t x) { return base.pattern_contains(x) != (flipped[x] != 0); });
}

namespace {

Slice random_slice(SplitMix64& rng) {
  std::vector<Rational> points;
  for (std::uint64_t k = 0; k <= 16; ++k)
    if (rng.chance(1, 4)) points.push_back(make_rational(static_cast<std::int64_t>(k), 16));
  if (points.size() % 2 == 1) points.pop_back();
  return canonical_slice(std::move(points));
}

}  // namespace

NatSet random_dyadic(SplitMix64& rng, Rounding rounding) {
  std::vector<Slice> prefix, cycle;
  for (auto n = rng.below(3); n > 0; --n) prefix.push_back(random_slice(rng));
  for (auto n = rng.between(1, 3); n > 0; --n) cycle.push_back(random_slice(rng));
  return DyadicBlockSet(FillRule::periodic(std::move(prefix), std::move(cycle)), rounding);
}

NatSet random_finite(SplitMix64& rng, std::uint64_t max_value, std::uint64_t max_size) {
  std::vector<Natural> xs;
  for (auto n = rng.below(max_size + 1); n > 0; --n) xs.push_back(nat(rng.below(max_value + 1)));
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  return FiniteSet(std::move(xs));
}

std::vector<NatSet> random_family(const std::string& family, std::size_t count, std::uint64_t seed) {
  SplitMix64 rng(seed);
  std::vector<NatSet> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (family == "periodic") out.push_back(random_periodic(rng));
    else if (family == "dyadic") out.push_back(random_dyadic(rng));
    else if (family == "finite") out.push_back(random_finite(rng));
    else if (family == "mixed") {
      switch (rng.below(3)) {
        case 0: out.push_back(random_periodic(rng)); break;
        case 1: out.push_back(random_finite(rng)); break;
        default: out.push_back(random_periodic(rng, 24, 8)); break;
      }
    } else {
      throw Error(ErrorCode::invalid_argument, "unknown sample family '" + family + "' (periodic, dyadic, finite, mixed)");
    }
  }
  return out;
}

NatSet power_block_set(unsigned n) {
  return DyadicBlockSet(FillRule::constant(two_pow(-static_cast<long>(n))), Rounding::ceil);
}

}  // namespace densitas
