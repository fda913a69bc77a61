#include "catalog.hpp"

#include <densitas/errors.hpp>
#include <densitas/sampling.hpp>
#include <densitas/set_literal.hpp>

namespace densitas::cli {

namespace {

NatSet points_term(std::uint64_t n) {
  std::vector<Natural> xs;
  for (std::uint64_t j = 0; j < n; ++j) xs.push_back(two_pow(static_cast<long>(j)).get_num());
  return FiniteSet(std::move(xs));
}

NatSet valuation_term(std::uint64_t n, const Settings& s) {
  NatSet a = NatSet::empty();
  for (std::uint64_t j = 0; j < n; ++j) {
    const std::uint64_t m = std::uint64_t{2} << j;
    a = set_union(a, PeriodicSet(m, {m / 2}), s);
  }
  return a;
}

}  // namespace

SetSequence sequence_by_name(const std::string& name, unsigned depth, const Settings& s) {
  if (name == "points") {
    std::vector<NatSet> terms;
    for (unsigned n = 0; n < depth; ++n) terms.push_back(points_term(n));
    return SetSequence::summable_increments(std::move(terms), [](std::uint64_t) { return Rational(0); },
                                            "finite-increments");
  }
  if (name == "valuation") {
    if (depth > 20) throw Error(ErrorCode::invalid_argument, "valuation sequence depth is capped at 20");
    std::vector<NatSet> terms;
    for (unsigned n = 0; n < depth; ++n) terms.push_back(valuation_term(n, s));
    auto seq = SetSequence::summable_increments(std::move(terms), [](std::uint64_t n) {
      return two_pow(-static_cast<long>(n));
    }, "geometric-increments");
    seq.limit = declared_limit(name, depth, s);
    return seq;
  }
  if (name == "witness") {
    auto w = build_witness(derive_params(Rational(1, 2), depth + 2, s), depth, s);
    return witness_sequence(w);
  }
  if (name.rfind("constant:", 0) == 0) return SetSequence::constant(parse_set_literal(name.substr(9)));
  throw Error(ErrorCode::invalid_argument, "unknown sequence '" + name + "' (points, valuation, witness, constant:<set>)");
}

std::optional<NatSet> declared_limit(const std::string& name, unsigned, const Settings&) {
  if (name == "valuation") return NatSet(PeriodicSet(1, {0}, 1, {}, {0}));
  if (name.rfind("constant:", 0) == 0) return parse_set_literal(name.substr(9));
  return std::nullopt;
}

std::vector<NatSet> family_by_name(const std::string& name, std::size_t count, std::uint64_t seed) {
  if (name == "power-blocks") {
    std::vector<NatSet> out;
    for (std::size_t n = 0; n < count; ++n) out.push_back(power_block_set(static_cast<unsigned>(n)));
    return out;
  }
  return random_family(name, count, seed);
}

}  // namespace densitas::cli
