#pragma once

#include <densitas/natset.hpp>

#include <functional>

namespace oracle {

using Pred = std::function<bool(std::uint64_t)>;

inline std::uint64_t count(const Pred& p, std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t c = 0;
  for (auto x = lo; x < hi; ++x) c += p(x) ? 1 : 0;
  return c;
}

inline bool agrees(const densitas::NatSet& a, const Pred& p, std::uint64_t hi) {
  for (std::uint64_t x = 0; x < hi; ++x)
    if (a.member(x) != p(x)) return false;
  return true;
}

// sup_{1<=k<=n} |A∩[0,k)|/k by enumeration
inline densitas::Rational prefix_sup(const Pred& p, std::uint64_t n) {
  densitas::Rational best = 0;
  std::uint64_t c = 0;
  for (std::uint64_t k = 1; k <= n; ++k) {
    c += p(k - 1) ? 1 : 0;
    densitas::Rational q(static_cast<long>(c), static_cast<unsigned long>(k));
    if (q > best) best = q;
  }
  best.canonicalize();
  return best;
}

}  // namespace oracle
