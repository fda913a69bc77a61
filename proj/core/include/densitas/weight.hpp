#pragma once

#include "densitas/numeric.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace densitas {

/// Closed-form weight f: ω -> [0,∞) written in i, e.g. "1", "1/(i+1)", "i^2", "1/log(i+2)".
/// Supports + - * / ^, parentheses, numbers, and log/sqrt/exp.
class WeightFunction {
 public:
  explicit WeightFunction(std::string expression);

  const std::string& expression() const { return text_; }
  bool is_constant() const;
  long double value(std::uint64_t i) const;
  /// Exact value when the expression is rational at i (no log/sqrt/exp, integer powers).
  std::optional<Rational> exact(std::uint64_t i) const;

  struct Node;

 private:
  std::string text_;
  std::shared_ptr<const Node> root_;
};

struct ErdosUlamCheck {
  bool valid = false;
  std::string reason;
};

/// Empirical Erdős–Ulam test on [0, horizon): weights nonnegative, partial sums still
/// growing over the last doubling at >= 0.9x the previous doubling's increment, and
/// f(n)/S(n) nonincreasing along powers of two and below 1/16 at the horizon.
ErdosUlamCheck check_erdos_ulam(const WeightFunction& f, std::uint64_t horizon);

}  // namespace densitas
