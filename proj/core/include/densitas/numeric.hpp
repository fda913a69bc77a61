#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace densitas {

using Natural = mpz_class;
using Rational = mpq_class;

Natural nat(std::uint64_t v);
std::uint64_t to_u64(const Natural& v);  // throws invalid_argument when out of range
bool fits_u64(const Natural& v);

Rational make_rational(const Natural& num, const Natural& den);
Rational make_rational(std::int64_t num, std::int64_t den = 1);

/// "p/q", or "p" when the denominator is one.
std::string to_string(const Rational& q);
std::string to_string(const Natural& n);
/// Accepts "p", "p/q", "-p/q", "2^-k", and decimal literals such as "1e-6" or "0.25".
Rational parse_rational(std::string_view text);
Natural parse_natural(std::string_view text);

Natural factorial(unsigned n);
Natural lcm(const Natural& a, const Natural& b);
Rational pow(const Rational& base, unsigned exponent);
Rational two_pow(long exponent);  // 2^exponent for negative exponents too

/// Extended nonnegative quantity: an exact rational, a certified approximation, or +inf.
class ExtValue {
 public:
  enum class Kind { exact, approx, infinite };
  enum class Direction { lower_bound, upper_bound, two_sided };

  ExtValue() = default;  // exact 0

  static ExtValue exact(Rational value);
  static ExtValue infinite();
  /// For two_sided, the true value lies within [value - gap, value + gap].
  static ExtValue approx(Rational value, Direction direction, Rational gap = Rational(0));

  Kind kind() const { return kind_; }
  bool is_exact() const { return kind_ == Kind::exact; }
  bool is_infinite() const { return kind_ == Kind::infinite; }
  bool is_approx() const { return kind_ == Kind::approx; }
  Direction direction() const { return direction_; }
  const Rational& value() const { return value_; }
  const Rational& gap() const { return gap_; }
  double to_double() const;

  /// Exact rational value; throws invalid_argument for approx/infinite.
  const Rational& exact_value() const;

  /// Certified lower/upper bounds on the underlying quantity (nullopt = unbounded).
  std::optional<Rational> lower() const;
  std::optional<Rational> upper() const;

  bool operator==(const ExtValue& other) const;

  std::string to_string() const;

 private:
  Kind kind_ = Kind::exact;
  Direction direction_ = Direction::two_sided;
  Rational value_;
  Rational gap_;
};

ExtValue operator+(const ExtValue& a, const ExtValue& b);
ExtValue scale(const ExtValue& a, const Rational& factor);  // factor >= 0
ExtValue clamp_to_one(const ExtValue& a);                    // min{1, a}
ExtValue one_minus(const ExtValue& a);                       // 1 - a, for a in [0,1]

/// Exact three-way comparison helpers. Infinity compares above every rational.
/// Both operands must be exact or infinite.
bool exact_le(const ExtValue& a, const ExtValue& b);
bool exact_lt(const ExtValue& a, const ExtValue& b);

std::string_view to_string(ExtValue::Direction d);

}  // namespace densitas
