#pragma once

#include "densitas/numeric.hpp"

#include <functional>

namespace densitas {

/// Rational enclosure [lo, hi] of a real number, produced with outward rounding.
struct Enclosure {
  Rational lo;
  Rational hi;
};

Enclosure enclose_log(const Natural& n, unsigned bits);  // natural logarithm, n >= 1
Enclosure enclose_exp(const Rational& x, unsigned bits);
Enclosure operator*(const Enclosure& a, const Enclosure& b);  // both nonnegative
Enclosure operator*(const Enclosure& a, const Rational& c);   // c >= 0

/// Outcome of a certified strict comparison of a real quantity against a rational.
struct CertifiedComparison {
  bool holds = false;  // quantity < rhs (or > rhs for certify_greater)
  Enclosure enclosure;
  unsigned bits = 0;   // precision at which the comparison separated
};

/// Decides quantity < rhs, doubling the precision from `bits` up to `max_bits`
/// while the enclosure straddles rhs. Throws invalid_argument if it never separates.
CertifiedComparison certify_less(const std::function<Enclosure(unsigned)>& quantity, const Rational& rhs,
                                 unsigned bits, unsigned max_bits);
CertifiedComparison certify_greater(const std::function<Enclosure(unsigned)>& quantity, const Rational& rhs,
                                    unsigned bits, unsigned max_bits);

}  // namespace densitas
