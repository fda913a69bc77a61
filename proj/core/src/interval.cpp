#include "densitas/interval.hpp"

#include "densitas/errors.hpp"

#include <mpfr.h>

namespace densitas {

namespace {

class Mpfr {
 public:
  explicit Mpfr(unsigned bits) { mpfr_init2(v_, bits); }
  ~Mpfr() { mpfr_clear(v_); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
  mpfr_ptr get() { return v_; }

  Rational to_rational() {
    Rational q;
    mpfr_get_q(q.get_mpq_t(), v_);
    return q;
  }

 private:
  mpfr_t v_;
};

}  // namespace

Enclosure enclose_log(const Natural& n, unsigned bits) {
  if (n < 1) throw Error(ErrorCode::invalid_argument, "log of a non-positive number");
  Mpfr lo(bits), hi(bits);
  // Exact conversion is impossible for wide n at low precision, so round the
  // argument outward first and then the logarithm in the same direction.
  mpfr_set_z(lo.get(), n.get_mpz_t(), MPFR_RNDD);
  mpfr_set_z(hi.get(), n.get_mpz_t(), MPFR_RNDU);
  mpfr_log(lo.get(), lo.get(), MPFR_RNDD);
  mpfr_log(hi.get(), hi.get(), MPFR_RNDU);
  return {lo.to_rational(), hi.to_rational()};
}

Enclosure enclose_exp(const Rational& x, unsigned bits) {
  Mpfr lo(bits), hi(bits);
  mpfr_set_q(lo.get(), x.get_mpq_t(), MPFR_RNDD);
  mpfr_set_q(hi.get(), x.get_mpq_t(), MPFR_RNDU);
  mpfr_exp(lo.get(), lo.get(), MPFR_RNDD);
  mpfr_exp(hi.get(), hi.get(), MPFR_RNDU);
  return {lo.to_rational(), hi.to_rational()};
}

Enclosure operator*(const Enclosure& a, const Enclosure& b) {
  return {a.lo * b.lo, a.hi * b.hi};
}

Enclosure operator*(const Enclosure& a, const Rational& c) { return {a.lo * c, a.hi * c}; }

namespace {

CertifiedComparison certify(const std::function<Enclosure(unsigned)>& quantity, const Rational& rhs,
                            unsigned bits, unsigned max_bits, bool want_less) {
  for (unsigned b = bits; b <= max_bits; b *= 2) {
    Enclosure e = quantity(b);
    if (e.hi < rhs) return {want_less, e, b};
    if (e.lo > rhs) return {!want_less, e, b};
    if (e.lo == rhs && e.hi == rhs) return {false, e, b};
  }
  throw Error(ErrorCode::invalid_argument,
              "interval comparison against " + to_string(rhs) + " did not separate at " +
                  std::to_string(max_bits) + " bits");
}

}  // namespace

CertifiedComparison certify_less(const std::function<Enclosure(unsigned)>& quantity, const Rational& rhs,
                                 unsigned bits, unsigned max_bits) {
  return certify(quantity, rhs, bits, max_bits, true);
}

CertifiedComparison certify_greater(const std::function<Enclosure(unsigned)>& quantity, const Rational& rhs,
                                    unsigned bits, unsigned max_bits) {
  return certify(quantity, rhs, bits, max_bits, false);
}

}  // namespace densitas
