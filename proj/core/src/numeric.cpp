#include "densitas/numeric.hpp"

#include "densitas/errors.hpp"

#include <cctype>
#include <limits>
#include <sstream>

namespace densitas {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::query_beyond_horizon: return "QueryBeyondHorizon";
    case ErrorCode::incompatible_backends: return "IncompatibleBackends";
    case ErrorCode::modulus_budget_exceeded: return "ModulusBudgetExceeded";
    case ErrorCode::unsupported_backend: return "UnsupportedBackend";
    case ErrorCode::not_erdos_ulam: return "NotErdosUlam";
    case ErrorCode::sample_not_exact: return "SampleNotExact";
    case ErrorCode::insufficient_prefix: return "InsufficientPrefix";
    case ErrorCode::not_monotone: return "NotMonotone";
    case ErrorCode::non_summable_increments: return "NonSummableIncrements";
    case ErrorCode::no_exact_norm: return "NoExactNorm";
    case ErrorCode::no_valid_cut: return "NoValidCut";
    case ErrorCode::not_cauchy: return "NotCauchy";
    case ErrorCode::oracle_contract_violated: return "OracleContractViolated";
    case ErrorCode::schedule_too_short: return "ScheduleTooShort";
    case ErrorCode::invariants_failed: return "InvariantsFailed";
    case ErrorCode::kappa_mismatch: return "KappaMismatch";
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::parse_error: return "ParseError";
  }
  return "Unknown";
}

ParseError::ParseError(std::string input, std::size_t position, const std::string& message)
    : Error(ErrorCode::parse_error, message + " at position " + std::to_string(position)),
      input_(std::move(input)),
      position_(position) {}

std::string ParseError::caret() const {
  return input_ + "\n" + std::string(std::min(position_, input_.size()), ' ') + "^";
}

Natural nat(std::uint64_t v) {
  Natural out;
  mpz_import(out.get_mpz_t(), 1, 1, sizeof(v), 0, 0, &v);
  return out;
}

bool fits_u64(const Natural& v) {
  return sgn(v) >= 0 && mpz_sizeinbase(v.get_mpz_t(), 2) <= 64;
}

std::uint64_t to_u64(const Natural& v) {
  if (!fits_u64(v)) {
    throw Error(ErrorCode::invalid_argument, "value " + v.get_str() + " does not fit 64 bits");
  }
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

Rational make_rational(const Natural& num, const Natural& den) {
  if (den == 0) throw Error(ErrorCode::invalid_argument, "zero denominator");
  Rational q(num, den);
  q.canonicalize();
  return q;
}

Rational make_rational(std::int64_t num, std::int64_t den) {
  return make_rational(Natural(static_cast<long>(num)), Natural(static_cast<long>(den)));
}

std::string to_string(const Rational& q) {
  Rational r = q;
  r.canonicalize();
  return r.get_str();
}
std::string to_string(const Natural& n) { return n.get_str(); }

Natural parse_natural(std::string_view text) {
  if (text.empty()) throw Error(ErrorCode::invalid_argument, "empty natural");
  for (char c : text) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      throw Error(ErrorCode::invalid_argument, "not a natural: '" + std::string(text) + "'");
    }
  }
  return Natural(std::string(text));
}

Rational two_pow(long exponent) {
  Natural p = 1;
  if (exponent >= 0) {
    mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(exponent));
    return Rational(p);
  }
  mpz_mul_2exp(p.get_mpz_t(), p.get_mpz_t(), static_cast<mp_bitcnt_t>(-exponent));
  return make_rational(Natural(1), p);
}

Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto bad = [&] { return Error(ErrorCode::invalid_argument, "not a rational: '" + s + "'"); };
  if (s.empty()) throw bad();
  bool negative = false;
  std::string body = s;
  if (body[0] == '-' || body[0] == '+') {
    negative = body[0] == '-';
    body = body.substr(1);
  }
  Rational out;
  if (auto caret = body.find('^'); caret != std::string::npos) {
    if (body.substr(0, caret) != "2") throw bad();
    std::string e = body.substr(caret + 1);
    bool neg = !e.empty() && e[0] == '-';
    if (neg) e = e.substr(1);
    long k = static_cast<long>(to_u64(parse_natural(e)));
    out = two_pow(neg ? -k : k);
  } else if (auto slash = body.find('/'); slash != std::string::npos) {
    out = make_rational(parse_natural(body.substr(0, slash)), parse_natural(body.substr(slash + 1)));
  } else if (body.find_first_of(".eE") != std::string::npos) {
    // Decimal literal, converted exactly: mantissa digits times a power of ten.
    std::string mant = body;
    long exp10 = 0;
    if (auto e = body.find_first_of("eE"); e != std::string::npos) {
      mant = body.substr(0, e);
      std::string ex = body.substr(e + 1);
      bool neg = !ex.empty() && ex[0] == '-';
      if (!ex.empty() && (ex[0] == '-' || ex[0] == '+')) ex = ex.substr(1);
      exp10 = static_cast<long>(to_u64(parse_natural(ex)));
      if (neg) exp10 = -exp10;
    }
    if (auto dot = mant.find('.'); dot != std::string::npos) {
      exp10 -= static_cast<long>(mant.size() - dot - 1);
      mant.erase(dot, 1);
    }
    Natural m = parse_natural(mant);
    Natural ten_pow;
    mpz_ui_pow_ui(ten_pow.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    out = exp10 < 0 ? make_rational(m, ten_pow) : Rational(m * ten_pow);
  } else {
    out = Rational(parse_natural(body));
  }
  return negative ? Rational(-out) : out;
}

Natural factorial(unsigned n) {
  Natural out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

Natural lcm(const Natural& a, const Natural& b) {
  Natural out;
  mpz_lcm(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

Rational pow(const Rational& base, unsigned exponent) {
  Natural num, den;
  mpz_pow_ui(num.get_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(den.get_mpz_t(), base.get_den_mpz_t(), exponent);
  return make_rational(num, den);
}

ExtValue ExtValue::exact(Rational value) {
  if (sgn(value) < 0) throw Error(ErrorCode::invalid_argument, "negative extended value");
  ExtValue v;
  v.kind_ = Kind::exact;
  v.value_ = std::move(value);
  v.gap_ = 0;
  return v;
}

ExtValue ExtValue::infinite() {
  ExtValue v;
  v.kind_ = Kind::infinite;
  v.value_ = 0;
  return v;
}

ExtValue ExtValue::approx(Rational value, Direction direction, Rational gap) {
  ExtValue v;
  v.kind_ = Kind::approx;
  v.direction_ = direction;
  v.value_ = std::move(value);
  v.gap_ = std::move(gap);
  return v;
}

double ExtValue::to_double() const {
  if (is_infinite()) return std::numeric_limits<double>::infinity();
  return value_.get_d();
}

const Rational& ExtValue::exact_value() const {
  if (!is_exact()) throw Error(ErrorCode::invalid_argument, "value is not exact: " + to_string());
  return value_;
}

std::optional<Rational> ExtValue::lower() const {
  switch (kind_) {
    case Kind::exact: return value_;
    case Kind::infinite: return std::nullopt;
    case Kind::approx:
      if (direction_ == Direction::lower_bound) return value_;
      if (direction_ == Direction::two_sided) {
        Rational lo = value_ - gap_;
        return sgn(lo) < 0 ? Rational(0) : lo;
      }
      return Rational(0);
  }
  return std::nullopt;
}

std::optional<Rational> ExtValue::upper() const {
  switch (kind_) {
    case Kind::exact: return value_;
    case Kind::infinite: return std::nullopt;
    case Kind::approx:
      if (direction_ == Direction::upper_bound) return value_;
      if (direction_ == Direction::two_sided) return Rational(value_ + gap_);
      return std::nullopt;
  }
  return std::nullopt;
}

bool ExtValue::operator==(const ExtValue& other) const {
  return kind_ == other.kind_ && value_ == other.value_ &&
         (kind_ != Kind::approx || (direction_ == other.direction_ && gap_ == other.gap_));
}

std::string_view to_string(ExtValue::Direction d) {
  switch (d) {
    case ExtValue::Direction::lower_bound: return "lower-bound";
    case ExtValue::Direction::upper_bound: return "upper-bound";
    case ExtValue::Direction::two_sided: return "two-sided";
  }
  return "?";
}

std::string ExtValue::to_string() const {
  switch (kind_) {
    case Kind::exact: return densitas::to_string(value_);
    case Kind::infinite: return "inf";
    case Kind::approx: {
      std::ostringstream os;
      os << "~" << value_.get_d() << " (" << densitas::to_string(direction_);
      if (direction_ == Direction::two_sided) os << ", gap " << gap_.get_d();
      os << ")";
      return os.str();
    }
  }
  return "?";
}

namespace {

ExtValue::Direction combine(const ExtValue& a, const ExtValue& b) {
  // Exact operands do not constrain the direction of the other side.
  if (a.is_exact()) return b.direction();
  if (b.is_exact()) return a.direction();
  if (a.direction() == b.direction()) return a.direction();
  return ExtValue::Direction::two_sided;
}

}  // namespace

ExtValue operator+(const ExtValue& a, const ExtValue& b) {
  if (a.is_infinite() || b.is_infinite()) return ExtValue::infinite();
  if (a.is_exact() && b.is_exact()) return ExtValue::exact(a.value() + b.value());
  auto dir = combine(a, b);
  bool mixed = !a.is_exact() && !b.is_exact() && a.direction() != b.direction();
  if (mixed) {
    // Opposite one-sided bounds do not combine into anything certified.
    return ExtValue::approx(a.value() + b.value(), ExtValue::Direction::two_sided,
                            Rational(a.value() + b.value()));
  }
  return ExtValue::approx(a.value() + b.value(), dir, a.gap() + b.gap());
}

ExtValue scale(const ExtValue& a, const Rational& factor) {
  if (a.is_infinite()) return sgn(factor) == 0 ? ExtValue::exact(0) : a;
  if (a.is_exact()) return ExtValue::exact(a.value() * factor);
  return ExtValue::approx(a.value() * factor, a.direction(), a.gap() * factor);
}

ExtValue clamp_to_one(const ExtValue& a) {
  if (a.is_infinite()) return ExtValue::exact(1);
  if (a.is_exact()) return ExtValue::exact(a.value() > 1 ? Rational(1) : a.value());
  if (a.direction() == ExtValue::Direction::lower_bound && a.value() >= 1) return ExtValue::exact(1);
  if (a.direction() == ExtValue::Direction::two_sided && a.value() - a.gap() >= 1) return ExtValue::exact(1);
  Rational v = a.value() > 1 ? Rational(1) : a.value();
  return ExtValue::approx(v, a.direction(), a.gap());
}

ExtValue one_minus(const ExtValue& a) {
  if (a.is_infinite()) throw Error(ErrorCode::invalid_argument, "1 - inf is not a density value");
  if (a.is_exact()) {
    Rational v = 1 - a.value();
    if (sgn(v) < 0) throw Error(ErrorCode::invalid_argument, "1 - value is negative");
    return ExtValue::exact(v);
  }
  ExtValue::Direction flipped = a.direction();
  if (flipped == ExtValue::Direction::lower_bound) flipped = ExtValue::Direction::upper_bound;
  else if (flipped == ExtValue::Direction::upper_bound) flipped = ExtValue::Direction::lower_bound;
  Rational v = 1 - a.value();
  if (sgn(v) < 0) v = 0;
  return ExtValue::approx(v, flipped, a.gap());
}

namespace {

void require_comparable(const ExtValue& a, const ExtValue& b) {
  if (a.is_approx() || b.is_approx()) {
    throw Error(ErrorCode::sample_not_exact, "exact comparison of approximate values " + a.to_string() +
                                                 " and " + b.to_string());
  }
}

}  // namespace

bool exact_le(const ExtValue& a, const ExtValue& b) {
  require_comparable(a, b);
  if (b.is_infinite()) return true;
  if (a.is_infinite()) return false;
  return a.value() <= b.value();
}

bool exact_lt(const ExtValue& a, const ExtValue& b) {
  require_comparable(a, b);
  if (a.is_infinite()) return false;
  if (b.is_infinite()) return true;
  return a.value() < b.value();
}

}  // namespace densitas
