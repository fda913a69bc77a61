#include "densitas/set_literal.hpp"

#include "densitas/errors.hpp"

#include <cctype>
#include <sstream>

namespace densitas {

namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : input_(text) {}

  NatSet parse() {
    skip_ws();
    NatSet out;
    if (keyword("omega")) out = NatSet::omega();
    else if (keyword("empty")) out = NatSet::empty();
    else if (keyword("fin")) out = finite();
    else if (keyword("per")) out = periodic();
    else if (peek_keyword("ap")) out = ap_union();
    else if (keyword("blocks")) out = blocks();
    else if (keyword("horizon")) out = horizon();
    else error("expected one of omega, empty, fin, per, ap, blocks, horizon");
    skip_ws();
    if (pos_ != input_.size()) error("unexpected trailing input");
    return out;
  }

 private:
  [[noreturn]] void error(const std::string& message) { error_at(message, pos_); }
  [[noreturn]] void error_at(const std::string& message, std::size_t at) {
    throw ParseError(std::string(input_), at, message);
  }

  void skip_ws() {
    while (pos_ < input_.size() && std::isspace(static_cast<unsigned char>(input_[pos_]))) ++pos_;
  }

  static bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  bool peek_keyword(std::string_view kw) {
    skip_ws();
    if (input_.substr(pos_, kw.size()) != kw) return false;
    std::size_t end = pos_ + kw.size();
    return end >= input_.size() || !ident_char(input_[end]);
  }

  bool keyword(std::string_view kw) {
    if (!peek_keyword(kw)) return false;
    pos_ += kw.size();
    return true;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < input_.size() && input_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) error(std::string("expected '") + c + "'");
    ++pos_;
  }

  // key '=' ; returns the key or empty when the next token is not a key.
  std::string key() {
    skip_ws();
    std::size_t start = pos_, p = pos_;
    while (p < input_.size() && (ident_char(input_[p]) || input_[p] == '(' || input_[p] == ')')) ++p;
    std::size_t q = p;
    while (q < input_.size() && std::isspace(static_cast<unsigned char>(input_[q]))) ++q;
    if (p == start || q >= input_.size() || input_[q] != '=') return {};
    pos_ = q + 1;
    return std::string(input_.substr(start, p - start));
  }

  std::string word() {
    skip_ws();
    std::size_t start = pos_;
    while (pos_ < input_.size()) {
      char c = input_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || std::string_view("{}[];,|=").find(c) != std::string_view::npos)
        break;
      ++pos_;
    }
    if (pos_ == start) error("expected a value");
    return std::string(input_.substr(start, pos_ - start));
  }

  Natural natural_from(const std::string& w, std::size_t at) {
    try {
      if (!w.empty() && w.back() == '!') {
        auto n = parse_natural(std::string_view(w).substr(0, w.size() - 1));
        if (n > 100000) error_at("factorial argument too large", at);
        return factorial(static_cast<unsigned>(to_u64(n)));
      }
      return parse_natural(w);
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception&) {
      error_at("expected a natural number, got '" + w + "'", at);
    }
  }

  Natural natural() {
    skip_ws();
    std::size_t at = pos_;
    return natural_from(word(), at);
  }

  std::uint64_t small_natural() {
    skip_ws();
    std::size_t at = pos_;
    Natural n = natural();
    if (!fits_u64(n)) error_at("value does not fit in 64 bits", at);
    return to_u64(n);
  }

  Modulus modulus() {
    skip_ws();
    std::size_t at = pos_;
    std::string w = word();
    auto star = w.find('*');
    if (star == std::string::npos) {
      Natural v = natural_from(w, at);
      return Modulus{v, w.back() == '!' ? w : std::string()};
    }
    Natural c = natural_from(w.substr(0, star), at);
    Natural f = natural_from(w.substr(star + 1), at + star + 1);
    return Modulus{c * f, w};
  }

  Rational rational() {
    skip_ws();
    std::size_t at = pos_;
    std::string w = word();
    try {
      return parse_rational(w);
    } catch (const std::exception&) {
      error_at("expected a rational number, got '" + w + "'", at);
    }
  }

  std::vector<Natural> natural_list() {
    expect('{');
    std::vector<Natural> out;
    if (peek('}')) {
      ++pos_;
      return out;
    }
    while (true) {
      skip_ws();
      std::size_t at = pos_;
      std::string w = word();
      auto dots = w.find("..");
      if (dots == std::string::npos) {
        out.push_back(natural_from(w, at));
      } else {
        Natural lo = natural_from(w.substr(0, dots), at);
        Natural hi = natural_from(w.substr(dots + 2), at + dots + 2);
        if (hi < lo) error_at("empty range", at);
        if (hi - lo > 10'000'000) error_at("range too long for an explicit finite set", at);
        for (Natural x = lo; x <= hi; ++x) out.push_back(x);
      }
      if (peek(',')) {
        ++pos_;
        continue;
      }
      expect('}');
      return out;
    }
  }

  std::vector<std::uint64_t> small_list() {
    skip_ws();
    std::size_t at = pos_;
    std::vector<std::uint64_t> out;
    for (const auto& x : natural_list()) {
      if (!fits_u64(x)) error_at("value does not fit in 64 bits", at);
      out.push_back(to_u64(x));
    }
    return out;
  }

  Slice slice() {
    expect('{');
    Slice s;
    if (peek('}')) {
      ++pos_;
      return s;
    }
    while (true) {
      s.push_back(rational());
      if (peek(',')) {
        ++pos_;
        continue;
      }
      expect('}');
      return s;
    }
  }

  std::vector<Slice> slice_list() {
    expect('[');
    std::vector<Slice> out;
    if (peek(']')) {
      ++pos_;
      return out;
    }
    while (true) {
      skip_ws();
      std::size_t at = pos_;
      try {
        out.push_back(canonical_slice(slice()));
      } catch (const ParseError&) {
        throw;
      } catch (const Error& e) {
        error_at(e.what(), at);
      }
      if (peek(';')) {
        ++pos_;
        continue;
      }
      expect(']');
      return out;
    }
  }

  template <class F>
  auto guarded(std::size_t at, F&& build) -> decltype(build()) {
    try {
      return build();
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      error_at(e.what(), at);
    }
  }

  NatSet finite() {
    std::size_t at = pos_;
    auto v = natural_list();
    return guarded(at, [&] { return NatSet(FiniteSet(std::move(v))); });
  }

  NatSet periodic() {
    std::size_t at = pos_;
    std::optional<std::uint64_t> m;
    std::optional<std::vector<std::uint64_t>> residues;
    std::uint64_t t = 0;
    std::vector<std::uint64_t> add, del;
    while (true) {
      std::size_t kat = pos_;
      std::string k = key();
      if (k.empty()) break;
      if (k == "m") m = small_natural();
      else if (k == "R") residues = small_list();
      else if (k == "t") t = small_natural();
      else if (k == "add") add = small_list();
      else if (k == "del") del = small_list();
      else error_at("unknown periodic field '" + k + "'", kat);
    }
    if (!m) error("periodic literal needs m=");
    if (!residues) error("periodic literal needs R=");
    if (t == 0) {
      for (auto x : add) t = std::max(t, x + 1);
      for (auto x : del) t = std::max(t, x + 1);
    }
    return guarded(at, [&] { return NatSet(PeriodicSet(*m, *residues, t, add, del)); });
  }

  NatSet ap_union() {
    std::size_t at = pos_;
    std::vector<APTerm> terms;
    std::vector<Natural> extras, removals;
    while (true) {
      keyword("ap");
      std::optional<Modulus> a;
      Natural h = 0, j0 = 0;
      bool any = false;
      while (true) {
        std::size_t kat = pos_;
        std::string k = key();
        if (k.empty()) break;
        any = true;
        if (k == "a") a = modulus();
        else if (k == "h") h = natural();
        else if (k == "j0") j0 = natural();
        else if (k == "add") {
          auto v = natural_list();
          extras.insert(extras.end(), v.begin(), v.end());
        } else if (k == "del") {
          auto v = natural_list();
          removals.insert(removals.end(), v.begin(), v.end());
        } else {
          error_at("unknown ap field '" + k + "'", kat);
        }
      }
      if (!any) error("expected ap fields a=, h=, j0= or add=/del=");
      if (a) terms.push_back(APTerm{*a, h, j0});
      else if (h != 0 || j0 != 0) error("ap term needs a=");
      if (!peek('|')) break;
      ++pos_;
    }
    return guarded(at, [&] {
      return NatSet(APUnionSet(std::move(terms), FiniteSet(std::move(extras)), FiniteSet(std::move(removals))));
    });
  }

  NatSet blocks() {
    std::size_t at = pos_;
    std::optional<FillRule> rule;
    std::vector<Slice> pre, cycle;
    bool general = false;
    Rounding rounding = Rounding::nearest;
    std::vector<Natural> add, del;
    while (true) {
      std::size_t kat = pos_;
      std::string k = key();
      if (k.empty()) break;
      if (k == "f(n)") {
        if (peek('[')) {
          ++pos_;
          std::vector<Slice> cyc;
          while (true) {
            Rational f = rational();
            if (f < 0 || f > 1) error("fill must lie in [0,1]");
            cyc.push_back(f == 0 ? Slice{} : Slice{Rational(0), f});
            if (peek(',')) {
              ++pos_;
              continue;
            }
            expect(']');
            break;
          }
          rule = FillRule::periodic({}, cyc);
        } else {
          skip_ws();
          std::size_t vat = pos_;
          std::string w = word();
          try {
            if (w.size() > 2 && w.substr(w.size() - 2) == "/n") rule = FillRule::reciprocal(parse_rational(w.substr(0, w.size() - 2)));
            else if (w == "1/n" || w == "n^-1") rule = FillRule::reciprocal(1);
            else rule = FillRule::constant(parse_rational(w));
          } catch (const std::exception& e) {
            error_at(std::string("bad fill rule: ") + e.what(), vat);
          }
        }
      } else if (k == "pre") {
        pre = slice_list();
        general = true;
      } else if (k == "cycle") {
        cycle = slice_list();
        general = true;
      } else if (k == "round") {
        skip_ws();
        std::size_t vat = pos_;
        std::string w = word();
        if (w == "ceil") rounding = Rounding::ceil;
        else if (w == "nearest") rounding = Rounding::nearest;
        else error_at("round must be nearest or ceil", vat);
      } else if (k == "add") {
        add = natural_list();
      } else if (k == "del") {
        del = natural_list();
      } else {
        error_at("unknown blocks field '" + k + "'", kat);
      }
    }
    if (general) {
      if (rule) error("use either f(n)= or pre=/cycle=, not both");
      if (cycle.empty()) error("blocks literal needs a nonempty cycle=");
      rule = FillRule::periodic(pre, cycle);
    }
    if (!rule) error("blocks literal needs f(n)= or cycle=");
    return guarded(at, [&] {
      return NatSet(DyadicBlockSet(*rule, rounding, FiniteSet(std::move(add)), FiniteSet(std::move(del))));
    });
  }

  NatSet horizon() {
    std::optional<std::uint64_t> H;
    std::string hex = "0";
    std::size_t hex_at = pos_;
    while (true) {
      std::size_t kat = pos_;
      std::string k = key();
      if (k.empty()) break;
      if (k == "H") {
        H = small_natural();
      } else if (k == "bits") {
        skip_ws();
        hex_at = pos_;
        hex = word();
      } else {
        error_at("unknown horizon field '" + k + "'", kat);
      }
    }
    if (!H) error("horizon literal needs H=");
    if (hex.rfind("0x", 0) == 0) hex = hex.substr(2);
    Natural v;
    if (v.set_str(hex, 16) != 0) error_at("bits= must be hexadecimal", hex_at);
    if (v != 0 && mpz_sizeinbase(v.get_mpz_t(), 2) > *H) error_at("bits set at or beyond H", hex_at);
    std::vector<bool> bits(*H, false);
    for (std::uint64_t i = 0; i < *H; ++i) bits[i] = mpz_tstbit(v.get_mpz_t(), i);
    return HorizonSet(*H, std::move(bits));
  }

  std::string_view input_;
  std::size_t pos_ = 0;
};

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

template <class Seq>
std::string braces(const Seq& items) {
  std::vector<std::string> parts;
  for (const auto& x : items) {
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, Natural>) parts.push_back(x.get_str());
    else parts.push_back(std::to_string(x));
  }
  return "{" + join(parts, ",") + "}";
}

std::string print_slice(const Slice& s) {
  std::vector<std::string> parts;
  for (const auto& b : s) parts.push_back(to_string(b));
  return "{" + join(parts, ",") + "}";
}

std::string print_slices(const std::vector<Slice>& v) {
  std::vector<std::string> parts;
  for (const auto& s : v) parts.push_back(print_slice(s));
  return "[" + join(parts, ";") + "]";
}

}  // namespace

NatSet parse_set_literal(std::string_view text) { return Parser(text).parse(); }

std::string print_set_literal(const NatSet& a) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        std::ostringstream out;
        if constexpr (std::is_same_v<T, FiniteSet>) {
          out << "fin" << braces(x.elements());
        } else if constexpr (std::is_same_v<T, HorizonSet>) {
          Natural v = 0;
          for (std::uint64_t i = 0; i < x.horizon(); ++i)
            if (x.bits()[i]) mpz_setbit(v.get_mpz_t(), i);
          out << "horizon H=" << x.horizon() << " bits=" << v.get_str(16);
        } else if constexpr (std::is_same_v<T, PeriodicSet>) {
          out << "per m=" << x.modulus() << " R=" << braces(x.residues());
          if (x.threshold()) out << " t=" << x.threshold();
          if (!x.additions().empty()) out << " add=" << braces(x.additions());
          if (!x.removals().empty()) out << " del=" << braces(x.removals());
        } else if constexpr (std::is_same_v<T, APUnionSet>) {
          std::vector<std::string> parts;
          for (const auto& t : x.terms()) {
            std::string s = "ap a=" + t.modulus.label() + " h=" + t.offset.get_str();
            if (t.start != 0) s += " j0=" + t.start.get_str();
            parts.push_back(s);
          }
          if (!x.extras().empty()) parts.push_back("add=" + braces(x.extras().elements()));
          if (!x.removals().empty()) parts.push_back("del=" + braces(x.removals().elements()));
          if (x.terms().empty()) {
            if (parts.empty()) return "ap add={}";
            parts[0] = "ap " + parts[0];
          }
          out << join(parts, " | ");
        } else {
          const auto& rule = x.rule();
          out << "blocks ";
          if (rule.kind() == FillRule::Kind::reciprocal) {
            out << "f(n)=" << to_string(rule.coefficient()) << "/n";
          } else if (rule.prefix().empty() && rule.cycle().size() == 1 &&
                     (rule.cycle()[0].empty() || (rule.cycle()[0].size() == 2 && rule.cycle()[0][0] == 0))) {
            out << "f(n)=" << (rule.cycle()[0].empty() ? std::string("0") : to_string(rule.cycle()[0][1]));
          } else {
            if (!rule.prefix().empty()) out << "pre=" << print_slices(rule.prefix()) << " ";
            out << "cycle=" << print_slices(rule.cycle());
          }
          if (x.rounding() == Rounding::ceil) out << " round=ceil";
          if (!x.additions().empty()) out << " add=" << braces(x.additions().elements());
          if (!x.removals().empty()) out << " del=" << braces(x.removals().elements());
        }
        return out.str();
      },
      a.variant());
}

}  // namespace densitas
