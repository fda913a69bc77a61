#include "densitas/weight.hpp"

#include "densitas/errors.hpp"

#include <cctype>
#include <cmath>
#include <vector>

namespace densitas {

struct WeightFunction::Node {
  enum class Kind { number, variable, add, sub, mul, div, pow, neg, log, sqrt, exp } kind;
  Rational number;
  std::shared_ptr<const Node> lhs, rhs;
};

namespace {

using NodePtr = std::shared_ptr<const WeightFunction::Node>;
using Kind = WeightFunction::Node::Kind;

NodePtr make(Kind k, NodePtr l = nullptr, NodePtr r = nullptr) {
  auto n = std::make_shared<WeightFunction::Node>();
  n->kind = k;
  n->lhs = std::move(l);
  n->rhs = std::move(r);
  return n;
}

class ExprParser {
 public:
  explicit ExprParser(const std::string& text) : text_(text) {}

  NodePtr parse() {
    auto e = expr();
    skip();
    if (pos_ != text_.size()) error("unexpected character");
    return e;
  }

 private:
  [[noreturn]] void error(const std::string& msg) { throw ParseError(text_, pos_, msg); }

  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool eat(char c) {
    skip();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    auto l = term();
    while (true) {
      if (eat('+')) l = make(Kind::add, l, term());
      else if (eat('-')) l = make(Kind::sub, l, term());
      else return l;
    }
  }

  NodePtr term() {
    auto l = unary();
    while (true) {
      if (eat('*')) l = make(Kind::mul, l, unary());
      else if (eat('/')) l = make(Kind::div, l, unary());
      else return l;
    }
  }

  NodePtr unary() {
    if (eat('-')) return make(Kind::neg, unary());
    auto base = primary();
    if (eat('^')) return make(Kind::pow, base, unary());
    return base;
  }

  NodePtr primary() {
    skip();
    if (pos_ >= text_.size()) error("unexpected end of expression");
    char c = text_[pos_];
    if (eat('(')) {
      auto e = expr();
      if (!eat(')')) error("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.')) ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        std::size_t save = pos_++;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
          while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        } else {
          pos_ = save;
        }
      }
      auto n = std::make_shared<WeightFunction::Node>();
      n->kind = Kind::number;
      try {
        n->number = parse_rational(text_.substr(start, pos_ - start));
      } catch (const std::exception&) {
        pos_ = start;
        error("bad number");
      }
      return n;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      std::string id = text_.substr(start, pos_ - start);
      if (id == "i" || id == "n") return make(Kind::variable);
      Kind k;
      if (id == "log") k = Kind::log;
      else if (id == "sqrt") k = Kind::sqrt;
      else if (id == "exp") k = Kind::exp;
      else {
        pos_ = start;
        error("unknown identifier '" + id + "'");
      }
      if (!eat('(')) error("expected '(' after " + id);
      auto arg = expr();
      if (!eat(')')) error("expected ')'");
      return make(k, arg);
    }
    error("unexpected character");
  }

  const std::string& text_;
  std::size_t pos_ = 0;
};

bool depends_on_i(const NodePtr& n) {
  if (!n) return false;
  if (n->kind == Kind::variable) return true;
  return depends_on_i(n->lhs) || depends_on_i(n->rhs);
}

long double eval_ld(const NodePtr& n, long double i) {
  switch (n->kind) {
    case Kind::number: return static_cast<long double>(n->number.get_d());
    case Kind::variable: return i;
    case Kind::add: return eval_ld(n->lhs, i) + eval_ld(n->rhs, i);
    case Kind::sub: return eval_ld(n->lhs, i) - eval_ld(n->rhs, i);
    case Kind::mul: return eval_ld(n->lhs, i) * eval_ld(n->rhs, i);
    case Kind::div: return eval_ld(n->lhs, i) / eval_ld(n->rhs, i);
    case Kind::pow: return std::pow(eval_ld(n->lhs, i), eval_ld(n->rhs, i));
    case Kind::neg: return -eval_ld(n->lhs, i);
    case Kind::log: return std::log(eval_ld(n->lhs, i));
    case Kind::sqrt: return std::sqrt(eval_ld(n->lhs, i));
    case Kind::exp: return std::exp(eval_ld(n->lhs, i));
  }
  return 0;
}

std::optional<Rational> eval_exact(const NodePtr& n, const Rational& i) {
  auto bin = [&](auto f) -> std::optional<Rational> {
    auto l = eval_exact(n->lhs, i);
    auto r = eval_exact(n->rhs, i);
    if (!l || !r) return std::nullopt;
    return f(*l, *r);
  };
  switch (n->kind) {
    case Kind::number: return n->number;
    case Kind::variable: return i;
    case Kind::add: return bin([](const Rational& a, const Rational& b) { return Rational(a + b); });
    case Kind::sub: return bin([](const Rational& a, const Rational& b) { return Rational(a - b); });
    case Kind::mul: return bin([](const Rational& a, const Rational& b) { return Rational(a * b); });
    case Kind::div: {
      auto l = eval_exact(n->lhs, i);
      auto r = eval_exact(n->rhs, i);
      if (!l || !r || *r == 0) return std::nullopt;
      return Rational(*l / *r);
    }
    case Kind::pow: {
      auto l = eval_exact(n->lhs, i);
      auto r = eval_exact(n->rhs, i);
      if (!l || !r || r->get_den() != 1 || abs(r->get_num()) > 4096) return std::nullopt;
      long e = r->get_num().get_si();
      if (e < 0 && *l == 0) return std::nullopt;
      Rational p = pow(*l, static_cast<unsigned>(e < 0 ? -e : e));
      if (e < 0) p = 1 / p;
      return p;
    }
    case Kind::neg: {
      auto l = eval_exact(n->lhs, i);
      if (!l) return std::nullopt;
      return Rational(-*l);
    }
    default: return std::nullopt;
  }
}

}  // namespace

WeightFunction::WeightFunction(std::string expression) : text_(std::move(expression)) {
  root_ = ExprParser(text_).parse();
}

bool WeightFunction::is_constant() const { return !depends_on_i(root_); }

long double WeightFunction::value(std::uint64_t i) const { return eval_ld(root_, static_cast<long double>(i)); }

std::optional<Rational> WeightFunction::exact(std::uint64_t i) const {
  auto v = eval_exact(root_, Rational(nat(i)));
  if (v) v->canonicalize();
  return v;
}

ErdosUlamCheck check_erdos_ulam(const WeightFunction& f, std::uint64_t horizon) {
  if (horizon < 64) return {false, "horizon too short for an Erdos-Ulam check"};
  std::vector<std::uint64_t> checkpoints;
  for (std::uint64_t n = 16; n <= horizon; n *= 2) checkpoints.push_back(n);
  long double sum = 0;
  std::vector<long double> sums;       // S(n) at checkpoints
  std::vector<long double> relative;   // f(n)/S(n) at checkpoints
  std::size_t next = 0;
  for (std::uint64_t i = 0; i < horizon && next < checkpoints.size(); ++i) {
    long double w = f.value(i);
    if (!std::isfinite(w) || w < 0) return {false, "weight f(" + std::to_string(i) + ") is negative or not finite"};
    sum += w;
    if (i + 1 == checkpoints[next]) {
      sums.push_back(sum);
      relative.push_back(sum > 0 ? f.value(i + 1) / sum : 1.0L);
      ++next;
    }
  }
  std::size_t k = sums.size();
  if (k < 3) return {false, "horizon too short for an Erdos-Ulam check"};
  long double last = sums[k - 1] - sums[k - 2];
  long double prev = sums[k - 2] - sums[k - 3];
  if (!(last > 0) || last < 0.9L * prev)
    return {false, "partial sums are not growing without bound over the observed range"};
  for (std::size_t j = 1; j < k; ++j)
    if (relative[j] > relative[j - 1] * (1 + 1e-12L))
      return {false, "f(n)/S(n) is not decreasing at n=" + std::to_string(checkpoints[j])};
  if (relative.back() > 1.0L / 16) return {false, "f(n)/S(n) does not tend to 0 over the observed range"};
  return {true, {}};
}

}  // namespace densitas
