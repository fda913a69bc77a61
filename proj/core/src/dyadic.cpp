#include "densitas/errors.hpp"
#include "densitas/natset.hpp"

#include <algorithm>

namespace densitas {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

Natural two_to(std::uint64_t n) {
  Natural p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, n);
  return p;
}

// Rounded offset of breakpoint b inside a block of length 2^n.
Natural offset(const Rational& b, std::uint64_t n, Rounding rounding) {
  Natural num = b.get_num() * two_to(n);
  const Natural& den = b.get_den();
  Natural out;
  if (rounding == Rounding::ceil) {
    mpz_cdiv_q(out.get_mpz_t(), num.get_mpz_t(), den.get_mpz_t());
  } else {
    Natural twice = 2 * num + den;
    Natural den2 = 2 * den;
    mpz_fdiv_q(out.get_mpz_t(), twice.get_mpz_t(), den2.get_mpz_t());
  }
  return out;
}

std::uint64_t block_of(const Natural& x) { return mpz_sizeinbase(x.get_mpz_t(), 2) - 1; }

}  // namespace

std::string_view to_string(Rounding r) { return r == Rounding::ceil ? "ceil" : "nearest"; }

Slice canonical_slice(Slice s) {
  for (auto& b : s) {
    b.canonicalize();
    if (b < 0 || b > 1) fail(ErrorCode::invalid_argument, "slice breakpoints must lie in [0,1]");
  }
  if (!std::is_sorted(s.begin(), s.end())) fail(ErrorCode::invalid_argument, "slice breakpoints must be sorted");
  if (s.size() % 2) fail(ErrorCode::invalid_argument, "slice needs an even number of breakpoints");
  Slice out;
  for (const auto& b : s) {
    if (!out.empty() && out.back() == b) out.pop_back();
    else out.push_back(b);
  }
  return out;
}

Rational slice_width(const Slice& s) {
  Rational w = 0;
  for (std::size_t i = 0; i + 1 < s.size(); i += 2) w += s[i + 1] - s[i];
  return w;
}

Slice combine_slices(const Slice& a, const Slice& b, SetOp op) {
  Slice points = a;
  points.insert(points.end(), b.begin(), b.end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  auto parity = [](const Slice& s, const Rational& x) {
    return (std::upper_bound(s.begin(), s.end(), x) - s.begin()) % 2 == 1;
  };
  auto apply = [op](bool x, bool y) {
    switch (op) {
      case SetOp::unite: return x || y;
      case SetOp::intersect: return x && y;
      case SetOp::difference: return x && !y;
      case SetOp::symdiff: return x != y;
    }
    return false;
  };
  Slice out;
  bool prev = false;
  for (const auto& g : points) {
    bool v = apply(parity(a, g), parity(b, g));
    if (v != prev) out.push_back(g);
    prev = v;
  }
  return canonical_slice(std::move(out));
}

FillRule FillRule::periodic(std::vector<Slice> prefix, std::vector<Slice> cycle) {
  if (cycle.empty()) fail(ErrorCode::invalid_argument, "fill rule cycle must be nonempty");
  FillRule r;
  r.kind_ = Kind::periodic;
  for (auto& s : prefix) r.prefix_.push_back(canonical_slice(std::move(s)));
  for (auto& s : cycle) r.cycle_.push_back(canonical_slice(std::move(s)));
  return r;
}

FillRule FillRule::constant(const Rational& fill) {
  if (fill < 0 || fill > 1) fail(ErrorCode::invalid_argument, "fill must lie in [0,1]");
  Slice s;
  if (fill > 0) s = {Rational(0), fill};
  return periodic({}, {s});
}

FillRule FillRule::reciprocal(const Rational& coefficient) {
  if (coefficient < 0) fail(ErrorCode::invalid_argument, "reciprocal fill coefficient must be >= 0");
  FillRule r;
  r.kind_ = Kind::reciprocal;
  r.coefficient_ = coefficient;
  r.coefficient_.canonicalize();
  return r;
}

Slice FillRule::slice(std::uint64_t n) const {
  if (kind_ == Kind::periodic) {
    if (n < prefix_.size()) return prefix_[n];
    return cycle_[(n - prefix_.size()) % cycle_.size()];
  }
  Rational f = coefficient_ / Rational(std::max<std::uint64_t>(n, 1));
  if (f > 1) f = 1;
  if (f == 0) return {};
  return {Rational(0), f};
}

bool FillRule::eventually_empty() const {
  if (kind_ == Kind::reciprocal) return coefficient_ == 0;
  return std::all_of(cycle_.begin(), cycle_.end(), [](const Slice& s) { return s.empty(); });
}

DyadicBlockSet::DyadicBlockSet(FillRule rule, Rounding rounding, FiniteSet additions, FiniteSet removals)
    : rule_(std::move(rule)), rounding_(rounding) {
  std::vector<Natural> add, del;
  for (const auto& x : additions.elements())
    if (!removals.contains(x) && !core_contains(x)) add.push_back(x);
  for (const auto& x : removals.elements())
    if (core_contains(x)) del.push_back(x);
  additions_ = FiniteSet(std::move(add));
  removals_ = FiniteSet(std::move(del));
}

std::vector<std::pair<Natural, Natural>> DyadicBlockSet::block_intervals(std::uint64_t n) const {
  std::vector<std::pair<Natural, Natural>> out;
  Natural base = two_to(n);
  auto s = rule_.slice(n);
  for (std::size_t i = 0; i + 1 < s.size(); i += 2) {
    Natural lo = base + offset(s[i], n, rounding_);
    Natural hi = base + offset(s[i + 1], n, rounding_);
    if (lo < hi) out.emplace_back(lo, hi);
  }
  return out;
}

bool DyadicBlockSet::core_contains(const Natural& x) const {
  if (x <= 0) return false;
  for (auto& [lo, hi] : block_intervals(block_of(x)))
    if (lo <= x && x < hi) return true;
  return false;
}

bool DyadicBlockSet::contains(const Natural& x) const {
  if (removals_.contains(x)) return false;
  return additions_.contains(x) || core_contains(x);
}

Natural DyadicBlockSet::core_count_range(const Natural& l, const Natural& r) const {
  auto below = [&](const Natural& y) {
    Natural total = 0;
    if (y <= 1) return total;
    std::uint64_t top = block_of(Natural(y - 1));
    for (std::uint64_t n = 0; n <= top; ++n)
      for (auto& [lo, hi] : block_intervals(n)) {
        if (lo >= y) break;
        total += std::min(hi, y) - lo;
      }
    return total;
  };
  return below(r) - below(l);
}

Natural DyadicBlockSet::count_range(const Natural& l, const Natural& r) const {
  if (l > r) fail(ErrorCode::invalid_argument, "count_range needs l <= r");
  return core_count_range(l, r) + additions_.count_range(l, r) - removals_.count_range(l, r);
}

}  // namespace densitas
