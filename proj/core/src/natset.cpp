#include "densitas/natset.hpp"

#include "densitas/errors.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

namespace densitas {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

bool apply(SetOp op, bool x, bool y) {
  switch (op) {
    case SetOp::unite: return x || y;
    case SetOp::intersect: return x && y;
    case SetOp::difference: return x && !y;
    case SetOp::symdiff: return x != y;
  }
  return false;
}

template <class T>
void sort_unique(std::vector<T>& v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
}

bool contains_sorted(const std::vector<std::uint64_t>& v, std::uint64_t x) {
  return std::binary_search(v.begin(), v.end(), x);
}

std::uint64_t count_sorted(const std::vector<std::uint64_t>& v, const Natural& l, const Natural& r) {
  auto below = [&](const Natural& y) -> std::uint64_t {
    if (!fits_u64(y)) return v.size();
    return static_cast<std::uint64_t>(std::lower_bound(v.begin(), v.end(), to_u64(y)) - v.begin());
  };
  return below(r) - below(l);
}

std::vector<std::uint64_t> to_u64_list(const FiniteSet& f) {
  std::vector<std::uint64_t> out;
  out.reserve(f.size());
  for (const auto& x : f.elements()) out.push_back(to_u64(x));
  return out;
}

FiniteSet from_u64_list(const std::vector<std::uint64_t>& v) {
  std::vector<Natural> out;
  out.reserve(v.size());
  for (auto x : v) out.push_back(nat(x));
  return FiniteSet(std::move(out));
}

void check_residues(std::uint64_t count, const Settings& s) {
  if (count > s.residue_budget)
    fail(ErrorCode::modulus_budget_exceeded,
         std::to_string(count) + " residues exceed residue_budget=" + std::to_string(s.residue_budget));
}

// Smallest period d | m of the residue pattern.
std::pair<std::uint64_t, std::vector<std::uint64_t>> reduce_period(std::uint64_t m, std::vector<std::uint64_t> residues) {
  std::vector<bool> bits(m, false);
  for (auto r : residues) bits[r] = true;
  auto invariant = [&](std::uint64_t d) {
    for (std::uint64_t r = 0; r < m; ++r)
      if (bits[r] != bits[(r + d) % m]) return false;
    return true;
  };
  std::uint64_t rest = m;
  for (std::uint64_t p = 2; p * p <= rest || rest > 1; ++p) {
    if (p * p > rest) p = rest;
    if (rest % p) continue;
    while (rest % p == 0) rest /= p;
    while (m % p == 0 && invariant(m / p)) {
      m /= p;
      bits.resize(m);
    }
  }
  residues.clear();
  for (std::uint64_t r = 0; r < m; ++r)
    if (bits[r]) residues.push_back(r);
  return {m, residues};
}

struct Progression {
  Natural residue;  // least element >= floor, congruent to the class
  Natural modulus;
  Natural floor;
};

// Intersection of {x >= f1, x ≡ c1 (m1)} and {x >= f2, x ≡ c2 (m2)}.
std::optional<Progression> intersect(const Progression& a, const Progression& b) {
  Natural g;
  mpz_gcd(g.get_mpz_t(), a.modulus.get_mpz_t(), b.modulus.get_mpz_t());
  Natural diff = b.residue - a.residue;
  if (Natural(diff % g) != 0) return std::nullopt;
  Natural m1g = a.modulus / g, m2g = b.modulus / g;
  Natural inv = 0;
  if (m2g == 1) {
    inv = 0;
  } else {
    mpz_invert(inv.get_mpz_t(), m1g.get_mpz_t(), m2g.get_mpz_t());
  }
  Natural k = (diff / g) * inv;
  mpz_fdiv_r(k.get_mpz_t(), k.get_mpz_t(), m2g.get_mpz_t());
  Natural modulus = m1g * b.modulus;
  Natural c = a.residue + a.modulus * k;
  mpz_fdiv_r(c.get_mpz_t(), c.get_mpz_t(), modulus.get_mpz_t());
  return Progression{c, modulus, std::max(a.floor, b.floor)};
}

Natural count_progression_below(const Progression& p, const Natural& y) {
  // first element >= floor congruent to residue
  Natural delta = p.residue - p.floor;
  mpz_fdiv_r(delta.get_mpz_t(), delta.get_mpz_t(), p.modulus.get_mpz_t());
  Natural first = p.floor + delta;
  if (y <= first) return 0;
  return Natural((y - 1 - first) / p.modulus) + 1;
}

Progression progression_of(const APTerm& t) { return {t.residue(), t.modulus.value, t.first()}; }

}  // namespace

std::string_view to_string(Backend b) {
  switch (b) {
    case Backend::finite: return "finite";
    case Backend::horizon: return "horizon";
    case Backend::periodic: return "periodic";
    case Backend::ap_union: return "ap-union";
    case Backend::dyadic_block: return "dyadic-block";
  }
  return "?";
}

std::string_view to_string(SetOp op) {
  switch (op) {
    case SetOp::unite: return "union";
    case SetOp::intersect: return "intersect";
    case SetOp::difference: return "difference";
    case SetOp::symdiff: return "symdiff";
  }
  return "?";
}

// ---------------------------------------------------------------- FiniteSet

FiniteSet::FiniteSet(std::vector<Natural> elements) : elements_(std::move(elements)) {
  for (const auto& e : elements_)
    if (e < 0) fail(ErrorCode::invalid_argument, "finite set elements must be natural numbers");
  sort_unique(elements_);
}

FiniteSet FiniteSet::interval(std::uint64_t lo, std::uint64_t hi) {
  std::vector<Natural> v;
  for (auto x = lo; x < hi; ++x) v.push_back(nat(x));
  return FiniteSet(std::move(v));
}

bool FiniteSet::contains(const Natural& n) const { return std::binary_search(elements_.begin(), elements_.end(), n); }

Natural FiniteSet::count_range(const Natural& l, const Natural& r) const {
  auto lo = std::lower_bound(elements_.begin(), elements_.end(), l);
  auto hi = std::lower_bound(elements_.begin(), elements_.end(), r);
  return nat(static_cast<std::uint64_t>(hi > lo ? hi - lo : 0));
}

// ---------------------------------------------------------------- HorizonSet

HorizonSet::HorizonSet(std::uint64_t horizon, std::vector<bool> bits) : horizon_(horizon), bits_(std::move(bits)) {
  if (bits_.size() > horizon_) fail(ErrorCode::invalid_argument, "horizon bitset longer than its horizon");
  bits_.resize(horizon_, false);
  prefix_.assign(horizon_ + 1, 0);
  for (std::uint64_t i = 0; i < horizon_; ++i) prefix_[i + 1] = prefix_[i] + (bits_[i] ? 1 : 0);
}

void HorizonSet::require_known(const Natural& n, bool inclusive_end) const {
  bool ok = inclusive_end ? n <= nat(horizon_) : n < nat(horizon_);
  if (!ok)
    fail(ErrorCode::query_beyond_horizon,
         "query at " + n.get_str() + " but membership is only known below H=" + std::to_string(horizon_));
}

bool HorizonSet::contains(const Natural& n) const {
  require_known(n, false);
  return bits_[to_u64(n)];
}

Natural HorizonSet::count_range(const Natural& l, const Natural& r) const {
  require_known(r, true);
  return nat(count_u64(to_u64(l), to_u64(r)));
}

// ---------------------------------------------------------------- PeriodicSet

PeriodicSet::PeriodicSet(std::uint64_t modulus, std::vector<std::uint64_t> residues, std::uint64_t threshold,
                         std::vector<std::uint64_t> additions, std::vector<std::uint64_t> removals)
    : modulus_(modulus), residues_(std::move(residues)), threshold_(threshold) {
  if (modulus_ == 0) fail(ErrorCode::invalid_argument, "periodic modulus must be at least 1");
  sort_unique(residues_);
  for (auto r : residues_)
    if (r >= modulus_) fail(ErrorCode::invalid_argument, "residue " + std::to_string(r) + " not below modulus");
  sort_unique(additions);
  sort_unique(removals);
  for (auto x : additions) {
    if (x >= threshold_) fail(ErrorCode::invalid_argument, "exception " + std::to_string(x) + " not below threshold");
    if (contains_sorted(removals, x)) fail(ErrorCode::invalid_argument, "element both added and removed");
    if (!pattern_contains(x)) additions_.push_back(x);
  }
  for (auto x : removals) {
    if (x >= threshold_) fail(ErrorCode::invalid_argument, "exception " + std::to_string(x) + " not below threshold");
    if (pattern_contains(x)) removals_.push_back(x);
  }
}

PeriodicSet PeriodicSet::with_corrections(std::uint64_t modulus, std::vector<std::uint64_t> residues,
                                          std::uint64_t threshold, const std::vector<std::uint64_t>& candidates,
                                          const std::function<bool(std::uint64_t)>& actual) {
  PeriodicSet base(modulus, residues, threshold);
  std::vector<std::uint64_t> add, del;
  for (auto c : candidates) {
    bool pat = base.pattern_contains(c);
    bool act = actual(c);
    if (pat == act) continue;
    if (c >= threshold) fail(ErrorCode::invalid_argument, "correction above the periodic threshold");
    (act ? add : del).push_back(c);
  }
  return PeriodicSet(modulus, std::move(residues), threshold, std::move(add), std::move(del));
}

bool PeriodicSet::pattern_contains(std::uint64_t n) const { return contains_sorted(residues_, n % modulus_); }

bool PeriodicSet::pattern_contains(const Natural& n) const {
  Natural r = n % nat(modulus_);
  return contains_sorted(residues_, to_u64(r));
}

bool PeriodicSet::contains(const Natural& n) const {
  if (n < nat(threshold_)) {
    auto x = to_u64(n);
    if (contains_sorted(additions_, x)) return true;
    if (contains_sorted(removals_, x)) return false;
  }
  return pattern_contains(n);
}

Natural PeriodicSet::pattern_count_below(const Natural& y) const {
  Natural m = nat(modulus_);
  Natural q = y / m;
  std::uint64_t rem = to_u64(Natural(y % m));
  auto partial = static_cast<std::uint64_t>(std::lower_bound(residues_.begin(), residues_.end(), rem) - residues_.begin());
  return q * nat(residues_.size()) + nat(partial);
}

Natural PeriodicSet::count_range(const Natural& l, const Natural& r) const {
  if (l > r) fail(ErrorCode::invalid_argument, "count_range needs l <= r");
  Natural c = pattern_count_below(r) - pattern_count_below(l);
  c += nat(count_sorted(additions_, l, r));
  c -= nat(count_sorted(removals_, l, r));
  return c;
}

// ---------------------------------------------------------------- APUnionSet

Modulus Modulus::factorial(unsigned n) { return Modulus{densitas::factorial(n), std::to_string(n) + "!"}; }

Natural APTerm::residue() const { return offset % modulus.value; }

bool APTerm::contains(const Natural& x) const {
  if (x < first()) return false;
  return Natural((x - offset) % modulus.value) == 0;
}

Natural APTerm::count_below(const Natural& y) const {
  Natural f = first();
  if (y <= f) return 0;
  return Natural((y - 1 - f) / modulus.value) + 1;
}

APUnionSet::APUnionSet(std::vector<APTerm> terms, FiniteSet extras, FiniteSet removals) {
  for (auto& t : terms) {
    if (t.modulus.value < 1) fail(ErrorCode::invalid_argument, "AP modulus must be at least 1");
    if (t.offset < 0 || t.start < 0) fail(ErrorCode::invalid_argument, "AP offset and start must be natural");
    if (std::find(terms_.begin(), terms_.end(), t) == terms_.end()) terms_.push_back(std::move(t));
  }
  // union-find over overlapping residue classes
  std::vector<std::size_t> parent(terms_.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<std::size_t(std::size_t)> root = [&](std::size_t i) {
    return parent[i] == i ? i : parent[i] = root(parent[i]);
  };
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    for (std::size_t j = i + 1; j < terms_.size(); ++j) {
      const auto& a = terms_[i];
      const auto& b = terms_[j];
      bool overlap;
      if (a.modulus.value == b.modulus.value) {
        overlap = a.residue() == b.residue();
      } else {
        Natural g;
        mpz_gcd(g.get_mpz_t(), a.modulus.value.get_mpz_t(), b.modulus.value.get_mpz_t());
        overlap = Natural((a.offset - b.offset) % g) == 0;
      }
      if (overlap) parent[root(i)] = root(j);
    }
  }
  std::vector<std::vector<std::size_t>> groups(terms_.size());
  for (std::size_t i = 0; i < terms_.size(); ++i) groups[root(i)].push_back(i);
  for (auto& g : groups)
    if (!g.empty()) components_.push_back(std::move(g));

  std::vector<Natural> ex, rm;
  for (const auto& x : extras.elements())
    if (!removals.contains(x) && !in_terms(x)) ex.push_back(x);
  for (const auto& x : removals.elements())
    if (in_terms(x)) rm.push_back(x);
  extras_ = FiniteSet(std::move(ex));
  removals_ = FiniteSet(std::move(rm));
}

bool APUnionSet::terms_pairwise_disjoint() const { return components_.size() == terms_.size(); }

bool APUnionSet::in_terms(const Natural& x) const {
  return std::any_of(terms_.begin(), terms_.end(), [&](const APTerm& t) { return t.contains(x); });
}

bool APUnionSet::contains(const Natural& x) const {
  if (removals_.contains(x)) return false;
  return extras_.contains(x) || in_terms(x);
}

Natural APUnionSet::count_terms_below(const Natural& y, const Settings& s) const {
  Natural total = 0;
  for (const auto& comp : components_) {
    if (comp.size() == 1) {
      total += terms_[comp[0]].count_below(y);
      continue;
    }
    if (comp.size() > s.inclusion_exclusion_cap)
      fail(ErrorCode::modulus_budget_exceeded,
           std::to_string(comp.size()) + " overlapping AP terms exceed inclusion_exclusion_cap=" +
               std::to_string(s.inclusion_exclusion_cap) + "; normalize_periodic first");
    std::size_t k = comp.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
      std::optional<Progression> p;
      bool empty = false;
      for (std::size_t i = 0; i < k && !empty; ++i) {
        if (!(mask >> i & 1)) continue;
        auto q = progression_of(terms_[comp[i]]);
        if (!p) {
          p = q;
        } else {
          p = intersect(*p, q);
          empty = !p.has_value();
        }
      }
      if (empty) continue;
      Natural c = count_progression_below(*p, y);
      if (__builtin_popcountll(mask) % 2) total += c; else total -= c;
    }
  }
  return total;
}

Natural APUnionSet::count_range(const Natural& l, const Natural& r, const Settings& s) const {
  if (l > r) fail(ErrorCode::invalid_argument, "count_range needs l <= r");
  return count_terms_below(r, s) - count_terms_below(l, s) + extras_.count_range(l, r) - removals_.count_range(l, r);
}

Rational APUnionSet::density(const Settings& s) const {
  Rational total = 0;
  for (const auto& comp : components_) {
    if (comp.size() == 1) {
      total += Rational(1, terms_[comp[0]].modulus.value);
      continue;
    }
    if (comp.size() > s.inclusion_exclusion_cap)
      fail(ErrorCode::modulus_budget_exceeded, "overlapping AP terms exceed inclusion_exclusion_cap");
    std::size_t k = comp.size();
    for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << k); ++mask) {
      std::optional<Progression> p;
      bool empty = false;
      for (std::size_t i = 0; i < k && !empty; ++i) {
        if (!(mask >> i & 1)) continue;
        auto q = progression_of(terms_[comp[i]]);
        if (!p) {
          p = q;
        } else {
          p = intersect(*p, q);
          empty = !p.has_value();
        }
      }
      if (empty) continue;
      Rational c(1, p->modulus);
      if (__builtin_popcountll(mask) % 2) total += c; else total -= c;
    }
  }
  total.canonicalize();
  return total;
}

Natural APUnionSet::modulus_lcm() const {
  Natural l = 1;
  for (const auto& t : terms_) l = lcm(l, t.modulus.value);
  return l;
}

// ---------------------------------------------------------------- NatSet

NatSet::NatSet() : NatSet(FiniteSet{}) {}
NatSet::NatSet(FiniteSet s) : rep_(std::make_shared<const Variant>(std::move(s))) {}
NatSet::NatSet(HorizonSet s) : rep_(std::make_shared<const Variant>(std::move(s))) {}
NatSet::NatSet(PeriodicSet s) : rep_(std::make_shared<const Variant>(std::move(s))) {}
NatSet::NatSet(APUnionSet s) : rep_(std::make_shared<const Variant>(std::move(s))) {}
NatSet::NatSet(DyadicBlockSet s) : rep_(std::make_shared<const Variant>(std::move(s))) {}

NatSet NatSet::omega() { return NatSet(PeriodicSet(1, {0})); }
NatSet NatSet::empty() { return NatSet(FiniteSet{}); }

Backend NatSet::backend() const { return static_cast<Backend>(rep_->index()); }

bool NatSet::member(const Natural& n) const {
  if (n < 0) fail(ErrorCode::invalid_argument, "membership query on a negative number");
  return std::visit([&](const auto& s) { return s.contains(n); }, *rep_);
}

Natural NatSet::count_range(const Natural& l, const Natural& r) const {
  if (l < 0 || l > r) fail(ErrorCode::invalid_argument, "count_range needs 0 <= l <= r");
  return std::visit([&](const auto& s) { return s.count_range(l, r); }, *rep_);
}

std::uint64_t NatSet::count_u64(std::uint64_t l, std::uint64_t r) const { return to_u64(count_range(nat(l), nat(r))); }

// ---------------------------------------------------------------- helpers on NatSet

bool is_finite(const NatSet& a) {
  return std::visit(
      [](const auto& s) -> bool {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FiniteSet>) return true;
        else if constexpr (std::is_same_v<T, HorizonSet>) return false;
        else if constexpr (std::is_same_v<T, PeriodicSet>) return s.residues().empty();
        else if constexpr (std::is_same_v<T, APUnionSet>) return s.terms().empty();
        else return s.rule().eventually_empty();
      },
      a.variant());
}

namespace {

// Provably finite set as an explicit FiniteSet.
FiniteSet as_finite(const NatSet& a) {
  if (auto f = a.get_if<FiniteSet>()) return *f;
  if (auto p = a.get_if<PeriodicSet>()) return from_u64_list(p->additions());
  if (auto u = a.get_if<APUnionSet>()) return u->extras();
  if (auto d = a.get_if<DyadicBlockSet>()) {
    const auto& rule = d->rule();
    std::vector<Natural> out;
    for (std::uint64_t n = 0; n < rule.prefix().size(); ++n)
      for (auto& [lo, hi] : d->block_intervals(n))
        for (Natural x = lo; x < hi; ++x) out.push_back(x);
    for (const auto& x : d->additions().elements()) out.push_back(x);
    std::vector<Natural> kept;
    for (auto& x : out)
      if (!d->removals().contains(x)) kept.push_back(x);
    return FiniteSet(std::move(kept));
  }
  fail(ErrorCode::invalid_argument, "set is not provably finite");
}

std::vector<std::uint64_t> merged(std::initializer_list<const std::vector<std::uint64_t>*> lists) {
  std::vector<std::uint64_t> out;
  for (auto* l : lists) out.insert(out.end(), l->begin(), l->end());
  sort_unique(out);
  return out;
}

PeriodicSet periodic_op(const PeriodicSet& a, const PeriodicSet& b, SetOp op, const Settings& s) {
  Natural L = lcm(nat(a.modulus()), nat(b.modulus()));
  if (L > nat(s.modulus_budget))
    fail(ErrorCode::modulus_budget_exceeded,
         "lcm " + L.get_str() + " exceeds modulus_budget=" + std::to_string(s.modulus_budget));
  auto m = to_u64(L);
  std::vector<bool> bits(m);
  std::uint64_t count = 0;
  for (std::uint64_t r = 0; r < m; ++r) {
    bits[r] = apply(op, a.pattern_contains(r), b.pattern_contains(r));
    count += bits[r] ? 1 : 0;
  }
  check_residues(count, s);
  std::vector<std::uint64_t> residues;
  residues.reserve(count);
  for (std::uint64_t r = 0; r < m; ++r)
    if (bits[r]) residues.push_back(r);
  auto [rm, rr] = reduce_period(m, std::move(residues));
  auto candidates = merged({&a.additions(), &a.removals(), &b.additions(), &b.removals()});
  auto t = std::max(a.threshold(), b.threshold());
  return PeriodicSet::with_corrections(rm, rr, t, candidates, [&](std::uint64_t x) {
    return apply(op, a.contains(nat(x)), b.contains(nat(x)));
  });
}

// Result of combining a structured set with a finite one: the pattern is kept
// when op(x, 0) = x, otherwise the result lies inside the finite operand.
bool keeps_pattern(SetOp op, bool structured_is_left) {
  switch (op) {
    case SetOp::unite:
    case SetOp::symdiff: return true;
    case SetOp::intersect: return false;
    case SetOp::difference: return structured_is_left;
  }
  return false;
}

FiniteSet filter_finite(const FiniteSet& f, const NatSet& a, const NatSet& b, SetOp op) {
  std::vector<Natural> out;
  for (const auto& x : f.elements())
    if (apply(op, a.member(x), b.member(x))) out.push_back(x);
  return FiniteSet(std::move(out));
}

APUnionSet ap_with_corrections(std::vector<APTerm> terms, const std::vector<Natural>& candidates,
                               const std::function<bool(const Natural&)>& actual) {
  APUnionSet base(terms);
  std::vector<Natural> ex, rm;
  for (const auto& c : candidates) {
    bool act = actual(c);
    bool pat = base.in_terms(c);
    if (act && !pat) ex.push_back(c);
    if (!act && pat) rm.push_back(c);
  }
  return APUnionSet(std::move(terms), FiniteSet(std::move(ex)), FiniteSet(std::move(rm)));
}

std::vector<Natural> exception_points(const APUnionSet& a) {
  std::vector<Natural> v = a.extras().elements();
  v.insert(v.end(), a.removals().elements().begin(), a.removals().elements().end());
  return v;
}

NatSet ap_op(const APUnionSet& a, const APUnionSet& b, SetOp op, const Settings& s) {
  auto candidates = exception_points(a);
  auto more = exception_points(b);
  candidates.insert(candidates.end(), more.begin(), more.end());
  auto actual = [&](const Natural& x) { return apply(op, a.contains(x), b.contains(x)); };

  if (op == SetOp::unite) {
    auto terms = a.terms();
    terms.insert(terms.end(), b.terms().begin(), b.terms().end());
    return ap_with_corrections(std::move(terms), candidates, actual);
  }
  // Term-level combination is exact when all distinct terms are pairwise disjoint.
  auto all = a.terms();
  all.insert(all.end(), b.terms().begin(), b.terms().end());
  APUnionSet combined(all);
  if (combined.terms_pairwise_disjoint()) {
    std::vector<APTerm> terms;
    for (const auto& t : combined.terms()) {
      bool in_a = std::find(a.terms().begin(), a.terms().end(), t) != a.terms().end();
      bool in_b = std::find(b.terms().begin(), b.terms().end(), t) != b.terms().end();
      if (apply(op, in_a, in_b)) terms.push_back(t);
    }
    return ap_with_corrections(std::move(terms), candidates, actual);
  }
  return periodic_op(normalize_periodic(a, s), normalize_periodic(b, s), op, s);
}

DyadicBlockSet dyadic_with_corrections(FillRule rule, Rounding rounding, const std::vector<Natural>& candidates,
                                       const std::function<bool(const Natural&)>& actual) {
  DyadicBlockSet base(rule, rounding);
  std::vector<Natural> add, del;
  for (const auto& c : candidates) {
    bool act = actual(c);
    bool pat = base.core_contains(c);
    if (act && !pat) add.push_back(c);
    if (!act && pat) del.push_back(c);
  }
  return DyadicBlockSet(std::move(rule), rounding, FiniteSet(std::move(add)), FiniteSet(std::move(del)));
}

std::vector<Natural> exception_points(const DyadicBlockSet& d) {
  std::vector<Natural> v = d.additions().elements();
  v.insert(v.end(), d.removals().elements().begin(), d.removals().elements().end());
  return v;
}

FillRule combine_rules(const FillRule& a, const FillRule& b, SetOp op) {
  if (a.kind() == FillRule::Kind::periodic && b.kind() == FillRule::Kind::periodic) {
    std::size_t pre = std::max(a.prefix().size(), b.prefix().size());
    std::size_t period = std::lcm(a.cycle().size(), b.cycle().size());
    if (period > (1u << 16))
      fail(ErrorCode::modulus_budget_exceeded, "combined dyadic fill cycle longer than 65536 blocks");
    std::vector<Slice> prefix, cycle;
    for (std::size_t n = 0; n < pre; ++n) prefix.push_back(combine_slices(a.slice(n), b.slice(n), op));
    for (std::size_t n = pre; n < pre + period; ++n) cycle.push_back(combine_slices(a.slice(n), b.slice(n), op));
    return FillRule::periodic(std::move(prefix), std::move(cycle));
  }
  if (a == b) {
    if (op == SetOp::unite || op == SetOp::intersect) return a;
    return FillRule::constant(0);
  }
  fail(ErrorCode::incompatible_backends,
       "reciprocal fill rules combine only with themselves; truncate_to_horizon both operands instead");
}

// ω and ∅ (up to finite corrections) are the periodic sets representable as dyadic blocks.
std::optional<DyadicBlockSet> periodic_as_dyadic(const PeriodicSet& p, Rounding rounding) {
  if (p.modulus() != 1) return std::nullopt;
  std::vector<Natural> add{Natural(0)}, del;
  for (auto x : p.removals()) del.push_back(nat(x));
  if (p.residues().empty()) return std::nullopt;
  return DyadicBlockSet(FillRule::constant(1), rounding, FiniteSet(std::move(add)), FiniteSet(std::move(del)));
}

NatSet dyadic_op(const DyadicBlockSet& a, const DyadicBlockSet& b, SetOp op) {
  if (a.rounding() != b.rounding())
    fail(ErrorCode::incompatible_backends, "dyadic block sets with different rounding modes do not combine");
  auto rule = combine_rules(a.rule(), b.rule(), op);
  auto candidates = exception_points(a);
  auto more = exception_points(b);
  candidates.insert(candidates.end(), more.begin(), more.end());
  return dyadic_with_corrections(std::move(rule), a.rounding(), candidates, [&](const Natural& x) {
    return apply(op, a.contains(x), b.contains(x));
  });
}

NatSet horizon_op(const HorizonSet& a, const HorizonSet& b, SetOp op) {
  if (a.horizon() != b.horizon())
    fail(ErrorCode::incompatible_backends,
         "horizon sets with H=" + std::to_string(a.horizon()) + " and H=" + std::to_string(b.horizon()) +
             " do not combine; truncate_to_horizon to the smaller H first");
  std::vector<bool> bits(a.horizon());
  for (std::uint64_t i = 0; i < a.horizon(); ++i) bits[i] = apply(op, a.bits()[i], b.bits()[i]);
  return HorizonSet(a.horizon(), std::move(bits));
}

std::string coercion_hint(Backend x, Backend y) {
  return std::string("no exact combination of ") + std::string(to_string(x)) + " with " + std::string(to_string(y)) +
         "; coerce both with truncate_to_horizon(A, H) to work on a finite window";
}

NatSet combine_with_finite(const NatSet& structured, const FiniteSet& f, const NatSet& a, const NatSet& b, SetOp op,
                           bool structured_is_left) {
  if (!keeps_pattern(op, structured_is_left)) return filter_finite(f, a, b, op);
  auto actual = [&](const Natural& x) { return apply(op, a.member(x), b.member(x)); };
  if (auto p = structured.get_if<PeriodicSet>()) {
    std::uint64_t t = p->threshold();
    if (!f.empty()) t = std::max(t, to_u64(f.elements().back()) + 1);
    auto fl = to_u64_list(f);
    auto candidates = merged({&p->additions(), &p->removals(), &fl});
    return PeriodicSet::with_corrections(p->modulus(), p->residues(), t, candidates,
                                         [&](std::uint64_t x) { return actual(nat(x)); });
  }
  if (auto u = structured.get_if<APUnionSet>()) {
    auto candidates = exception_points(*u);
    candidates.insert(candidates.end(), f.elements().begin(), f.elements().end());
    return ap_with_corrections(u->terms(), candidates, actual);
  }
  if (auto d = structured.get_if<DyadicBlockSet>()) {
    auto candidates = exception_points(*d);
    candidates.insert(candidates.end(), f.elements().begin(), f.elements().end());
    return dyadic_with_corrections(d->rule(), d->rounding(), candidates, actual);
  }
  fail(ErrorCode::incompatible_backends, "unsupported finite combination");
}

FiniteSet finite_op(const FiniteSet& a, const FiniteSet& b, SetOp op) {
  std::vector<Natural> out;
  const auto& x = a.elements();
  const auto& y = b.elements();
  switch (op) {
    case SetOp::unite: std::set_union(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out)); break;
    case SetOp::intersect: std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out)); break;
    case SetOp::difference: std::set_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out)); break;
    case SetOp::symdiff:
      std::set_symmetric_difference(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(out));
      break;
  }
  return FiniteSet(std::move(out));
}

}  // namespace

NatSet boolean_op(const NatSet& a, const NatSet& b, SetOp op, const Settings& s) {
  auto ha = a.get_if<HorizonSet>();
  auto hb = b.get_if<HorizonSet>();
  if (ha || hb) {
    std::uint64_t H = ha ? ha->horizon() : hb->horizon();
    HorizonSet x = ha ? *ha : truncate_to_horizon(a, H);
    HorizonSet y = hb ? *hb : truncate_to_horizon(b, H);
    return horizon_op(x, y, op);
  }

  // Provably finite operands are handled as explicit finite sets.
  bool fa = is_finite(a), fb = is_finite(b);
  if (fa && fb) return finite_op(as_finite(a), as_finite(b), op);
  if (fb) return combine_with_finite(a, as_finite(b), a, b, op, true);
  if (fa) return combine_with_finite(b, as_finite(a), a, b, op, false);

  auto da = a.get_if<DyadicBlockSet>();
  auto db = b.get_if<DyadicBlockSet>();
  if (da || db) {
    auto as_dyadic = [&](const NatSet& x, Rounding r) -> std::optional<DyadicBlockSet> {
      if (auto d = x.get_if<DyadicBlockSet>()) return *d;
      if (auto p = x.get_if<PeriodicSet>()) return periodic_as_dyadic(*p, r);
      return std::nullopt;
    };
    Rounding r = da ? da->rounding() : db->rounding();
    auto x = as_dyadic(a, r);
    auto y = as_dyadic(b, r);
    if (!x || !y) fail(ErrorCode::incompatible_backends, coercion_hint(a.backend(), b.backend()));
    return dyadic_op(*x, *y, op);
  }

  auto pa = a.get_if<PeriodicSet>();
  auto pb = b.get_if<PeriodicSet>();
  if (pa && pb) return periodic_op(*pa, *pb, op, s);
  APUnionSet ua = pa ? to_ap_union(*pa) : *a.get_if<APUnionSet>();
  APUnionSet ub = pb ? to_ap_union(*pb) : *b.get_if<APUnionSet>();
  return ap_op(ua, ub, op, s);
}

NatSet complement(const NatSet& a, const Settings& s) {
  return std::visit(
      [&](const auto& x) -> NatSet {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FiniteSet>) {
          if (x.empty()) return NatSet::omega();
          auto rm = to_u64_list(x);
          return PeriodicSet(1, {0}, rm.back() + 1, {}, rm);
        } else if constexpr (std::is_same_v<T, HorizonSet>) {
          std::vector<bool> bits(x.horizon());
          for (std::uint64_t i = 0; i < x.horizon(); ++i) bits[i] = !x.bits()[i];
          return HorizonSet(x.horizon(), std::move(bits));
        } else if constexpr (std::is_same_v<T, PeriodicSet>) {
          check_residues(x.modulus() - x.residues().size(), s);
          std::vector<std::uint64_t> res;
          for (std::uint64_t r = 0; r < x.modulus(); ++r)
            if (!contains_sorted(x.residues(), r)) res.push_back(r);
          return PeriodicSet(x.modulus(), res, x.threshold(), x.removals(), x.additions());
        } else if constexpr (std::is_same_v<T, APUnionSet>) {
          return complement(NatSet(normalize_periodic(x, s)), s);
        } else {
          if (x.rule().kind() != FillRule::Kind::periodic)
            fail(ErrorCode::incompatible_backends,
                 "the complement of a reciprocal fill rule is not a dyadic block set; truncate_to_horizon first");
          std::vector<Slice> prefix, cycle;
          Slice full{Rational(0), Rational(1)};
          for (const auto& sl : x.rule().prefix()) prefix.push_back(combine_slices(sl, full, SetOp::symdiff));
          for (const auto& sl : x.rule().cycle()) cycle.push_back(combine_slices(sl, full, SetOp::symdiff));
          auto candidates = exception_points(x);
          candidates.push_back(Natural(0));
          return dyadic_with_corrections(FillRule::periodic(std::move(prefix), std::move(cycle)), x.rounding(),
                                         candidates, [&](const Natural& n) { return !x.contains(n); });
        }
      },
      a.variant());
}

// ---------------------------------------------------------------- transforms

NatSet transform(const NatSet& a, TransformKind kind, const Natural& amount) {
  if (amount < 0) fail(ErrorCode::invalid_argument, "transform amount must be natural");
  if (kind == TransformKind::dilate && amount < 1) fail(ErrorCode::invalid_argument, "dilation factor must be >= 1");
  const bool shift = kind == TransformKind::shift;
  auto map = [&](const Natural& x) -> Natural { return shift ? Natural(x + amount) : Natural(x * amount); };
  auto map_finite = [&](const FiniteSet& f) {
    std::vector<Natural> v;
    for (const auto& x : f.elements()) v.push_back(map(x));
    return FiniteSet(std::move(v));
  };

  return std::visit(
      [&](const auto& x) -> NatSet {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FiniteSet>) {
          return map_finite(x);
        } else if constexpr (std::is_same_v<T, HorizonSet>) {
          auto k = to_u64(amount);
          std::uint64_t H = x.horizon();
          std::uint64_t H2 = shift ? H + k : (H == 0 ? 0 : k * (H - 1) + 1);
          std::vector<bool> bits(H2, false);
          for (std::uint64_t i = 0; i < H; ++i) {
            if (!x.bits()[i]) continue;
            std::uint64_t y = shift ? i + k : i * k;
            if (y < H2) bits[y] = true;
          }
          return HorizonSet(H2, std::move(bits));
        } else if constexpr (std::is_same_v<T, PeriodicSet>) {
          auto m = x.modulus();
          if (!shift) {
            auto k = to_u64(amount);
            std::vector<std::uint64_t> res, add, del;
            for (auto r : x.residues()) res.push_back(r * k);
            for (auto e : x.additions()) add.push_back(e * k);
            for (auto e : x.removals()) del.push_back(e * k);
            return PeriodicSet(m * k, res, x.threshold() * k, add, del);
          }
          if (amount >= nat(std::uint64_t{1} << 24)) return transform(NatSet(to_ap_union(x)), kind, amount);
          auto h = to_u64(amount);
          std::vector<std::uint64_t> res;
          for (auto r : x.residues()) res.push_back((r + h) % m);
          std::vector<std::uint64_t> candidates;
          for (std::uint64_t i = 0; i < h; ++i) candidates.push_back(i);
          for (auto e : x.additions()) candidates.push_back(e + h);
          for (auto e : x.removals()) candidates.push_back(e + h);
          return PeriodicSet::with_corrections(m, res, x.threshold() + h, candidates, [&](std::uint64_t n) {
            return n >= h && x.contains(nat(n - h));
          });
        } else if constexpr (std::is_same_v<T, APUnionSet>) {
          std::vector<APTerm> terms;
          for (const auto& t : x.terms()) {
            if (shift) {
              terms.push_back(APTerm{t.modulus, t.offset + amount, t.start});
            } else {
              std::string sym;
              if (amount == 1) sym = t.modulus.symbol;
              else if (!t.modulus.symbol.empty()) sym = amount.get_str() + "*" + t.modulus.symbol;
              terms.push_back(APTerm{Modulus{t.modulus.value * amount, sym}, t.offset * amount, t.start});
            }
          }
          return APUnionSet(std::move(terms), map_finite(x.extras()), map_finite(x.removals()));
        } else {
          fail(ErrorCode::incompatible_backends,
               "dyadic block sets are not closed under shift/dilate; truncate_to_horizon first");
        }
      },
      a.variant());
}

PeriodicSet normalize_periodic(const APUnionSet& a, const Settings& s) {
  Natural L = a.modulus_lcm();
  if (L > nat(s.modulus_budget))
    fail(ErrorCode::modulus_budget_exceeded,
         "lcm of term moduli is " + L.get_str() + ", above modulus_budget=" + std::to_string(s.modulus_budget));
  auto m = to_u64(L);
  std::vector<bool> bits(m, false);
  std::uint64_t t = 0;
  std::vector<std::uint64_t> candidates;
  for (const auto& term : a.terms()) {
    auto step = to_u64(term.modulus.value);
    for (auto r = to_u64(term.residue()); r < m; r += step) bits[r] = true;
    auto first = to_u64(term.first());
    t = std::max(t, first);
    if (first / step > (std::uint64_t{1} << 26))
      fail(ErrorCode::modulus_budget_exceeded, "AP start index too large to absorb into exceptions");
    for (auto x = first % step; x < first; x += step) candidates.push_back(x);
  }
  for (const auto& x : a.extras().elements()) {
    candidates.push_back(to_u64(x));
    t = std::max(t, to_u64(x) + 1);
  }
  for (const auto& x : a.removals().elements()) {
    candidates.push_back(to_u64(x));
    t = std::max(t, to_u64(x) + 1);
  }
  check_residues(static_cast<std::uint64_t>(std::count(bits.begin(), bits.end(), true)), s);
  std::vector<std::uint64_t> residues;
  for (std::uint64_t r = 0; r < m; ++r)
    if (bits[r]) residues.push_back(r);
  auto [rm, rr] = reduce_period(m, std::move(residues));
  sort_unique(candidates);
  return PeriodicSet::with_corrections(rm, rr, t, candidates, [&](std::uint64_t x) { return a.contains(nat(x)); });
}

APUnionSet to_ap_union(const PeriodicSet& p) {
  std::vector<APTerm> terms;
  for (auto r : p.residues()) terms.push_back(APTerm{Modulus{nat(p.modulus()), ""}, nat(r), 0});
  return APUnionSet(std::move(terms), from_u64_list(p.additions()), from_u64_list(p.removals()));
}

HorizonSet truncate_to_horizon(const NatSet& a, std::uint64_t horizon) {
  if (auto h = a.get_if<HorizonSet>()) {
    if (horizon > h->horizon())
      fail(ErrorCode::query_beyond_horizon, "cannot extend a horizon set from H=" + std::to_string(h->horizon()) +
                                                " to H=" + std::to_string(horizon));
    std::vector<bool> bits(h->bits().begin(), h->bits().begin() + static_cast<std::ptrdiff_t>(horizon));
    return HorizonSet(horizon, std::move(bits));
  }
  std::vector<bool> bits(horizon, false);
  for (auto x : elements_in(a, 0, horizon)) bits[x] = true;
  return HorizonSet(horizon, std::move(bits));
}

std::vector<std::uint64_t> elements_in(const NatSet& a, std::uint64_t l, std::uint64_t r) {
  std::vector<std::uint64_t> out;
  if (l >= r) return out;
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FiniteSet>) {
          for (const auto& e : x.elements())
            if (e >= nat(l) && e < nat(r)) out.push_back(to_u64(e));
        } else if constexpr (std::is_same_v<T, HorizonSet>) {
          if (r > x.horizon())
            fail(ErrorCode::query_beyond_horizon, "enumeration past H=" + std::to_string(x.horizon()));
          for (auto i = l; i < r; ++i)
            if (x.bits()[i]) out.push_back(i);
        } else if constexpr (std::is_same_v<T, PeriodicSet>) {
          auto m = x.modulus();
          for (std::uint64_t base = l - l % m; base < r; base += m)
            for (auto rho : x.residues()) {
              auto v = base + rho;
              if (v >= l && v < r && (v >= x.threshold() || !contains_sorted(x.removals(), v))) out.push_back(v);
            }
          for (auto e : x.additions())
            if (e >= l && e < r) out.push_back(e);
          std::sort(out.begin(), out.end());
        } else if constexpr (std::is_same_v<T, APUnionSet>) {
          Natural L = nat(l), R = nat(r);
          for (const auto& t : x.terms()) {
            Natural v = t.first();
            if (v < L) {
              Natural steps = (L - v + t.modulus.value - 1) / t.modulus.value;
              v += steps * t.modulus.value;
            }
            for (; v < R; v += t.modulus.value)
              if (!x.removals().contains(v)) out.push_back(to_u64(v));
          }
          for (const auto& e : x.extras().elements())
            if (e >= L && e < R) out.push_back(to_u64(e));
          sort_unique(out);
        } else {
          Natural L = nat(l), R = nat(r);
          for (std::uint64_t n = 0; n < 64 && (std::uint64_t{1} << n) < r; ++n)
            for (auto& [lo, hi] : x.block_intervals(n))
              for (Natural v = std::max(lo, L); v < hi && v < R; ++v)
                if (!x.removals().contains(v)) out.push_back(to_u64(v));
          for (const auto& e : x.additions().elements())
            if (e >= L && e < R) out.push_back(to_u64(e));
          sort_unique(out);
        }
      },
      a.variant());
  return out;
}

std::optional<Natural> max_element(const NatSet& a) {
  if (!is_finite(a)) fail(ErrorCode::invalid_argument, "max_element of a set that is not provably finite");
  auto f = as_finite(a);
  if (f.empty()) return std::nullopt;
  return f.elements().back();
}

NatSet drop_prefix(const NatSet& a, const Natural& n) {
  auto keep_tail = [&](const FiniteSet& f) {
    std::vector<Natural> v;
    for (const auto& x : f.elements())
      if (x >= n) v.push_back(x);
    return FiniteSet(std::move(v));
  };
  return std::visit(
      [&](const auto& x) -> NatSet {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FiniteSet>) {
          return keep_tail(x);
        } else if constexpr (std::is_same_v<T, HorizonSet>) {
          std::vector<bool> bits = x.bits();
          for (std::uint64_t i = 0; i < x.horizon() && nat(i) < n; ++i) bits[i] = false;
          return HorizonSet(x.horizon(), std::move(bits));
        } else if constexpr (std::is_same_v<T, PeriodicSet>) {
          auto cut = to_u64(n);
          std::vector<std::uint64_t> candidates;
          for (std::uint64_t i = 0; i < std::max(cut, x.threshold()); ++i) candidates.push_back(i);
          return PeriodicSet::with_corrections(x.modulus(), x.residues(), std::max(cut, x.threshold()), candidates,
                                               [&](std::uint64_t i) { return i >= cut && x.contains(nat(i)); });
        } else if constexpr (std::is_same_v<T, APUnionSet>) {
          std::vector<APTerm> terms;
          for (const auto& t : x.terms()) {
            APTerm u = t;
            if (u.first() < n) {
              Natural steps = (n - u.offset + u.modulus.value - 1) / u.modulus.value;
              u.start = std::max(u.start, steps);
            }
            terms.push_back(u);
          }
          return APUnionSet(std::move(terms), keep_tail(x.extras()), x.removals());
        } else {
          if (n > nat(std::uint64_t{1} << 20))
            fail(ErrorCode::invalid_argument, "drop_prefix on a dyadic block set is limited to n <= 2^20");
          std::vector<Natural> del = x.removals().elements();
          for (auto e : elements_in(a, 0, to_u64(n))) del.push_back(nat(e));
          return DyadicBlockSet(x.rule(), x.rounding(), keep_tail(x.additions()), FiniteSet(std::move(del)));
        }
      },
      a.variant());
}

bool pointwise_equal(const NatSet& a, const NatSet& b, std::uint64_t l, std::uint64_t r) {
  for (auto x = l; x < r; ++x)
    if (a.member(x) != b.member(x)) return false;
  return true;
}

}  // namespace densitas
