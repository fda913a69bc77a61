#pragma once

#include "densitas/numeric.hpp"
#include "densitas/settings.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace densitas {

enum class Backend { finite, horizon, periodic, ap_union, dyadic_block };
std::string_view to_string(Backend b);

enum class SetOp { unite, intersect, difference, symdiff };
std::string_view to_string(SetOp op);

/// Finite subset of omega, stored strictly increasing.
class FiniteSet {
 public:
  FiniteSet() = default;
  explicit FiniteSet(std::vector<Natural> elements);
  static FiniteSet interval(std::uint64_t lo, std::uint64_t hi);  // [lo, hi)

  const std::vector<Natural>& elements() const { return elements_; }
  bool empty() const { return elements_.empty(); }
  std::size_t size() const { return elements_.size(); }
  bool contains(const Natural& n) const;
  Natural count_range(const Natural& l, const Natural& r) const;

 private:
  std::vector<Natural> elements_;
};

/// Membership known on [0, H) only; every query at or beyond H is refused.
class HorizonSet {
 public:
  HorizonSet(std::uint64_t horizon, std::vector<bool> bits);

  std::uint64_t horizon() const { return horizon_; }
  const std::vector<bool>& bits() const { return bits_; }
  bool contains(const Natural& n) const;
  Natural count_range(const Natural& l, const Natural& r) const;
  std::uint64_t count_u64(std::uint64_t l, std::uint64_t r) const { return prefix_[r] - prefix_[l]; }

 private:
  void require_known(const Natural& n, bool inclusive_end) const;

  std::uint64_t horizon_;
  std::vector<bool> bits_;
  std::vector<std::uint64_t> prefix_;  // prefix_[i] = |A ∩ [0, i)|
};

/// Eventually periodic set: for n >= threshold, n ∈ A iff n mod m ∈ residues.
/// Below the threshold membership is the residue pattern corrected by the
/// additions/removals lists, which are canonical (every addition is off-pattern,
/// every removal on-pattern, all below the threshold).
class PeriodicSet {
 public:
  PeriodicSet(std::uint64_t modulus, std::vector<std::uint64_t> residues, std::uint64_t threshold = 0,
              std::vector<std::uint64_t> additions = {}, std::vector<std::uint64_t> removals = {});

  /// Builds the set whose pattern is (modulus, residues) and whose true membership
  /// is `actual`; `actual` may differ from the pattern only at `candidates`.
  static PeriodicSet with_corrections(std::uint64_t modulus, std::vector<std::uint64_t> residues,
                                      std::uint64_t threshold, const std::vector<std::uint64_t>& candidates,
                                      const std::function<bool(std::uint64_t)>& actual);

  std::uint64_t modulus() const { return modulus_; }
  const std::vector<std::uint64_t>& residues() const { return residues_; }
  std::uint64_t threshold() const { return threshold_; }
  const std::vector<std::uint64_t>& additions() const { return additions_; }
  const std::vector<std::uint64_t>& removals() const { return removals_; }

  bool pattern_contains(const Natural& n) const;
  bool pattern_contains(std::uint64_t n) const;
  bool contains(const Natural& n) const;
  Natural count_range(const Natural& l, const Natural& r) const;
  Rational density() const { return make_rational(static_cast<std::int64_t>(residues_.size()),
                                                  static_cast<std::int64_t>(modulus_)); }

 private:
  Natural pattern_count_below(const Natural& y) const;

  std::uint64_t modulus_;
  std::vector<std::uint64_t> residues_;
  std::uint64_t threshold_;
  std::vector<std::uint64_t> additions_;
  std::vector<std::uint64_t> removals_;
};

/// A modulus together with an optional symbolic rendering such as "9!".
struct Modulus {
  Natural value;
  std::string symbol;

  static Modulus factorial(unsigned n);
  std::string label() const { return symbol.empty() ? value.get_str() : symbol; }
};

/// {a*j + h : j >= j0}.
struct APTerm {
  Modulus modulus;
  Natural offset;
  Natural start;

  Natural first() const { return modulus.value * start + offset; }
  Natural residue() const;
  bool contains(const Natural& x) const;
  Natural count_below(const Natural& y) const;  // |term ∩ [0, y)|
  bool operator==(const APTerm& o) const {
    return modulus.value == o.modulus.value && offset == o.offset && start == o.start;
  }
};

/// (⋃ terms ∪ extras) ∖ removals, with moduli of arbitrary size. Extras are kept
/// disjoint from the terms and removals inside them.
class APUnionSet {
 public:
  explicit APUnionSet(std::vector<APTerm> terms, FiniteSet extras = {}, FiniteSet removals = {});

  const std::vector<APTerm>& terms() const { return terms_; }
  const FiniteSet& extras() const { return extras_; }
  const FiniteSet& removals() const { return removals_; }
  /// Groups of terms whose residue classes intersect; singleton groups mean pairwise disjoint terms.
  const std::vector<std::vector<std::size_t>>& overlap_components() const { return components_; }
  bool terms_pairwise_disjoint() const;

  bool in_terms(const Natural& x) const;
  bool contains(const Natural& x) const;
  Natural count_range(const Natural& l, const Natural& r, const Settings& s = Settings::defaults()) const;
  Natural count_terms_below(const Natural& y, const Settings& s = Settings::defaults()) const;
  /// Natural density of the union, by inclusion-exclusion over residue classes.
  Rational density(const Settings& s = Settings::defaults()) const;
  Natural modulus_lcm() const;

 private:
  std::vector<APTerm> terms_;
  FiniteSet extras_;
  FiniteSet removals_;
  std::vector<std::vector<std::size_t>> components_;
};

enum class Rounding { nearest, ceil };
std::string_view to_string(Rounding r);

/// Sorted breakpoints b0 < b1 < ... in [0,1] of even count; the block slice is the
/// union of [b0,b1), [b2,b3), ... scaled to the block.
using Slice = std::vector<Rational>;

/// Block rule n -> Slice: eventually periodic (prefix then a repeating cycle), or
/// the decaying fill [0, min(1, c/max(n,1))).
class FillRule {
 public:
  enum class Kind { periodic, reciprocal };

  static FillRule periodic(std::vector<Slice> prefix, std::vector<Slice> cycle);
  static FillRule constant(const Rational& fill);
  static FillRule reciprocal(const Rational& coefficient);

  Kind kind() const { return kind_; }
  Slice slice(std::uint64_t n) const;
  const std::vector<Slice>& prefix() const { return prefix_; }
  const std::vector<Slice>& cycle() const { return cycle_; }
  const Rational& coefficient() const { return coefficient_; }
  /// True when every block from some point on is empty (the set is then finite).
  bool eventually_empty() const;
  bool operator==(const FillRule& o) const {
    return kind_ == o.kind_ && prefix_ == o.prefix_ && cycle_ == o.cycle_ && coefficient_ == o.coefficient_;
  }

 private:
  Kind kind_ = Kind::periodic;
  std::vector<Slice> prefix_;
  std::vector<Slice> cycle_;
  Rational coefficient_;
};

Slice canonical_slice(Slice s);
Rational slice_width(const Slice& s);
Slice combine_slices(const Slice& a, const Slice& b, SetOp op);

/// Union over n of the slice of I_n = [2^n, 2^{n+1}) selected by the rule, with
/// finite corrections. Offsets are rounded per `rounding` (round-half-up or ceil).
class DyadicBlockSet {
 public:
  explicit DyadicBlockSet(FillRule rule, Rounding rounding = Rounding::nearest, FiniteSet additions = {},
                          FiniteSet removals = {});

  const FillRule& rule() const { return rule_; }
  Rounding rounding() const { return rounding_; }
  const FiniteSet& additions() const { return additions_; }
  const FiniteSet& removals() const { return removals_; }

  /// Absolute member intervals [lo, hi) inside block n, before corrections.
  std::vector<std::pair<Natural, Natural>> block_intervals(std::uint64_t n) const;
  bool core_contains(const Natural& x) const;
  bool contains(const Natural& x) const;
  Natural count_range(const Natural& l, const Natural& r) const;

 private:
  Natural core_count_range(const Natural& l, const Natural& r) const;

  FillRule rule_;
  Rounding rounding_;
  FiniteSet additions_;
  FiniteSet removals_;
};

/// Immutable subset of omega in one of five representations.
class NatSet {
 public:
  using Variant = std::variant<FiniteSet, HorizonSet, PeriodicSet, APUnionSet, DyadicBlockSet>;

  NatSet();
  NatSet(FiniteSet s);
  NatSet(HorizonSet s);
  NatSet(PeriodicSet s);
  NatSet(APUnionSet s);
  NatSet(DyadicBlockSet s);

  static NatSet omega();
  static NatSet empty();

  Backend backend() const;
  const Variant& variant() const { return *rep_; }
  template <class T>
  const T* get_if() const { return std::get_if<T>(rep_.get()); }

  bool member(const Natural& n) const;
  bool member(std::uint64_t n) const { return member(nat(n)); }
  Natural count_range(const Natural& l, const Natural& r) const;
  std::uint64_t count_u64(std::uint64_t l, std::uint64_t r) const;

 private:
  std::shared_ptr<const Variant> rep_;
};

NatSet boolean_op(const NatSet& a, const NatSet& b, SetOp op, const Settings& s = Settings::defaults());
inline NatSet set_union(const NatSet& a, const NatSet& b, const Settings& s = Settings::defaults()) {
  return boolean_op(a, b, SetOp::unite, s);
}
inline NatSet set_intersection(const NatSet& a, const NatSet& b, const Settings& s = Settings::defaults()) {
  return boolean_op(a, b, SetOp::intersect, s);
}
inline NatSet set_difference(const NatSet& a, const NatSet& b, const Settings& s = Settings::defaults()) {
  return boolean_op(a, b, SetOp::difference, s);
}
inline NatSet set_symdiff(const NatSet& a, const NatSet& b, const Settings& s = Settings::defaults()) {
  return boolean_op(a, b, SetOp::symdiff, s);
}
NatSet complement(const NatSet& a, const Settings& s = Settings::defaults());

enum class TransformKind { shift, dilate };
NatSet transform(const NatSet& a, TransformKind kind, const Natural& amount);
inline NatSet shift(const NatSet& a, const Natural& h) { return transform(a, TransformKind::shift, h); }
inline NatSet dilate(const NatSet& a, const Natural& k) { return transform(a, TransformKind::dilate, k); }

/// Periodic form of an AP union; its modulus is the lcm of the term moduli and must
/// fit the configured budget.
PeriodicSet normalize_periodic(const APUnionSet& a, const Settings& s = Settings::defaults());
APUnionSet to_ap_union(const PeriodicSet& p);
HorizonSet truncate_to_horizon(const NatSet& a, std::uint64_t horizon);

/// Members of A in [l, r) in increasing order.
std::vector<std::uint64_t> elements_in(const NatSet& a, std::uint64_t l, std::uint64_t r);
/// True when the set is provably finite from its representation (Horizon sets: false).
bool is_finite(const NatSet& a);
/// Largest element of a provably finite set, nullopt when empty.
std::optional<Natural> max_element(const NatSet& a);

/// A ∖ n = {a ∈ A : a >= n}; dyadic block sets are supported while n <= 2^20.
NatSet drop_prefix(const NatSet& a, const Natural& n);

bool pointwise_equal(const NatSet& a, const NatSet& b, std::uint64_t l, std::uint64_t r);

}  // namespace densitas
