#pragma once

#include "densitas/axioms.hpp"
#include "densitas/density.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace densitas {

/// A finitely presented sequence: explicit prefix, optional closed-form rule, and an
/// optional certified tail bound T(n) >= sup_{j>=i>=n} ν(A_i △ A_j) supplied with the rule.
struct SetSequence {
  std::vector<NatSet> prefix;
  std::function<NatSet(std::uint64_t)> rule;
  bool monotone = false;
  std::function<Rational(std::uint64_t)> tail_bound;
  std::string tail_note;  // how the tail bound was obtained
  std::optional<NatSet> limit;  // declared union of all terms, for rule-backed increasing sequences

  NatSet at(std::uint64_t n) const;  // throws insufficient_prefix
  bool has(std::uint64_t n) const { return n < prefix.size() || static_cast<bool>(rule); }

  /// A, A, A, ...
  static SetSequence constant(const NatSet& a);
  /// The observed prefix only.
  static SetSequence of(std::vector<NatSet> terms, bool monotone = false);
  /// Terms that differ from each other by finite sets, under a ν vanishing on finite sets.
  static SetSequence finite_modifications(std::function<NatSet(std::uint64_t)> rule);
  /// Increasing sequence with increments A_{n+1}∖A_n of certified size inc(n) and
  /// Σ_{j>=n} inc(j) <= tail(n).
  static SetSequence summable_increments(std::vector<NatSet> prefix, std::function<Rational(std::uint64_t)> tail,
                                         std::string note);
};

/// Verifies the monotone flag on the prefix and prefix/rule agreement on [0, window).
void validate_sequence(const SetSequence& seq, const Settings& s = Settings::defaults(), std::uint64_t window = 1024);

/// d_ν(A,B) = min{1, ν(A△B)}.
ExtValue dist(const SubmeasureDescriptor& nu, const NatSet& a, const NatSet& b, const Settings& s = Settings::defaults());

/// d(A,A)=0, symmetry and the triangle inequality, exactly, per triple.
AxiomReport check_pseudometric(const SubmeasureDescriptor& nu, const std::vector<std::array<NatSet, 3>>& triples,
                               const Settings& s = Settings::defaults());

struct CauchyReport {
  std::string measure;
  std::vector<std::vector<ExtValue>> table;
  /// (k, j(k)): all d(A_i,A_j) < 2^{-k} for i,j >= j(k)
  std::vector<std::pair<unsigned, std::uint64_t>> modulus;
  bool certified = false;
  std::string route;
};

CauchyReport cauchy_profile(const SubmeasureDescriptor& nu, const SetSequence& seq, std::uint64_t depth,
                            const Settings& s = Settings::defaults(), unsigned max_k = 32);

struct RatioSample {
  ExtValue first;
  ExtValue second;
  std::optional<Rational> ratio;  // nullopt when both vanish
  bool unbounded = false;         // first > 0 = second
};

struct RatioReport {
  enum class Verdict { two_sided, ratio_diverges, inconclusive };
  std::string first, second;
  std::vector<RatioSample> samples;
  std::optional<Rational> max_ratio, min_ratio;
  Verdict verdict = Verdict::inconclusive;
  Rational c1, c2;  // two_sided constants (cited, not inferred)
  std::vector<std::pair<Rational, std::uint64_t>> witnesses;  // (C, first index with ratio > C)
};
std::string_view to_string(RatioReport::Verdict v);

/// Ratios ν₁(A_i)/ν₂(A_i). A two-sided verdict needs `claimed` constants that no sample
/// violates; ratio-diverges needs a witness for every target C.
RatioReport metric_equivalence_probe(const SubmeasureDescriptor& nu1, const SubmeasureDescriptor& nu2,
                                     const std::vector<NatSet>& family,
                                     std::optional<std::pair<Rational, Rational>> claimed = std::nullopt,
                                     const std::vector<Rational>& targets = {},
                                     const Settings& s = Settings::defaults());

struct LimitedSequence {
  std::string name;
  SetSequence seq;
  NatSet limit;
  std::uint64_t length = 8;
};

struct CoconvergenceEntry {
  std::string name;
  std::vector<ExtValue> first, second;  // ‖A△A_n‖ under each
  bool first_vanishes = false, second_vanishes = false;
  bool agree = false;
};

struct CoconvergenceReport {
  std::string first, second;
  Rational threshold;
  std::vector<CoconvergenceEntry> entries;
  bool all_agree() const {
    for (const auto& e : entries)
      if (!e.agree) return false;
    return true;
  }
};

/// Sampled evidence only: a sequence "vanishes" when its last observed distance is exact 0
/// or below the threshold.
CoconvergenceReport topological_coconvergence_probe(const SubmeasureDescriptor& nu1, const SubmeasureDescriptor& nu2,
                                                    const std::vector<LimitedSequence>& seqs,
                                                    const Settings& s = Settings::defaults(),
                                                    const Rational& threshold = two_pow(-10));

}  // namespace densitas
