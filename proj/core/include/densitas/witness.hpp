#pragma once

#include "densitas/axioms.hpp"
#include "densitas/density.hpp"
#include "densitas/metric.hpp"
#include "densitas/natset.hpp"

#include <string>
#include <vector>

namespace densitas {

struct WitnessParams {
  Rational kappa;
  Natural N;
  Natural C;
  std::vector<unsigned> a;  // the moduli are a_n!
  bool demo = false;        // unvalidated schedule; every downstream verdict carries the flag
};

/// Minimal N, C = ⌈1/κ⌉ and the minimal admissible schedule of the given length.
WitnessParams derive_params(const Rational& kappa, std::size_t length = 8, const Settings& s = Settings::defaults());

struct ValidationReport {
  AxiomReport checks;
  bool demo = false;
  bool passed() const { return checks.passed(); }
};

/// Each inequality of the parameter conditions, with certified bounds on e and log.
ValidationReport validate_params(const WitnessParams& p, const Settings& s = Settings::defaults());

/// Σ_{j>J} j/a_j! for any strictly increasing continuation of a schedule ending at a_J.
Rational schedule_tail_bound(std::size_t J, unsigned a_J);

struct WitnessLevel {
  unsigned n = 0;
  std::vector<std::uint64_t> H;
  std::uint64_t ell = 0;  // 1 + max H - min H (0 for H empty)
  Modulus modulus;        // a_n!
};

struct WitnessFamily {
  WitnessParams params;
  unsigned depth = 0;
  std::vector<WitnessLevel> levels;  // n = 0..depth+1

  NatSet B(unsigned n) const;  // a_n!·(ω∖{0}) + H_n
  NatSet A(unsigned n) const;  // B_0 ∪ … ∪ B_{n+1}
  /// |B_n ∩ [0, m)|, |A_n ∩ [0, m)| by O(|H|) progression counting.
  Natural count_B(unsigned n, const Natural& m) const;
  Natural count_A(unsigned n, const Natural& m) const;
  Rational density_A(unsigned n) const;  // Σ_{j<=n+1} j/a_j!
  bool demo() const { return params.demo; }
};

/// r ∈ K_{n+1} iff r mod a_i! ∈ H_i for some i <= n.
bool in_K(const std::vector<WitnessLevel>& levels, unsigned n_plus_1, std::uint64_t r);

WitnessFamily build_witness(const WitnessParams& p, unsigned depth, const Settings& s = Settings::defaults());
/// Rebuilds a family from stored levels (no greedy step), for verification of files.
WitnessFamily family_from_levels(const WitnessParams& p, unsigned depth, std::vector<std::vector<std::uint64_t>> H);

/// Conditions (a)-(f) and the greedy choice, exactly, with prefix checks at the
/// breakpoints below `horizon` and 64 logarithmic probes up to a_{depth+1}!.
AxiomReport check_witness_invariants(const WitnessFamily& w, std::uint64_t horizon);

struct WitnessWindow {
  unsigned n = 0;
  Natural start;
  std::uint64_t length = 0;
  Natural fill;
  Rational ratio;
};

struct DivergenceCertificate {
  std::vector<Rational> increments;    // μ*(B_n) = |H_n|/a_n!, n = 0..depth+1
  std::vector<Rational> partial_sums;
  Rational target;                     // (1-κ)/2
  std::vector<WitnessWindow> windows;  // n >= 1
  bool holds = false;
  bool demo = false;
  std::string verdict;
};

DivergenceCertificate divergence_certificate(const WitnessFamily& w, std::uint64_t horizon = 1'000'000);

struct PrefixCheck {
  Natural m;
  Natural count;
  Rational ratio;
  bool probe = false;
};

struct GapCertificate {
  Rational upper_limit;             // 1/4
  std::vector<PrefixCheck> checks;  // breakpoints then probes
  std::size_t breakpoints = 0, probes = 0;
  Rational max_ratio;
  bool upper_holds = false;
  std::vector<WitnessWindow> windows;
  Rational banach_lower;  // min window ratio
  bool lower_holds = false;
  Membership membership = Membership::unknown;
  bool demo = false;
  std::string verdict;
};

/// B := ⋃_{n<=depth} B_n: prefix ratios <= 1/4 and windows of ratio >= 1/2.
GapCertificate banach_gap_certificate(const WitnessFamily& w, std::uint64_t horizon);

/// (A_n) as a sequence with certified tail bound Σ_{j>=n+2} j/a_j! under bd*.
SetSequence witness_sequence(const WitnessFamily& w);

}  // namespace densitas
