#pragma once

#include "densitas/exhaust.hpp"
#include "densitas/metric.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace densitas {

/// Resolves an increasing sequence with summable increments to a set A with
/// ν(A_n∖A) = 0 and ν(A∖A_n) → 0.
using Ap0Oracle = std::function<NatSet(const SetSequence&, std::uint64_t observed)>;

/// The union oracle: the declared limit when present, else the union of the observed terms.
NatSet union_oracle(const SetSequence& seq, std::uint64_t observed);

struct LimitStage {
  std::uint64_t n = 0;
  ExtValue inside;                 // ν(A_n∖A), or ‖A_n∖A‖_φ for lscsm limits
  ExtValue outside;                // ν(A∖A_n), or ‖A△A_n‖ for lscsm limits
  std::optional<Rational> bound;   // proved bound on `outside`
  std::optional<Natural> cut;      // n_k (lscsm_limit)
  std::optional<ExtValue> c_residual;    // ν(C_i△A) (cauchy_to_limit)
  std::optional<std::uint64_t> first_j;  // first observed j with ν(B_{i,j}△B_i) < 2^{-i}
  bool ok = true;
};

struct LimitCertificate {
  std::string method;
  NatSet limit;
  std::vector<LimitStage> stages;
  Rational increment_sum;  // observed Σ of increment sizes
  bool certified = false;
  std::vector<std::string> notes;

  std::string verdict() const { return certified ? "certified" : "observed-only"; }
};

/// Cor 2.3: A = ⋃ A_n, with ν(A∖A_n) <= Σ_{j>=n} ν(A_{j+1}∖A_j).
LimitCertificate sigma_limit(const SubmeasureDescriptor& nu, const SetSequence& seq, std::uint64_t depth,
                             const Settings& s = Settings::defaults());

/// Thm 3.2: A = A_0 ∪ ⋃_j (B_j∖n_j) with φ(B_j∖n_j) <= 2‖B_j‖_φ.
LimitCertificate lscsm_limit(const LscsmDescriptor& phi, const SetSequence& seq, std::uint64_t depth,
                             const Settings& s = Settings::defaults());

/// Thm 2.1 (ii)⇒(i): subsequence, B_{i,j}, the oracle on complements, C_i, the oracle again.
LimitCertificate cauchy_to_limit(const SubmeasureDescriptor& nu, const SetSequence& seq, const Ap0Oracle& oracle,
                                 std::uint64_t depth, const Settings& s = Settings::defaults());

}  // namespace densitas
