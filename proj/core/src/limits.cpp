#include "densitas/limits.hpp"

#include "densitas/errors.hpp"

#include <algorithm>

namespace densitas {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

bool is_empty_set(const NatSet& a) { return is_finite(a) && !max_element(a); }

std::vector<NatSet> observe(const SetSequence& seq, std::uint64_t depth) {
  std::vector<NatSet> terms;
  for (std::uint64_t i = 0; i < depth; ++i) terms.push_back(seq.at(i));
  return terms;
}

void require_increasing(const SetSequence& seq, const std::vector<NatSet>& terms, const Settings& s) {
  if (!seq.monotone) fail(ErrorCode::not_monotone, "sequence is not flagged as increasing");
  for (std::size_t i = 0; i + 1 < terms.size(); ++i)
    if (!is_empty_set(set_difference(terms[i], terms[i + 1], s)))
      fail(ErrorCode::not_monotone, "A_" + std::to_string(i) + " is not a subset of A_" + std::to_string(i + 1));
}

Rational exact_or(const ExtValue& v, ErrorCode code, const std::string& what) {
  if (!v.is_exact()) fail(code, what + " is not exact (" + v.to_string() + ")");
  return v.value();
}

bool is_zero(const ExtValue& v) { return v.is_exact() && v.value() == 0; }

// Least n with φ(B∖n) <= target; φ(B∖n) is nonincreasing in n.
Natural least_cut(const LscsmDescriptor& phi, const NatSet& b, const Rational& target, const Settings& s) {
  auto ok = [&](const Natural& n) {
    auto v = phi.tail(b, n, s);
    if (v.is_infinite()) return false;
    auto hi = v.upper();
    return hi && *hi <= target;
  };
  Natural hi;
  if (is_finite(b)) {
    auto top = max_element(b);
    hi = top ? Natural(*top + 1) : Natural(0);
  } else {
    hi = 1;
    while (!ok(hi)) {
      hi *= 2;
      if (hi > nat(std::uint64_t{1} << 24))
        fail(ErrorCode::no_valid_cut, "no cut n <= 2^24 with " + phi.name() + "(B∖n) <= " + to_string(target));
    }
  }
  Natural lo = 0;  // invariant: ok(hi)
  while (lo < hi) {
    Natural mid = (lo + hi) / 2;
    if (ok(mid)) hi = mid;
    else lo = mid + 1;
  }
  return hi;
}

}  // namespace

NatSet union_oracle(const SetSequence& seq, std::uint64_t observed) {
  if (seq.limit) return *seq.limit;
  if (!seq.rule && observed > seq.prefix.size()) observed = seq.prefix.size();
  NatSet out = NatSet::empty();
  for (std::uint64_t i = 0; i < observed; ++i) out = set_union(out, seq.at(i));
  return out;
}

LimitCertificate sigma_limit(const SubmeasureDescriptor& nu, const SetSequence& seq, std::uint64_t depth,
                             const Settings& s) {
  auto terms = observe(seq, depth);
  require_increasing(seq, terms, s);
  LimitCertificate cert;
  cert.method = "sigma-limit";

  std::vector<Rational> inc;
  for (std::size_t i = 0; i + 1 < terms.size(); ++i)
    inc.push_back(exact_or(nu(set_difference(terms[i + 1], terms[i], s), s), ErrorCode::non_summable_increments,
                           "increment " + std::to_string(i)));
  for (const auto& x : inc) cert.increment_sum += x;

  const bool declared = seq.limit.has_value();
  if (declared && !seq.tail_bound)
    fail(ErrorCode::non_summable_increments, "a declared limit needs a certified increment tail bound");
  if (seq.tail_bound) {
    Rational partial = 0;
    for (std::size_t n = inc.size(); n-- > 0;) {
      partial += inc[n];
      if (partial > seq.tail_bound(n))
        fail(ErrorCode::non_summable_increments,
             "observed increments from " + std::to_string(n) + " sum to " + to_string(partial) + ", above the bound");
    }
  }
  cert.limit = declared ? *seq.limit : union_oracle(seq, depth);

  bool certified = true;
  if (declared && !nu.sigma_subadditive_claimed()) {
    certified = false;
    cert.notes.push_back(nu.name() + " is not sigma-subadditive; tail bounds are not proved");
  }
  for (std::uint64_t n = 0; n < terms.size(); ++n) {
    LimitStage st;
    st.n = n;
    st.inside = nu(set_difference(terms[n], cert.limit, s), s);
    st.outside = nu(set_difference(cert.limit, terms[n], s), s);
    if (seq.tail_bound) {
      st.bound = seq.tail_bound(n);
    } else {
      Rational b = 0;
      for (std::size_t j = n; j < inc.size(); ++j) b += inc[j];
      st.bound = b;
    }
    st.ok = is_zero(st.inside) && (!st.outside.is_exact() || st.outside.value() <= *st.bound);
    certified = certified && st.ok && st.outside.is_exact();
    cert.stages.push_back(st);
  }
  cert.certified = certified;
  return cert;
}

LimitCertificate lscsm_limit(const LscsmDescriptor& phi, const SetSequence& seq, std::uint64_t depth,
                             const Settings& s) {
  if (depth < 1) fail(ErrorCode::invalid_argument, "lscsm_limit needs at least one term");
  auto terms = observe(seq, depth);
  require_increasing(seq, terms, s);
  LimitCertificate cert;
  cert.method = "lscsm-limit";

  const std::size_t count = terms.size() - 1;
  std::vector<NatSet> inc;
  std::vector<Rational> norm;
  for (std::size_t j = 0; j < count; ++j) {
    inc.push_back(set_difference(terms[j + 1], terms[j], s));
    auto est = exhaustive_norm(phi, inc.back(), s);
    if (!est.value.is_exact())
      fail(ErrorCode::no_exact_norm, "increment " + std::to_string(j) + " has no exact " + phi.name() + " norm");
    norm.push_back(est.value.value());
    cert.increment_sum += norm.back();
  }
  // Σ_{j>=k} ‖B_j‖: observed terms, or the supplied bound covering the unobserved ones
  std::vector<Rational> tail(count + 1, Rational(0));
  for (std::size_t k = count; k-- > 0;) tail[k] = tail[k + 1] + norm[k];
  if (seq.tail_bound) {
    for (std::size_t k = 0; k <= count; ++k) {
      if (tail[k] > seq.tail_bound(k))
        fail(ErrorCode::non_summable_increments, "observed norms from " + std::to_string(k) + " exceed the bound");
      tail[k] = seq.tail_bound(k);
    }
  } else if (seq.rule) {
    cert.notes.push_back("no bound on unobserved increments; tail sums cover observed terms only");
  }

  std::vector<Natural> cuts;
  NatSet limit = terms[0];
  for (std::size_t j = 0; j < count; ++j) {
    Natural n = least_cut(phi, inc[j], 2 * norm[j], s);
    if (!cuts.empty()) n = std::max(n, Natural(cuts.back() + 1));
    cuts.push_back(n);
    limit = set_union(limit, drop_prefix(inc[j], n), s);
  }
  cert.limit = limit;

  bool certified = static_cast<bool>(seq.tail_bound) || !seq.rule;
  for (std::size_t k = 0; k < count; ++k) {
    LimitStage st;
    st.n = k;
    st.cut = cuts[k];
    auto missing = set_difference(terms[k], limit, s);
    bool below = is_finite(missing) && (!max_element(missing) || *max_element(missing) < cuts[k]);
    st.inside = exhaustive_norm(phi, missing, s).value;
    st.outside = exhaustive_norm(phi, set_symdiff(limit, terms[k], s), s).value;
    st.bound = 4 * tail[k];
    st.ok = below && is_zero(st.inside) && st.outside.is_exact() && st.outside.value() <= *st.bound;
    if (!below) cert.notes.push_back("A_" + std::to_string(k) + "∖A is not below n_" + std::to_string(k));
    certified = certified && st.ok;
    cert.stages.push_back(st);
  }
  cert.certified = certified;
  return cert;
}

LimitCertificate cauchy_to_limit(const SubmeasureDescriptor& nu, const SetSequence& seq, const Ap0Oracle& oracle,
                                 std::uint64_t depth, const Settings& s) {
  auto profile = cauchy_profile(nu, seq, depth, s);
  if (!profile.certified) fail(ErrorCode::not_cauchy, "the sequence has no certified Cauchy modulus");
  std::vector<std::uint64_t> index;
  for (const auto& [k, j] : profile.modulus) {
    if (k == 0) continue;
    std::uint64_t m = index.empty() ? j : std::max<std::uint64_t>(j, index.back() + 1);
    if (m >= depth) break;
    index.push_back(m);
  }
  if (index.empty()) fail(ErrorCode::not_cauchy, "no stage reaches distance 1/2 within the observed depth");

  LimitCertificate cert;
  cert.method = "cauchy-to-limit";
  std::vector<NatSet> terms;
  for (auto m : index) terms.push_back(seq.at(m));
  const std::size_t L = terms.size();

  auto check_contract = [&](const std::vector<NatSet>& input, const NatSet& out, const std::string& what) {
    for (std::size_t j = 0; j < input.size(); ++j) {
      auto v = nu(set_difference(input[j], out, s), s);
      if (!is_zero(v))
        fail(ErrorCode::oracle_contract_violated,
             what + ": nu(input[" + std::to_string(j) + "]∖result) = " + v.to_string() + ", expected exact 0");
    }
  };

  std::vector<NatSet> blocks;
  std::vector<std::optional<std::uint64_t>> first_j;
  for (std::size_t i = 0; i < L; ++i) {
    std::vector<NatSet> meets, complements;
    NatSet meet = terms[i];
    for (std::size_t j = i; j < L; ++j) {
      if (j > i) meet = set_intersection(meet, terms[j], s);
      meets.push_back(meet);
      complements.push_back(complement(meet, s));
    }
    auto co = SetSequence::of(complements, true);
    auto d = oracle(co, complements.size());
    check_contract(complements, d, "B_" + std::to_string(i));
    auto b = complement(d, s);
    std::optional<std::uint64_t> hit;
    for (std::size_t j = 0; j < meets.size() && !hit; ++j) {
      auto v = nu(set_symdiff(meets[j], b, s), s);
      auto hi = v.upper();
      if (!v.is_infinite() && hi && *hi < two_pow(-static_cast<long>(i))) hit = i + j;
    }
    blocks.push_back(b);
    first_j.push_back(hit);
  }

  std::vector<NatSet> unions;
  NatSet acc = NatSet::empty();
  for (const auto& b : blocks) {
    acc = set_union(acc, b, s);
    unions.push_back(acc);
  }
  auto cs = SetSequence::of(unions, true);
  cert.limit = oracle(cs, unions.size());
  check_contract(unions, cert.limit, "A");

  bool certified = true;
  for (std::size_t i = 0; i < L; ++i) {
    LimitStage st;
    st.n = index[i];
    st.inside = nu(set_difference(terms[i], cert.limit, s), s);
    st.outside = nu(set_difference(cert.limit, terms[i], s), s);
    st.c_residual = nu(set_symdiff(unions[i], cert.limit, s), s);
    st.first_j = first_j[i];
    auto sym = nu(set_symdiff(terms[i], cert.limit, s), s);
    if (sym.is_exact() && st.c_residual->is_exact()) {
      st.bound = two_pow(1 - static_cast<long>(i)) + st.c_residual->value();
      st.ok = sym.value() < *st.bound;
    } else {
      st.ok = false;
    }
    certified = certified && st.ok;
    cert.stages.push_back(st);
  }
  cert.certified = certified;
  cert.increment_sum = 0;
  return cert;
}

}  // namespace densitas
