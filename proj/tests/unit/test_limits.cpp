#include <densitas/errors.hpp>
#include <densitas/limits.hpp>
#include <densitas/registry.hpp>
#include <densitas/set_literal.hpp>
#include <densitas/witness.hpp>

#include <doctest.h>

using namespace densitas;

namespace {

NatSet lit(const std::string& s) { return parse_set_literal(s); }

Rational exact(const ExtValue& v) {
  REQUIRE(v.is_exact());
  return v.value();
}

// fin{0, 4, ..., 4(n-1)}
NatSet multiples_below(std::uint64_t n) {
  std::string s = "fin{";
  for (std::uint64_t i = 0; i < n; ++i) s += (i ? "," : "") + std::to_string(4 * i);
  return lit(s + "}");
}

// Σ_{j>=n} 2^{-4j-1}, the geometric mass of {4j : j >= n}
Rational geometric_tail(std::uint64_t n) { return two_pow(-4 * static_cast<long>(n) - 1) * Rational(16, 15); }

}  // namespace

TEST_SUITE("limits") {
  TEST_CASE("sigma limit under the geometric measure") {
    std::vector<NatSet> terms;
    for (std::uint64_t n = 0; n < 8; ++n) terms.push_back(multiples_below(n));
    auto seq = SetSequence::summable_increments(terms, geometric_tail, "geometric");
    seq.limit = lit("per m=4 R={0}");
    auto cert = sigma_limit(geometric(), seq, 8);
    CHECK(cert.certified);
    REQUIRE(cert.stages.size() == 8);
    for (const auto& st : cert.stages) {
      CHECK(exact(st.inside) == 0);
      CHECK(exact(st.outside) == geometric_tail(st.n));
    }
    CHECK(cert.increment_sum == geometric_tail(0) - geometric_tail(7));
  }

  TEST_CASE("sigma limit with the union oracle") {
    std::vector<NatSet> terms;
    for (std::uint64_t n = 0; n < 6; ++n) terms.push_back(multiples_below(n));
    auto seq = SetSequence::of(terms, true);
    auto cert = sigma_limit(geometric(), seq, 6);
    CHECK(print_set_literal(cert.limit) == print_set_literal(union_oracle(seq, 6)));
    CHECK(exact(cert.stages.back().outside) == 0);
  }

  TEST_CASE("refusals") {
    auto alt = SetSequence::of({lit("per m=2 R={0}"), NatSet::omega(), lit("per m=2 R={0}")}, true);
    CHECK_THROWS_AS(sigma_limit(d_star(), alt, 3), Error);
    try {
      sigma_limit(d_star(), SetSequence::of({NatSet::omega()}, false), 1);
      FAIL("expected not_monotone");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::not_monotone);
    }

    std::vector<NatSet> terms;
    for (std::uint64_t n = 0; n < 5; ++n) terms.push_back(lit("fin{0.." + std::to_string(n) + "}"));
    auto seq = SetSequence::summable_increments(terms, [](std::uint64_t) { return Rational(0); }, "wrong");
    seq.limit = NatSet::omega();
    try {
      sigma_limit(counting(), seq, 5);
      FAIL("expected non_summable_increments");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::non_summable_increments);
    }
  }

  TEST_CASE("constant sequences") {
    auto a = lit("per m=7 R={1,2,4}");
    auto geo = sigma_limit(geometric(), SetSequence::constant(a), 4);
    CHECK(geo.certified);
    CHECK(print_set_literal(geo.limit) == print_set_literal(a));
    // d* is not sigma-subadditive, so a declared limit is only observed
    auto cert = sigma_limit(d_star(), SetSequence::constant(a), 4);
    CHECK_FALSE(cert.certified);
    CHECK_FALSE(cert.notes.empty());
    for (const auto& st : cert.stages) CHECK(exact(st.outside) == 0);
    auto lc = lscsm_limit(lscsm_by_name("phi-prefix"), SetSequence::constant(a), 4);
    CHECK(lc.certified);
    for (const auto& st : lc.stages) CHECK(exact(st.inside) == 0);
  }

  TEST_CASE("lscsm limit of growing points") {
    std::vector<NatSet> terms;
    std::string s;
    for (std::uint64_t j = 0; j < 10; ++j) {
      terms.push_back(lit("fin{" + s + "}"));
      s += (j ? "," : "") + std::to_string(std::uint64_t{1} << j);
    }
    auto seq = SetSequence::of(terms, true);
    auto cert = lscsm_limit(lscsm_by_name("phi-prefix"), seq, 10);
    CHECK(cert.certified);
    for (const auto& st : cert.stages) {
      CHECK(exact(st.inside) == 0);
      REQUIRE(st.cut);
    }
  }

  TEST_CASE("cauchy to limit on the witness sequence") {
    auto w = build_witness(derive_params(Rational(1, 2), 6), 4);
    auto seq = witness_sequence(w);
    // complements of the later terms have ~a_n! residues
    try {
      cauchy_to_limit(bd_star(), seq, union_oracle, 4);
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::modulus_budget_exceeded);
    }
    auto cert = cauchy_to_limit(bd_star(), seq, union_oracle, 2);
    CHECK(cert.method == "cauchy-to-limit");
    REQUIRE_FALSE(cert.stages.empty());
    for (const auto& st : cert.stages) {
      REQUIRE(st.c_residual);
      CHECK(st.ok);
    }
  }
}
