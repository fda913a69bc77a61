#include <densitas/errors.hpp>
#include <densitas/metric.hpp>
#include <densitas/registry.hpp>
#include <densitas/sampling.hpp>
#include <densitas/set_literal.hpp>

#include <doctest.h>

#include <numeric>

using namespace densitas;

namespace {

NatSet lit(const std::string& s) { return parse_set_literal(s); }

Rational exact(const ExtValue& v) {
  REQUIRE(v.is_exact());
  return v.value();
}

SubmeasureDescriptor squared_d_star() {
  return SubmeasureDescriptor(
      "d-star-squared",
      [](const NatSet& a, const Settings& s) {
        auto e = upper_asymptotic(a, s);
        if (e.value.is_exact()) e.value = ExtValue::exact(e.value.value() * e.value.value());
        return e;
      },
      {Backend::finite, Backend::periodic}, false, false);
}

}  // namespace

TEST_SUITE("metric") {
  TEST_CASE("distances") {
    CHECK(exact(dist(d_star(), lit("per m=6 R={1,3}"), lit("per m=6 R={0,1}"))) == Rational(1, 3));
    CHECK(exact(dist(d_star(), lit("per m=2 R={0}"), lit("per m=2 R={1}"))) == 1);
    CHECK(exact(dist(bd_star(), lit("per m=4 R={0}"), lit("per m=4 R={0} t=100 add={1,2,3}"))) == 0);
    // counting distance saturates at 1
    CHECK(exact(dist(counting(), lit("fin{1,2,3}"), lit("fin{4,5}"))) == 1);
    CHECK(exact(dist(counting(), lit("fin{1,2,3}"), lit("fin{1,2,3}"))) == 0);
  }

  TEST_CASE("distance is d(A△B) computed pointwise") {
    SplitMix64 rng(4);
    for (int i = 0; i < 40; ++i) {
      auto a = random_periodic(rng, 24, 8), b = random_periodic(rng, 24, 8);
      // both patterns repeat with period lcm(m_a, m_b) | 24!, so one long window beyond the thresholds is exact
      std::uint64_t m = std::lcm(a.get_if<PeriodicSet>()->modulus(), b.get_if<PeriodicSet>()->modulus());
      std::uint64_t c = 0;
      for (std::uint64_t x = 64 * m; x < 65 * m; ++x) c += a.member(x) != b.member(x);
      Rational expect(nat(c), nat(m));
      expect.canonicalize();
      CHECK(exact(dist(d_star(), a, b)) == expect);
    }
  }

  TEST_CASE("pseudometric battery") {
    auto samples = random_family("periodic", 90, 5);
    std::vector<std::array<NatSet, 3>> triples;
    for (std::size_t i = 0; i + 2 < samples.size(); i += 3) triples.push_back({samples[i], samples[i + 1], samples[i + 2]});
    CHECK(check_pseudometric(d_star(), triples).passed());
    CHECK(check_pseudometric(bd_star(), triples).passed());

    // ν = d*² is not subadditive: d(∅,ω) = 1 > 1/4 + 1/4
    auto r = check_pseudometric(squared_d_star(), {{NatSet::empty(), lit("per m=2 R={0}"), NatSet::omega()}});
    CHECK_FALSE(r.passed());
  }

  TEST_CASE("cauchy profile of a constant sequence") {
    auto seq = SetSequence::constant(lit("per m=3 R={1}"));
    auto rep = cauchy_profile(d_star(), seq, 4);
    CHECK(rep.certified);
    REQUIRE(rep.table.size() == 4);
    for (const auto& row : rep.table)
      for (const auto& v : row) CHECK(exact(v) == 0);
  }

  TEST_CASE("cauchy profile of finite modifications") {
    auto seq = SetSequence::finite_modifications([](std::uint64_t n) {
      return set_union(lit("per m=5 R={2}"), lit("fin{0.." + std::to_string(n) + "}"));
    });
    auto rep = cauchy_profile(d_star(), seq, 6);
    CHECK(rep.certified);
    for (const auto& row : rep.table)
      for (const auto& v : row) CHECK(exact(v) == 0);
    // counting sees every difference
    auto cnt = cauchy_profile(counting(), seq, 6);
    CHECK(exact(cnt.table[0][3]) == 1);
  }

  TEST_CASE("an uncertified prefix is not reported as Cauchy") {
    auto seq = SetSequence::of({lit("per m=2 R={0}"), lit("per m=2 R={1}"), lit("per m=2 R={0}"), lit("per m=2 R={1}")});
    auto rep = cauchy_profile(d_star(), seq, 4);
    CHECK_FALSE(rep.certified);
    CHECK(exact(rep.table[0][1]) == 1);
  }

  TEST_CASE("ratio probe: two-sided on periodic sets") {
    auto fam = random_family("periodic", 40, 3);
    auto psi = norm_submeasure(lscsm_by_name("psi"));
    auto rep = metric_equivalence_probe(d_star(), psi, fam, std::make_pair(Rational(1, 2), Rational(16)));
    CHECK(rep.verdict == RatioReport::Verdict::two_sided);
    CHECK(rep.c1 == Rational(1, 2));
    CHECK(rep.c2 == 16);

    // a claimed lower constant above the observed ratio is refuted
    auto bad = metric_equivalence_probe(d_star(), psi, fam, std::make_pair(Rational(2), Rational(16)));
    CHECK(bad.verdict != RatioReport::Verdict::two_sided);
  }

  TEST_CASE("ratio probe: divergence on power blocks") {
    std::vector<NatSet> fam;
    for (unsigned n = 0; n <= 12; ++n) fam.push_back(power_block_set(n));
    auto rep = metric_equivalence_probe(norm_submeasure(lscsm_by_name("phi-infty-trunc:a0=3")),
                                        norm_submeasure(lscsm_by_name("psi")), fam, std::nullopt,
                                        {Rational(1), Rational(2), Rational(4)});
    CHECK(rep.verdict == RatioReport::Verdict::ratio_diverges);
    CHECK(rep.witnesses.size() == 3);
    // with no target reachable the verdict stays open
    auto open = metric_equivalence_probe(d_star(), norm_submeasure(lscsm_by_name("psi")), fam, std::nullopt,
                                         {Rational(1000)});
    CHECK(open.verdict == RatioReport::Verdict::inconclusive);
  }

  TEST_CASE("coconvergence") {
    std::vector<LimitedSequence> seqs;
    seqs.push_back({"constant", SetSequence::constant(lit("per m=3 R={0}")), lit("per m=3 R={0}"), 6});
    seqs.push_back({"points", SetSequence::finite_modifications([](std::uint64_t n) {
                      return lit("fin{0.." + std::to_string(n) + "}");
                    }),
                    NatSet::empty(), 6});
    auto rep = topological_coconvergence_probe(d_star(), bd_star(), seqs);
    CHECK(rep.all_agree());
    REQUIRE(rep.entries.size() == 2);
    CHECK(rep.entries[1].first_vanishes);
    CHECK(rep.entries[1].second_vanishes);

    // counting does not see finite sets as small
    auto split = topological_coconvergence_probe(d_star(), counting(), seqs);
    CHECK_FALSE(split.entries[1].agree);
  }

  TEST_CASE("sequence validation") {
    auto bad = SetSequence::of({lit("fin{1,2}"), lit("fin{1}")}, true);
    CHECK_THROWS_AS(validate_sequence(bad), Error);
    auto seq = SetSequence::of({lit("fin{1}")});
    CHECK_THROWS_AS(seq.at(3), Error);
  }
}
