#include "oracles.hpp"

#include <densitas/errors.hpp>
#include <densitas/sampling.hpp>
#include <densitas/set_literal.hpp>

#include <doctest.h>

using namespace densitas;

namespace {

NatSet lit(const char* s) { return parse_set_literal(s); }

const SetOp kOps[] = {SetOp::unite, SetOp::intersect, SetOp::difference, SetOp::symdiff};

bool apply(SetOp op, bool a, bool b) {
  switch (op) {
    case SetOp::unite: return a || b;
    case SetOp::intersect: return a && b;
    case SetOp::difference: return a && !b;
    case SetOp::symdiff: return a != b;
  }
  return false;
}

}  // namespace

TEST_SUITE("natset") {
  TEST_CASE("membership") {
    CHECK(lit("per m=2 R={0}").member(10));
    auto ap = lit("ap a=6 h=1 j0=1");
    CHECK(ap.member(7));
    CHECK_FALSE(ap.member(1));
  }

  TEST_CASE("count_range") {
    CHECK(lit("per m=2 R={0}").count_range(0, 10) == 5);
    CHECK(lit("ap a=6 h=1 j0=1").count_range(0, 20) == 3);
    CHECK(lit("blocks f(n)=2^-3").count_range(8, 16) == 1);
  }

  TEST_CASE("count_range matches enumeration on every backend") {
    SplitMix64 rng(11);
    std::vector<NatSet> sets;
    for (int i = 0; i < 20; ++i) sets.push_back(random_periodic(rng, 60, 30));
    for (int i = 0; i < 10; ++i) sets.push_back(random_dyadic(rng));
    for (int i = 0; i < 10; ++i) sets.push_back(random_finite(rng, 500, 40));
    sets.push_back(lit("ap a=6 h=1 j0=1 | ap a=10 h=3 | del={13} | add={2}"));
    sets.push_back(lit("ap a=5! h=7 j0=2 | ap a=4! h=1"));
    sets.push_back(truncate_to_horizon(lit("per m=7 R={1,2,5}"), 3000));
    for (const auto& a : sets) {
      for (int t = 0; t < 8; ++t) {
        auto l = rng.below(2500), len = rng.below(500);
        std::uint64_t brute = 0;
        for (auto x = l; x < l + len; ++x) brute += a.member(x) ? 1 : 0;
        CHECK(a.count_range(nat(l), nat(l + len)) == brute);
      }
    }
  }

  TEST_CASE("boolean operations") {
    auto evens = lit("per m=2 R={0}"), odds = lit("per m=2 R={1}");
    auto e = set_symdiff(evens, evens);
    CHECK(is_finite(e));
    CHECK_FALSE(max_element(e).has_value());

    auto w = set_symdiff(evens, odds);
    auto p = w.get_if<PeriodicSet>();
    REQUIRE(p);
    CHECK(p->modulus() == 1);

    auto six = set_intersection(evens, lit("per m=3 R={0}"));
    auto q = six.get_if<PeriodicSet>();
    REQUIRE(q);
    CHECK(q->modulus() == 6);
    CHECK(q->residues() == std::vector<std::uint64_t>{0});
    CHECK(oracle::agrees(six, [](std::uint64_t x) { return x % 6 == 0; }, 60));
  }

  TEST_CASE("boolean operations agree pointwise") {
    SplitMix64 rng(5);
    for (int i = 0; i < 40; ++i) {
      NatSet a = random_periodic(rng, 40, 20), b = random_periodic(rng, 40, 20);
      if (i % 3 == 1) b = random_finite(rng, 200, 30);
      if (i % 3 == 2) b = lit("ap a=6 h=1 j0=1 | ap a=10 h=3");
      for (auto op : kOps) {
        auto c = boolean_op(a, b, op);
        CHECK(oracle::agrees(c, [&](std::uint64_t x) { return apply(op, a.member(x), b.member(x)); }, 1500));
      }
    }
    for (int i = 0; i < 10; ++i) {
      auto a = random_dyadic(rng), b = random_dyadic(rng);
      for (auto op : kOps) {
        auto c = boolean_op(a, b, op);
        CHECK(oracle::agrees(c, [&](std::uint64_t x) { return apply(op, a.member(x), b.member(x)); }, 4096));
      }
    }
  }

  TEST_CASE("complement") {
    SplitMix64 rng(9);
    for (int i = 0; i < 10; ++i) {
      auto a = random_periodic(rng, 50, 10);
      auto c = complement(a);
      CHECK(oracle::agrees(c, [&](std::uint64_t x) { return !a.member(x); }, 600));
    }
    auto d = lit("blocks f(n)=[1/4,3/4]");
    auto cd = complement(d);
    CHECK(oracle::agrees(cd, [&](std::uint64_t x) { return !d.member(x); }, 2048));
  }

  TEST_CASE("transforms") {
    auto evens = lit("per m=2 R={0}");
    CHECK(oracle::agrees(shift(evens, 1), [](std::uint64_t x) { return x % 2 == 1; }, 100));
    auto three = dilate(NatSet::omega(), 3);
    auto p = three.get_if<PeriodicSet>();
    REQUIRE(p);
    CHECK(p->modulus() == 3);
    CHECK(p->residues() == std::vector<std::uint64_t>{0});
    auto d = dilate(lit("per m=2 R={1}"), 2);
    auto q = d.get_if<PeriodicSet>();
    REQUIRE(q);
    CHECK(q->modulus() == 4);
    CHECK(q->residues() == std::vector<std::uint64_t>{2});
    CHECK(oracle::agrees(d, [](std::uint64_t x) { return x % 4 == 2; }, 40));

    SplitMix64 rng(3);
    for (int i = 0; i < 20; ++i) {
      auto a = random_periodic(rng, 30, 15);
      auto h = rng.between(1, 100), k = rng.between(2, 5);
      CHECK(oracle::agrees(shift(a, nat(h)), [&](std::uint64_t x) { return x >= h && a.member(x - h); }, 500));
      CHECK(oracle::agrees(dilate(a, nat(k)), [&](std::uint64_t x) { return x % k == 0 && a.member(x / k); }, 500));
    }
  }

  TEST_CASE("normalize_periodic") {
    auto evens = normalize_periodic(*lit("ap a=2 h=0").get_if<APUnionSet>());
    CHECK(evens.modulus() == 2);
    CHECK(evens.residues() == std::vector<std::uint64_t>{0});

    auto p = normalize_periodic(*lit("ap a=6 h=1 j0=1").get_if<APUnionSet>());
    CHECK(p.modulus() == 6);
    CHECK(p.residues() == std::vector<std::uint64_t>{1});
    CHECK(p.removals() == std::vector<std::uint64_t>{1});
    CHECK(oracle::agrees(p, [](std::uint64_t x) { return x % 6 == 1 && x >= 7; }, 60));

    auto u = normalize_periodic(*lit("ap a=4 h=0 | ap a=6 h=3").get_if<APUnionSet>());
    CHECK(u.modulus() == 12);
    CHECK(u.residues() == std::vector<std::uint64_t>{0, 3, 4, 8, 9});
    CHECK(oracle::agrees(u, [](std::uint64_t x) { return x % 4 == 0 || x % 6 == 3; }, 120));
  }

  TEST_CASE("budget") {
    Settings s;
    s.modulus_budget = 100;
    CHECK_THROWS_AS(normalize_periodic(*lit("ap a=7! h=1").get_if<APUnionSet>(), s), Error);
  }

  TEST_CASE("horizon sets refuse queries beyond the horizon") {
    auto h = truncate_to_horizon(NatSet::omega(), 100);
    CHECK(NatSet(h).member(99));
    CHECK_THROWS_AS(NatSet(h).member(100), Error);
  }

  TEST_CASE("drop_prefix") {
    SplitMix64 rng(21);
    std::vector<NatSet> sets{lit("blocks f(n)=1/n"), lit("ap a=6 h=1 j0=1 | ap a=10 h=3 | add={2}"),
                             lit("fin{0..40}")};
    for (int i = 0; i < 10; ++i) sets.push_back(random_periodic(rng, 40, 20));
    for (const auto& a : sets)
      for (std::uint64_t n : {0u, 1u, 5u, 17u, 33u, 200u}) {
        auto d = drop_prefix(a, nat(n));
        CHECK(oracle::agrees(d, [&](std::uint64_t x) { return x >= n && a.member(x); }, 800));
      }
  }

  TEST_CASE("set literals") {
    auto f = lit("fin{1,2,3}");
    auto fs = f.get_if<FiniteSet>();
    REQUIRE(fs);
    CHECK(fs->size() == 3);

    auto ap = lit("ap a=6! h=1 j0=1");
    auto as = ap.get_if<APUnionSet>();
    REQUIRE(as);
    REQUIRE(as->terms().size() == 1);
    CHECK(as->terms()[0].modulus.value == 720);
    CHECK(as->terms()[0].modulus.label() == "6!");

    auto b = lit("blocks f(n)=2^-3");
    auto bs = b.get_if<DyadicBlockSet>();
    REQUIRE(bs);
    CHECK(slice_width(bs->rule().slice(5)) == Rational(1, 8));
  }

  TEST_CASE("set literal round trip") {
    SplitMix64 rng(4);
    std::vector<NatSet> sets{lit("omega"), lit("empty"), lit("fin{0..9}"), lit("ap a=6! h=1 j0=1 | ap a=10 h=3"),
                             lit("blocks f(n)=1/n"), lit("blocks f(n)=[1/2,1/4] round=ceil"),
                             truncate_to_horizon(lit("per m=5 R={1,4}"), 100)};
    for (int i = 0; i < 10; ++i) sets.push_back(random_periodic(rng));
    for (int i = 0; i < 10; ++i) sets.push_back(random_dyadic(rng));
    for (const auto& a : sets) {
      auto text = print_set_literal(a);
      auto back = parse_set_literal(text);
      CHECK_MESSAGE(pointwise_equal(a, back, 0, 100), text);
      CHECK(print_set_literal(back) == text);
    }
  }

  TEST_CASE("parse errors carry the position") {
    try {
      parse_set_literal("per m=6 R={1,,3}");
      FAIL("expected a parse error");
    } catch (const ParseError& e) {
      CHECK(e.position() == 13);
      CHECK(e.caret().find('^') != std::string::npos);
    }
    CHECK_THROWS_AS(parse_set_literal("blocks"), ParseError);
    CHECK_THROWS_AS(parse_set_literal("fin{3"), ParseError);
  }
}
