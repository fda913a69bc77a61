#include <densitas/errors.hpp>
#include <densitas/witness.hpp>

#include <doctest.h>

#include <cmath>

using namespace densitas;

namespace {

Natural fact(unsigned n) {
  Natural f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return f;
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error raised");
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST_SUITE("witness") {
  TEST_CASE("parameters for kappa = 1/2") {
    auto p = derive_params(Rational(1, 2));
    CHECK(p.C == 2);
    CHECK(p.N == 75);
    // least N > e^2 with ln(N)^2/N < 1/4, in long double
    auto cond = [](long double n) { return std::log(n) * std::log(n) / n < 0.25L; };
    CHECK(cond(75));
    for (int n = 8; n < 75; ++n) CHECK_FALSE(cond(n));
    REQUIRE(p.a.size() == 8);
    for (unsigned i = 0; i < p.a.size(); ++i) CHECK(p.a[i] == 8 + i);
    CHECK(validate_params(p).passed());
    CHECK_FALSE(p.demo);
  }

  TEST_CASE("validation rejects bad parameters") {
    auto p = derive_params(Rational(1, 2));
    auto small_n = p;
    small_n.N = 8;
    CHECK_FALSE(validate_params(small_n).passed());

    auto early = p;
    early.a[0] = 3;
    CHECK_FALSE(validate_params(early).passed());
    CHECK(code_of([&] { build_witness(early, 2); }) == ErrorCode::invalid_argument);

    auto flat = p;
    flat.a[2] = flat.a[1];
    CHECK_FALSE(validate_params(flat).passed());

    CHECK(code_of([&] { derive_params(Rational(1)); }) == ErrorCode::invalid_argument);
    CHECK(code_of([&] { build_witness(p, 7); }) == ErrorCode::schedule_too_short);
  }

  TEST_CASE("greedy levels") {
    auto w = build_witness(derive_params(Rational(1, 2)), 3);
    REQUIRE(w.levels.size() == 5);
    CHECK(w.levels[0].H.empty());
    CHECK(w.levels[1].H == std::vector<std::uint64_t>{0});
    CHECK(w.levels[2].H == std::vector<std::uint64_t>{1, 2});
    CHECK(w.levels[3].H == std::vector<std::uint64_t>{3, 4, 5});
    CHECK(w.levels[4].H == std::vector<std::uint64_t>{6, 7, 8, 9});

    // H_{n+1} = first n+1 residues r with r mod a_i! ∉ H_i for all i <= n
    for (unsigned n = 1; n + 1 < w.levels.size(); ++n) {
      std::vector<std::uint64_t> expect;
      for (std::uint64_t r = 0; expect.size() < n + 1; ++r) {
        bool blocked = false;
        for (unsigned i = 0; i <= n; ++i) {
          auto m = fact(w.params.a[i]);
          for (auto h : w.levels[i].H) blocked = blocked || Natural(r % m) == h;
        }
        if (!blocked) expect.push_back(r);
      }
      CHECK(w.levels[n + 1].H == expect);
      CHECK(w.levels[n + 1].ell == n + 1);
    }
  }

  TEST_CASE("counts and densities") {
    auto w = build_witness(derive_params(Rational(1, 2)), 2);
    for (unsigned n = 0; n < w.levels.size(); ++n) {
      const Natural M = fact(w.params.a[n]);
      for (const Natural& m : std::vector<Natural>{0, 1, M, M + 1, 3 * M + 2, 17 * M + 5}) {
        // #{k >= 1 : kM + h < m} summed over h
        Natural expect = 0;
        for (auto h : w.levels[n].H)
          if (m > M + h) expect += (m - h - 1) / M;
        CHECK(w.count_B(n, m) == expect);
      }
      CHECK(w.levels[n].modulus.label() == std::to_string(w.params.a[n]) + "!");
    }
    Rational d = 0;
    for (unsigned j = 0; j <= 3; ++j) d += Rational(Natural(j), fact(8 + j));
    d.canonicalize();
    CHECK(w.density_A(2) == d);
    const Natural top = 2 * fact(9) + 3;
    CHECK(w.count_A(0, top) == w.count_B(0, top) + w.count_B(1, top));
  }

  TEST_CASE("membership of B_n and A_n") {
    auto w = build_witness(derive_params(Rational(1, 2)), 1);
    auto b2 = w.B(2);
    const Natural M = fact(10);
    CHECK_FALSE(b2.member(1));
    CHECK(b2.member(M + 1));
    CHECK(b2.member(M + 2));
    CHECK_FALSE(b2.member(M + 3));
    auto a1 = w.A(1);
    CHECK(a1.member(fact(9)));
    CHECK(a1.member(2 * M + 2));
    CHECK_FALSE(a1.member(0));
  }

  TEST_CASE("invariants and certificates") {
    auto w = build_witness(derive_params(Rational(1, 2)), 3);
    CHECK(check_witness_invariants(w, 100'000).passed());
    auto div = divergence_certificate(w, 100'000);
    CHECK(div.holds);
    CHECK(div.target == Rational(1, 4));
    for (const auto& s : div.partial_sums) CHECK(s < Rational(1, 4));
    for (const auto& win : div.windows) CHECK(win.ratio == 1);
    auto gap = banach_gap_certificate(w, 100'000);
    CHECK(gap.upper_holds);
    CHECK(gap.lower_holds);
    CHECK(gap.banach_lower >= Rational(1, 2));
    CHECK(gap.max_ratio <= Rational(1, 4));
    CHECK_FALSE(gap.demo);
  }

  TEST_CASE("depth zero") {
    auto w = build_witness(derive_params(Rational(1, 2)), 0);
    REQUIRE(w.levels.size() == 2);
    CHECK(check_witness_invariants(w, 10'000).passed());
    CHECK(w.density_A(0) == Rational(Natural(1), fact(9)));
  }

  TEST_CASE("demo schedules carry the flag") {
    auto p = derive_params(Rational(1, 2));
    p.a = {3, 4, 5, 6, 7};
    p.demo = true;
    auto w = build_witness(p, 2);
    CHECK(w.demo());
    CHECK(validate_params(p).demo);
    CHECK(divergence_certificate(w, 10'000).demo);
  }

  TEST_CASE("the gap certificate needs kappa = 1/2") {
    auto p = derive_params(Rational(1, 3));
    CHECK(p.C == 3);
    auto w = build_witness(p, 1);
    CHECK(code_of([&] { banach_gap_certificate(w, 10'000); }) == ErrorCode::kappa_mismatch);
    CHECK(divergence_certificate(w, 10'000).target == Rational(1, 3));
  }

  TEST_CASE("schedule tail bound") {
    // Σ_{j>J} j/(a_J + j - J)! for the tightest continuation, summed far enough
    for (unsigned J : {1u, 3u, 6u})
      for (unsigned aJ : {8u, 12u}) {
        Rational tail = 0;
        for (unsigned t = 1; t <= 30; ++t) tail += Rational(Natural(J + t), fact(aJ + t));
        CHECK(tail <= schedule_tail_bound(J, aJ));
      }
  }

  TEST_CASE("witness sequence tail") {
    auto w = build_witness(derive_params(Rational(1, 2), 8), 5);
    auto seq = witness_sequence(w);
    REQUIRE(seq.tail_bound);
    for (unsigned n = 0; n < 4; ++n) {
      Rational observed = 0;
      for (unsigned j = n + 2; j < w.levels.size(); ++j) observed += Rational(Natural(j), fact(w.params.a[j]));
      CHECK(observed <= seq.tail_bound(n));
    }
  }
}
