// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.
//   acceptance [--only N] [--json FILE] [--seed S]

#include <densitas/density.hpp>
#include <densitas/exhaust.hpp>
#include <densitas/limits.hpp>
#include <densitas/registry.hpp>
#include <densitas/report.hpp>
#include <densitas/sampling.hpp>
#include <densitas/witness.hpp>

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

namespace {

using namespace densitas;

struct Result {
  bool pass = true;
  std::string detail;
  Json json = Json::object();
};

void require(Result& r, bool ok, const std::string& what) {
  if (!ok && r.pass) {
    r.pass = false;
    r.detail = what;
  }
}

std::uint64_t g_seed = 20241015;

// ---------- independent oracles ----------

std::uint64_t brute_count(const NatSet& a, std::uint64_t lo, std::uint64_t hi) {
  std::uint64_t c = 0;
  for (std::uint64_t x = lo; x < hi; ++x) c += a.member(x) ? 1 : 0;
  return c;
}

// Densest and sparsest windows of length L (a multiple of the period) past the threshold.
struct BruteStats {
  Rational prefix, window;
};

BruteStats brute_periodic(const NatSet& a, std::uint64_t m, std::uint64_t t, std::uint64_t horizon) {
  const std::uint64_t L = m * ((horizon - t - m) / m);
  std::uint64_t c = brute_count(a, t, t + L);
  BruteStats out;
  out.prefix = make_rational(nat(c), nat(L));
  std::uint64_t best = c;
  for (std::uint64_t k = t; k + L + 1 <= horizon && k < t + m; ++k) {
    c = c - (a.member(k) ? 1 : 0) + (a.member(k + L) ? 1 : 0);
    best = std::max(best, c);
  }
  out.window = make_rational(nat(best), nat(L));
  return out;
}

// Bernoulli numbers B_j with B_1 = +1/2, for Faulhaber sums.
std::vector<Rational> bernoulli_plus(unsigned p) {
  std::vector<Rational> b(p + 1);
  b[0] = 1;
  for (unsigned m = 1; m <= p; ++m) {
    Rational acc = 0;
    for (unsigned j = 0; j < m; ++j) {
      Natural c;
      mpz_bin_uiui(c.get_mpz_t(), m + 1, j);
      acc += Rational(c) * b[j];
    }
    b[m] = -acc / (m + 1);
    b[m].canonicalize();
  }
  if (p >= 1) b[1] = Rational(1, 2);
  return b;
}

// Σ_{i=1}^{N} i^p.
Natural power_sum(const Natural& N, unsigned p) {
  static std::map<unsigned, std::vector<Rational>> cache;
  auto& b = cache[p];
  if (b.empty()) b = bernoulli_plus(p);
  Rational acc = 0;
  for (unsigned j = 0; j <= p; ++j) {
    Natural c, pw;
    mpz_bin_uiui(c.get_mpz_t(), p + 1, j);
    mpz_pow_ui(pw.get_mpz_t(), N.get_mpz_t(), p + 1 - j);
    acc += Rational(c * pw) * b[j];
  }
  acc /= p + 1;
  acc.canonicalize();
  return acc.get_num();
}

Natural pow2(unsigned k) {
  Natural x;
  mpz_ui_pow_ui(x.get_mpz_t(), 2, k);
  return x;
}

// ---------- criteria ----------

Result criterion1() {
  Result r;
  SplitMix64 rng(g_seed);
  std::size_t checked = 0;
  Json values = Json::array();
  for (int i = 0; i < 500 && r.pass; ++i) {
    auto a = random_periodic(rng);
    const auto& p = *a.get_if<PeriodicSet>();
    Rational expect = make_rational(static_cast<std::int64_t>(p.residues().size()), static_cast<std::int64_t>(p.modulus()));
    auto d = upper_asymptotic(a).value;
    auto b = upper_banach(a).value;
    auto u = upper_buck(a);
    auto brute = brute_periodic(a, p.modulus(), p.threshold(), 10'000);
    const std::string id = "sample " + std::to_string(i);
    require(r, d.is_exact() && b.is_exact() && u.is_exact(), id + ": non-exact value");
    if (!r.pass) break;
    require(r, d.value() == expect && b.value() == expect && u.value() == expect, id + ": value differs from |R|/m");
    require(r, brute.prefix == expect, id + ": brute prefix count " + to_string(brute.prefix));
    require(r, brute.window == expect, id + ": brute window count " + to_string(brute.window));
    values.push_back(to_string(expect));
    ++checked;
  }
  r.json["values"] = values;
  if (r.pass) r.detail = std::to_string(checked) + " periodic sets, d*=bd*=b*=|R|/m=brute";
  return r;
}

Result criterion2() {
  Result r;
  auto samples = random_family("periodic", 500, g_seed + 2);
  std::vector<std::array<NatSet, 3>> triples;
  for (std::size_t i = 0; i + 2 < samples.size(); ++i) triples.push_back({samples[i], samples[i + 1], samples[i + 2]});
  std::size_t total = 0;
  for (const auto& nu : {d_star(), bd_star(), buck()}) {
    auto sub = check_submeasure_axioms(nu, samples);
    auto pm = check_pseudometric(nu, triples);
    auto ud = check_upper_density_axioms(nu, samples, {2, 3, 5}, {1, 7, 100});
    for (const auto* rep : {&sub, &pm, &ud}) {
      total += rep->checks.size();
      for (const auto& c : rep->checks)
        require(r, c.passed, nu.name() + " " + c.axiom + " [" + c.sample + "] " + c.detail);
    }
    r.json[nu.name()] = Json{{"submeasure", sub.failures()}, {"pseudometric", pm.failures()},
                             {"upper_density", ud.failures()}, {"checks", sub.checks.size() + pm.checks.size() + ud.checks.size()}};
  }
  if (r.pass) r.detail = std::to_string(total) + " exact checks over d*, bd*, buck";
  return r;
}

Result criterion3() {
  Result r;
  SplitMix64 rng(g_seed);
  std::size_t n = 0;
  for (int i = 0; i < 500; ++i) {
    auto a = random_periodic(rng);
    auto d = upper_asymptotic(a).value;
    auto b = upper_banach(a).value;
    if (!d.is_exact() || !b.is_exact()) continue;
    require(r, exact_le(d, b), "sample " + std::to_string(i) + ": d*=" + d.to_string() + " > bd*=" + b.to_string());
    ++n;
  }
  require(r, n == 500, "only " + std::to_string(n) + " exact samples");
  r.json["exact_samples"] = n;
  if (r.pass) r.detail = "d* <= bd* on " + std::to_string(n) + " exact samples";
  return r;
}

Result criterion4() {
  Result r;
  auto psi = psi_dyadic();
  auto check = [&](const std::vector<NatSet>& family, const std::string& name) {
    Json out = Json::array();
    for (std::size_t i = 0; i < family.size(); ++i) {
      auto norm = exhaustive_norm(psi, family[i]).value;
      auto d = upper_asymptotic(family[i]).value;
      const std::string id = name + "[" + std::to_string(i) + "]";
      require(r, norm.is_exact() && d.is_exact(), id + ": non-exact");
      if (!norm.is_exact() || !d.is_exact()) return out;
      require(r, norm.value() / 2 <= d.value(), id + ": |A|_psi/2 > d*");
      require(r, d.value() <= 16 * norm.value(), id + ": d* > 16|A|_psi");
      out.push_back(Json{{"psi", to_string(norm.value())}, {"d", to_string(d.value())}});
    }
    return out;
  };
  r.json["periodic"] = check(random_family("periodic", 200, g_seed + 4), "periodic");
  r.json["dyadic"] = check(random_family("dyadic", 200, g_seed + 5), "dyadic");
  for (unsigned n = 0; n <= 12; ++n) {
    auto a = power_block_set(n);
    auto norm = exhaustive_norm(psi, a).value;
    Rational expect = two_pow(-static_cast<long>(n));
    require(r, norm.is_exact() && norm.value() == expect, "|A_" + std::to_string(n) + "|_psi = " + norm.to_string());
    // blocks k >= n: |A_n ∩ I_k| / |I_k| = 2^{-n} exactly
    for (unsigned k = n; k < n + 6 && k < 17; ++k) {
      std::uint64_t lo = std::uint64_t{1} << k;
      require(r, make_rational(nat(brute_count(a, lo, 2 * lo)), nat(lo)) == expect,
              "block " + std::to_string(k) + " of A_" + std::to_string(n));
    }
  }
  if (r.pass) r.detail = "sandwich on 200 periodic + 200 dyadic; |A_n|_psi = 2^-n for n <= 12";
  return r;
}

Result criterion5() {
  Result r;
  const Rational tol(1, 1'000'000);
  const unsigned k = 48;  // prefix cut 2^k(1+2^{-n})
  Json validation = Json::array();
  for (unsigned n = 0; n <= 10; ++n)
    for (unsigned a = 0; a <= 4; ++a) {
      const unsigned alpha = 1u << a;
      Natural top = pow2(k) + pow2(k - n) - 1;  // last member of the final block
      Natural full = power_sum(top, alpha);
      Natural last_block = full - power_sum(pow2(k) - 1, alpha);
      Natural members = 0;
      for (unsigned j = 0; j <= k; ++j) {
        Natural lo = pow2(j);
        Natural len = j >= n ? pow2(j - n) : Natural(1);
        members += power_sum(lo + len - 1, alpha) - power_sum(lo - 1, alpha);
      }
      Rational direct_lower = Rational(last_block) / Rational(full);
      Rational direct_norm = Rational(members) / Rational(full);
      direct_lower.canonicalize();
      direct_norm.canonicalize();
      long double x = 1.0L - std::pow(1.0L + std::ldexp(1.0L, -static_cast<int>(n)), -static_cast<long double>(alpha) - 1);
      Rational stated_lower(static_cast<double>(x));
      Rational closed = block_family_power_norm(n, alpha);
      auto lib = exhaustive_norm(phi_alpha(alpha), power_block_set(n)).value;
      const std::string id = "n=" + std::to_string(n) + " alpha=" + std::to_string(alpha);
      require(r, abs(direct_lower - stated_lower) <= tol, id + ": lower bound off by " +
                                                              std::to_string(Rational(direct_lower - stated_lower).get_d()));
      require(r, abs(direct_norm - closed) <= tol, id + ": closed norm off by " +
                                                       std::to_string(Rational(direct_norm - closed).get_d()));
      require(r, lib.is_exact() && lib.value() == closed, id + ": library norm " + lib.to_string());
      require(r, closed >= stated_lower - tol, id + ": norm below the lower bound");
    }
  Json found = Json::object();
  std::vector<NatSet> family;
  for (unsigned n = 0; n <= 16; ++n) family.push_back(power_block_set(n));
  auto psi = norm_submeasure(psi_dyadic());
  for (unsigned C : {1u, 2u, 4u, 8u}) {
    auto phi = norm_submeasure(phi_infty_truncated(2 * C - 1));
    auto probe = metric_equivalence_probe(phi, psi, family, std::nullopt, {Rational(C)});
    const std::string id = "C=" + std::to_string(C);
    require(r, probe.verdict == RatioReport::Verdict::ratio_diverges, id + ": " + std::string(to_string(probe.verdict)));
    if (probe.witnesses.empty()) continue;
    auto n = probe.witnesses.front().second;
    const auto& ratio = probe.samples[n].ratio;
    require(r, ratio && *ratio > C, id + ": witness ratio not above C");
    found[std::to_string(C)] = Json{{"n", n}, {"ratio", ratio ? to_string(*ratio) : ""}, {"verdict", "ratio-diverges"}};
  }
  r.json["blow_up"] = found;
  if (r.pass) {
    std::ostringstream d;
    d << "lower bound and closed norm within 1e-6 of Faulhaber sums; n_C =";
    for (auto& [c, v] : found.items()) d << " " << c << ":" << v["n"].get<unsigned>();
    r.detail = d.str();
  }
  return r;
}

SetSequence valuation_sequence(unsigned depth) {
  std::vector<NatSet> terms;
  NatSet a = NatSet::empty();
  for (unsigned n = 0; n < depth; ++n) {
    terms.push_back(a);
    const std::uint64_t m = std::uint64_t{2} << n;
    a = set_union(a, PeriodicSet(m, {m / 2}));
  }
  return SetSequence::summable_increments(std::move(terms), [](std::uint64_t n) { return two_pow(-static_cast<long>(n)); },
                                          "geometric-increments");
}

Result criterion6() {
  Result r;
  const unsigned K = 20;
  std::vector<NatSet> terms;
  for (unsigned n = 0; n <= K + 1; ++n) {
    std::vector<Natural> xs;
    for (unsigned j = 0; j < n; ++j) xs.push_back(pow2(j));  // [2^j, 2^j(1+2^{-j})) = {2^j}
    terms.push_back(FiniteSet(std::move(xs)));
  }
  auto seq = SetSequence::summable_increments(terms, [](std::uint64_t) { return Rational(0); }, "finite-increments");
  auto cert = lscsm_limit(phi_prefix(), seq, K + 2);
  require(r, cert.stages.size() == K + 1, "expected stages 0.." + std::to_string(K));
  for (const auto& st : cert.stages) {
    const std::string id = "k=" + std::to_string(st.n);
    require(r, st.cut.has_value(), id + ": no cut");
    if (!st.cut) break;
    // A_k∖A ⊆ n_k, by enumeration
    for (unsigned j = 0; j < st.n; ++j)
      if (!cert.limit.member(pow2(j))) require(r, pow2(j) < *st.cut, id + ": 2^" + std::to_string(j) + " >= n_k");
    require(r, st.bound.has_value() && *st.bound <= two_pow(3 - static_cast<long>(st.n)), id + ": bound above 2^{3-k}");
    require(r, st.outside.is_exact() && st.bound && st.outside.value() <= *st.bound, id + ": residual above the bound");
  }
  require(r, cert.certified, "lscsm_limit not certified");
  r.json["points"] = to_json(cert);

  // non-degenerate variant: infinite increments of norm 2^{-j-1}
  auto vcert = lscsm_limit(phi_prefix(), valuation_sequence(13), 13);
  for (const auto& st : vcert.stages) {
    const std::string id = "valuation k=" + std::to_string(st.n);
    Rational expect_residual = two_pow(-static_cast<long>(st.n));  // A△A_k = {x > 0 : 2^k | x} up to finite sets
    require(r, st.outside.is_exact() && st.outside.value() <= *st.bound, id + ": residual above the bound");
    require(r, st.outside.is_exact() && st.outside.value() <= expect_residual, id + ": residual " + st.outside.to_string());
    require(r, *st.bound <= two_pow(3 - static_cast<long>(st.n)), id + ": bound above 2^{3-k}");
  }
  require(r, vcert.certified, "valuation lscsm_limit not certified");
  r.json["valuation"] = to_json(vcert);
  if (r.pass) r.detail = "A_k∖A ⊆ n_k and residual <= 4·tail <= 2^{3-k} for k <= 20; valuation variant certified";
  return r;
}

const WitnessFamily& witness() {
  static const WitnessFamily w = build_witness(derive_params(Rational(1, 2)), 4);
  return w;
}

Result criterion7() {
  Result r;
  const auto& w = witness();
  const auto& p = w.params;
  require(r, p.N == 75 && p.C == 2, "derived N=" + to_string(p.N) + " C=" + to_string(p.C));
  for (unsigned i = 1; i <= 4; ++i) {
    std::vector<std::uint64_t> expect;
    for (unsigned j = 0; j < i; ++j) expect.push_back(i * (i - 1) / 2 + j);
    require(r, w.levels[i].H == expect, "H_" + std::to_string(i) + " differs from {C(i,2)+j : j<i}");
  }
  auto inv = check_witness_invariants(w, 1'000'000);
  for (const auto& c : inv.checks) require(r, c.passed, c.axiom + " [" + c.sample + "] " + c.detail);
  auto div = divergence_certificate(w);
  Rational partial = 0;
  for (unsigned i = 0; i < w.levels.size(); ++i) {
    Natural mod = factorial(p.a[i]);
    Rational expect = make_rational(nat(i), mod);
    require(r, div.increments[i] == expect, "increment " + std::to_string(i));
    // one full period of B_i past a_i! holds exactly |H_i| members
    require(r, w.count_B(i, 2 * mod) - w.count_B(i, mod) == i, "B_" + std::to_string(i) + " period count");
    partial += expect;
    require(r, partial < Rational(1, 4), "partial sum reaches 1/4 at " + std::to_string(i));
  }
  require(r, div.holds, "divergence certificate: " + div.verdict);
  r.json["family"] = to_json(w);
  r.json["invariants"] = to_json(inv);
  r.json["divergence"] = to_json(div);
  if (r.pass) r.detail = "H_i closed form, " + std::to_string(inv.checks.size()) + " invariant checks, Σ i/a_i! = " +
                         std::to_string(partial.get_d());
  return r;
}

bool in_B(const WitnessFamily& w, std::uint64_t x, unsigned top) {
  for (unsigned n = 0; n <= top; ++n) {
    const auto& l = w.levels[n];
    if (!fits_u64(l.modulus.value)) continue;
    auto mod = to_u64(l.modulus.value);
    if (x < mod) continue;
    auto res = x % mod;
    for (auto h : l.H)
      if (h == res) return true;
  }
  return false;
}

Natural count_B_below(const WitnessFamily& w, const Natural& m, unsigned top) {
  Natural c = 0;
  for (unsigned n = 0; n <= top; ++n)
    for (auto h : w.levels[n].H) {
      // members a·q + h, q >= 1, below m
      if (m <= w.levels[n].modulus.value + h) continue;
      c += (m - 1 - h) / w.levels[n].modulus.value;
    }
  return c;
}

Result criterion8() {
  Result r;
  const auto& w = witness();
  const std::uint64_t H = 1'000'000;
  auto gap = banach_gap_certificate(w, H);
  require(r, gap.upper_holds, "prefix ratios exceed 1/4: " + to_string(gap.max_ratio));
  require(r, gap.lower_holds, "Banach lower bound " + to_string(gap.banach_lower));
  require(r, gap.probes == 64, "probe count " + std::to_string(gap.probes));
  require(r, gap.membership == Membership::out, "membership " + std::string(to_string(gap.membership)));

  // brute force: every prefix below the horizon
  std::uint64_t c = 0;
  Rational worst = 0;
  for (std::uint64_t x = 0; x < H; ++x) {
    if (!in_B(w, x, 4)) continue;
    ++c;
    Rational q = make_rational(nat(c), nat(x + 1));
    if (q > worst) worst = q;
  }
  require(r, worst <= Rational(1, 4), "brute prefix ratio " + to_string(worst));
  // probes, by an independent count
  for (const auto& pc : gap.checks) {
    if (!pc.probe) continue;
    auto cnt = count_B_below(w, pc.m, 4);
    require(r, cnt == pc.count, "probe m=" + to_string(pc.m) + " count mismatch");
    require(r, pc.m == 0 || 4 * cnt <= pc.m, "probe m=" + to_string(pc.m) + " ratio above 1/4");
  }
  // windows, by enumeration
  for (const auto& win : gap.windows) {
    Natural fill = count_B_below(w, win.start + win.length, 4) - count_B_below(w, win.start, 4);
    require(r, fill == win.fill && 2 * fill >= nat(win.length), "window at " + to_string(win.start));
  }
  r.json["gap"] = to_json(gap);
  if (r.pass)
    r.detail = std::to_string(gap.breakpoints) + " breakpoints + brute scan below 1e6 + 64 probes <= 1/4; windows >= 1/2; " +
               gap.verdict;
  return r;
}

Result criterion9() {
  Result r;
  const auto& w = witness();
  auto seq = witness_sequence(w);
  const unsigned depth = w.depth + 1;
  auto prof = cauchy_profile(bd_star(), seq, depth);
  require(r, prof.certified, "modulus not certified (route " + prof.route + ")");
  require(r, !prof.modulus.empty(), "empty modulus");
  const auto& a = w.params.a;
  for (unsigned i = 0; i < depth; ++i)
    for (unsigned j = i + 1; j < depth; ++j) {
      Rational expect = 0;  // A_j∖A_i = B_{i+2} ∪ … ∪ B_{j+1}, disjoint
      for (unsigned k = i + 2; k <= j + 1; ++k) expect += make_rational(nat(k), factorial(a[k]));
      const auto& v = prof.table[i][j];
      require(r, v.is_exact() && v.value() == expect, "d(A_" + std::to_string(i) + ",A_" + std::to_string(j) + ")");
    }
  for (const auto& [k, j] : prof.modulus) require(r, seq.tail_bound(j) < two_pow(-static_cast<long>(k)), "modulus entry");
  r.json["cauchy"] = to_json(prof);
  if (r.pass)
    r.detail = "certified modulus to 2^-" + std::to_string(prof.modulus.back().first) + " via " + prof.route;
  return r;
}

using Criterion = std::function<Result()>;

std::vector<Criterion> criteria() {
  return {criterion1, criterion2, criterion3, criterion4, criterion5,
          criterion6, criterion7, criterion8, criterion9};
}

std::vector<std::string> run_bytes() {
  std::vector<std::string> out;
  for (auto& c : criteria()) {
    auto res = c();
    out.push_back(emit_json(Json{{"pass", res.pass}, {"detail", res.detail}, {"body", res.json}}));
  }
  return out;
}

Result criterion10() {
  Result r;
  auto first = run_bytes();
  auto second = run_bytes();
  std::size_t bytes = 0;
  for (std::size_t i = 0; i < first.size(); ++i) {
    bytes += first[i].size();
    require(r, first[i] == second[i], "criterion " + std::to_string(i + 1) + " differs between runs");
  }
  if (r.pass) r.detail = "criteria 1-9 byte-identical across two runs (" + std::to_string(bytes) + " bytes)";
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  std::string json_path;
  for (int i = 1; i < argc; ++i) {
    if (!std::strcmp(argv[i], "--only") && i + 1 < argc) only = std::atoi(argv[++i]);
    else if (!std::strcmp(argv[i], "--json") && i + 1 < argc) json_path = argv[++i];
    else if (!std::strcmp(argv[i], "--seed") && i + 1 < argc) g_seed = std::strtoull(argv[++i], nullptr, 10);
    else {
      std::cerr << "usage: acceptance [--only N] [--json FILE] [--seed S]\n";
      return 2;
    }
  }
  auto all = criteria();
  all.push_back(criterion10);
  bool ok = true;
  Json summary = Json::object();
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (only && static_cast<int>(i + 1) != only) continue;
    auto t0 = std::chrono::steady_clock::now();
    Result res;
    try {
      res = all[i]();
    } catch (const std::exception& e) {
      res.pass = false;
      res.detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    ok = ok && res.pass;
    std::printf("criterion %2zu %s  %s  [%.2fs]\n", i + 1, res.pass ? "PASS" : "FAIL", res.detail.c_str(), secs);
    std::fflush(stdout);
    summary[std::to_string(i + 1)] = Json{{"pass", res.pass}, {"detail", res.detail}, {"body", res.json}};
  }
  if (!json_path.empty()) std::ofstream(json_path) << emit_json(summary);
  return ok ? 0 : 1;
}
