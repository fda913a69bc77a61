#include "densitas/witness.hpp"

#include "densitas/errors.hpp"
#include "densitas/interval.hpp"

#include <algorithm>

namespace densitas {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

Rational ceil_inverse(const Rational& kappa) {
  Natural q;
  Rational inv = 1 / kappa;
  mpz_cdiv_q(q.get_mpz_t(), inv.get_num_mpz_t(), inv.get_den_mpz_t());
  return Rational(q);
}

bool log_condition(const Natural& n, const Rational& bound, const Settings& s) {
  auto q = [&](unsigned bits) {
    auto l = enclose_log(n, bits);
    return (l * l) * Rational(1 / Rational(n));
  };
  return certify_less(q, bound, s.interval_bits, s.interval_max_bits).holds;
}

bool exceeds_e_power(const Natural& value, const Rational& c, long power, const Settings& s) {
  auto q = [&](unsigned bits) { return enclose_exp(Rational(power), bits) * c; };
  return certify_less(q, Rational(value), s.interval_bits, s.interval_max_bits).holds;
}

bool factorial_admissible(unsigned a, std::size_t n, const Rational& kappa, const Natural& C, const Natural& N,
                          const Settings& s) {
  Natural f = factorial(a);
  if (!(Rational(f) > Rational(nat(n)) / kappa)) return false;
  if (!(f > (N + 1) * (N + 1))) return false;
  return exceeds_e_power(f, Rational(C), 2 * static_cast<long>(n + 1), s);
}

std::string level_label(unsigned n) { return "level[" + std::to_string(n) + "]"; }

// |{a·k + h : k >= 1} ∩ [0, m)|
Natural count_progression(const Natural& a, std::uint64_t h, const Natural& m) {
  Natural top = m - 1 - nat(h);
  if (top < a) return 0;
  return Natural(top / a);
}

// Elements of ⋃_{n in levels} B_n below `horizon`, sorted.
std::vector<Natural> elements_below(const WitnessFamily& w, unsigned top_level, std::uint64_t horizon) {
  std::vector<Natural> out;
  for (unsigned n = 1; n <= top_level; ++n) {
    const auto& lv = w.levels[n];
    for (auto h : lv.H)
      for (Natural x = lv.modulus.value + h; x < nat(horizon); x += lv.modulus.value) out.push_back(x);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// floor(P^{t/63}) for t = 0..63.
std::vector<Natural> log_probes(const Natural& P) {
  std::vector<Natural> out;
  for (unsigned t = 0; t <= 63; ++t) {
    Natural pw, r;
    mpz_pow_ui(pw.get_mpz_t(), P.get_mpz_t(), t);
    mpz_root(r.get_mpz_t(), pw.get_mpz_t(), 63);
    if (r < 1) r = 1;
    out.push_back(r);
  }
  return out;
}

std::vector<WitnessWindow> level_windows(const WitnessFamily& w, unsigned top_level) {
  std::vector<WitnessWindow> out;
  for (unsigned n = 1; n <= top_level; ++n) {
    const auto& lv = w.levels[n];
    WitnessWindow win;
    win.n = n;
    win.start = lv.modulus.value + lv.H.front();
    win.length = lv.ell;
    for (unsigned i = 0; i <= top_level; ++i)
      win.fill += w.count_B(i, win.start + lv.ell) - w.count_B(i, win.start);
    win.ratio = make_rational(win.fill, nat(lv.ell));
    out.push_back(win);
  }
  return out;
}

std::vector<std::vector<std::uint64_t>> greedy_levels(const WitnessParams& p, unsigned top) {
  std::vector<WitnessLevel> levels;
  levels.push_back({0, {}, 0, Modulus::factorial(p.a[0])});
  levels.push_back({1, {0}, 1, Modulus::factorial(p.a[1])});
  for (unsigned n = 1; n + 1 <= top; ++n) {
    WitnessLevel next{n + 1, {}, 0, Modulus::factorial(p.a[n + 1])};
    for (std::uint64_t r = 0; next.H.size() < n + 1; ++r) {
      if (nat(r) >= next.modulus.value)
        fail(ErrorCode::invariants_failed, "level " + std::to_string(n + 1) + " has no room below its modulus");
      if (!in_K(levels, n + 1, r)) next.H.push_back(r);
    }
    next.ell = 1 + next.H.back() - next.H.front();
    levels.push_back(next);
  }
  std::vector<std::vector<std::uint64_t>> out;
  for (auto& lv : levels) out.push_back(lv.H);
  return out;
}

}  // namespace

Rational schedule_tail_bound(std::size_t J, unsigned a_J) {
  // Σ_{t>=1} (J+t)/(a_J+t)! <= (J+1)/(a_J+1)! · Σ_t t/(a_J+2)^{t-1}
  Rational geometric = a_J >= 2 ? Rational(2) : Rational(4);
  return geometric * make_rational(nat(J + 1), factorial(a_J + 1));
}

WitnessParams derive_params(const Rational& kappa, std::size_t length, const Settings& s) {
  if (kappa <= 0 || kappa >= 1) fail(ErrorCode::invalid_argument, "kappa must lie in (0,1)");
  if (length < 2) fail(ErrorCode::invalid_argument, "the schedule needs at least two entries");
  WitnessParams p;
  p.kappa = kappa;
  p.kappa.canonicalize();
  p.C = ceil_inverse(kappa).get_num();
  const Rational target = (1 - kappa) / 2;
  p.N = 8;  // smallest integer above e^2
  while (!log_condition(p.N, target, s)) p.N += 1;

  Rational partial = 0;
  unsigned a = 1;
  for (std::size_t n = 0; n < length; ++n) {
    if (n > 0) a = p.a.back() + 1;
    while (true) {
      if (factorial_admissible(a, n, kappa, p.C, p.N, s)) {
        Rational next = partial + make_rational(nat(n), factorial(a));
        Rational margin = make_rational(1, 1) / Rational(factorial(a));
        if (next < target - margin && next + schedule_tail_bound(n, a) < target) {
          partial = next;
          break;
        }
      }
      ++a;
    }
    p.a.push_back(a);
  }
  return p;
}

ValidationReport validate_params(const WitnessParams& p, const Settings& s) {
  ValidationReport rep;
  rep.demo = p.demo;
  auto& r = rep.checks;
  r.subject = "witness-params";
  bool kappa_ok = p.kappa > 0 && p.kappa < 1;
  r.add("0<kappa<1", "kappa", kappa_ok, to_string(p.kappa));
  if (!kappa_ok) return rep;
  const Rational target = (1 - p.kappa) / 2;
  bool big = exceeds_e_power(p.N, Rational(1), 2, s);
  r.add("N>e^2", "N", big, "N=" + p.N.get_str());
  bool first = p.N >= 1 && log_condition(p.N, target, s);
  r.add("log^2(N)/N<(1-kappa)/2", "N", first, "N=" + p.N.get_str());
  bool c_ok = Rational(p.C) == ceil_inverse(p.kappa);
  r.add("C=ceil(1/kappa)", "C", c_ok, "C=" + p.C.get_str());
  bool increasing = !p.a.empty();
  for (std::size_t i = 1; i < p.a.size(); ++i) increasing = increasing && p.a[i] > p.a[i - 1];
  r.add("schedule-increasing", "a", increasing);

  Rational partial = 0;
  for (std::size_t n = 0; n < p.a.size(); ++n) {
    Natural f = factorial(p.a[n]);
    const auto label = "a[" + std::to_string(n) + "]=" + std::to_string(p.a[n]);
    bool k1 = Rational(f) > Rational(nat(n)) / p.kappa;
    r.add("a_n!>n/kappa", label, k1);
    bool k2 = exceeds_e_power(f, Rational(p.C), 2 * static_cast<long>(n + 1), s);
    r.add("a_n!>C*e^(2(n+1))", label, k2);
    bool k3 = f > (p.N + 1) * (p.N + 1);
    r.add("a_n!>(N+1)^2", label, k3, k3 ? "" : f.get_str() + " <= " + Natural((p.N + 1) * (p.N + 1)).get_str());
    partial += make_rational(nat(n), f);
  }
  if (!p.a.empty()) {
    Rational margin = make_rational(1, 1) / Rational(factorial(p.a.back()));
    bool sum_ok = partial < target - margin;
    r.add("sum j/a_j! < (1-kappa)/2 - 1/a_last!", "a", sum_ok, to_string(partial));
    Rational full = partial + schedule_tail_bound(p.a.size() - 1, p.a.back());
    bool tail_ok = full < target;
    r.add("sum j/a_j! with tail < (1-kappa)/2", "a", tail_ok, to_string(full));
  }
  return rep;
}

bool in_K(const std::vector<WitnessLevel>& levels, unsigned n_plus_1, std::uint64_t r) {
  for (unsigned i = 1; i < n_plus_1 && i < levels.size(); ++i) {
    const auto& lv = levels[i];
    std::uint64_t residue = nat(r) < lv.modulus.value ? r : Natural(nat(r) % lv.modulus.value).get_ui();
    if (std::binary_search(lv.H.begin(), lv.H.end(), residue)) return true;
  }
  return false;
}

NatSet WitnessFamily::B(unsigned n) const {
  const auto& lv = levels.at(n);
  if (lv.H.empty()) return NatSet::empty();
  std::vector<APTerm> terms;
  for (auto h : lv.H) terms.push_back(APTerm{lv.modulus, nat(h), 1});
  return APUnionSet(std::move(terms));
}

NatSet WitnessFamily::A(unsigned n) const {
  std::vector<APTerm> terms;
  for (unsigned i = 0; i <= n + 1; ++i)
    for (auto h : levels.at(i).H) terms.push_back(APTerm{levels[i].modulus, nat(h), 1});
  if (terms.empty()) return NatSet::empty();
  return APUnionSet(std::move(terms));
}

Natural WitnessFamily::count_B(unsigned n, const Natural& m) const {
  Natural total = 0;
  if (m <= 0) return total;
  for (auto h : levels.at(n).H) total += count_progression(levels[n].modulus.value, h, m);
  return total;
}

Natural WitnessFamily::count_A(unsigned n, const Natural& m) const {
  Natural total = 0;
  for (unsigned i = 0; i <= n + 1; ++i) total += count_B(i, m);
  return total;
}

Rational WitnessFamily::density_A(unsigned n) const {
  Rational d = 0;
  for (unsigned j = 0; j <= n + 1; ++j) d += make_rational(nat(j), levels.at(j).modulus.value);
  d.canonicalize();
  return d;
}

WitnessFamily family_from_levels(const WitnessParams& p, unsigned depth, std::vector<std::vector<std::uint64_t>> H) {
  if (p.a.size() < depth + 2)
    fail(ErrorCode::schedule_too_short, "depth " + std::to_string(depth) + " needs " + std::to_string(depth + 2) +
                                            " schedule entries, got " + std::to_string(p.a.size()));
  if (H.size() != depth + 2) fail(ErrorCode::invalid_argument, "expected " + std::to_string(depth + 2) + " levels");
  WitnessFamily w;
  w.params = p;
  w.depth = depth;
  for (unsigned n = 0; n < H.size(); ++n) {
    WitnessLevel lv;
    lv.n = n;
    lv.H = std::move(H[n]);
    std::sort(lv.H.begin(), lv.H.end());
    lv.ell = lv.H.empty() ? 0 : 1 + lv.H.back() - lv.H.front();
    lv.modulus = Modulus::factorial(p.a[n]);
    w.levels.push_back(std::move(lv));
  }
  return w;
}

WitnessFamily build_witness(const WitnessParams& p, unsigned depth, const Settings& s) {
  if (p.a.size() < depth + 2)
    fail(ErrorCode::schedule_too_short, "depth " + std::to_string(depth) + " needs " + std::to_string(depth + 2) +
                                            " schedule entries, got " + std::to_string(p.a.size()));
  if (!p.demo && !validate_params(p, s).passed())
    fail(ErrorCode::invalid_argument, "parameters fail validation; use demo mode for unvalidated schedules");
  return family_from_levels(p, depth, greedy_levels(p, depth + 1));
}

AxiomReport check_witness_invariants(const WitnessFamily& w, std::uint64_t horizon) {
  AxiomReport r;
  r.subject = w.demo() ? "witness (demo)" : "witness";
  const unsigned top = w.depth + 1;

  auto greedy = greedy_levels(w.params, top);
  for (unsigned n = 0; n <= top; ++n) {
    const auto& lv = w.levels[n];
    const auto label = level_label(n);
    r.add("greedy", label, lv.H == greedy[n]);

    // (a) B_i ∩ B_n = ∅ iff no h ∈ H_n has h mod a_i! ∈ H_i
    bool disjoint = true;
    for (unsigned i = 1; i < n; ++i)
      for (auto h : lv.H) {
        auto res = Natural(nat(h) % w.levels[i].modulus.value).get_ui();
        if (std::binary_search(w.levels[i].H.begin(), w.levels[i].H.end(), res)) disjoint = false;
      }
    r.add("(a) disjoint", label, disjoint);

    bool b = lv.H.size() == n && std::all_of(lv.H.begin(), lv.H.end(), [&](std::uint64_t h) {
      return nat(h) < lv.modulus.value;
    });
    r.add("(b) H_n in a_n!, |H_n|=n", label, b);

    if (n >= 1) {
      bool c = Rational(nat(n)) >= w.params.kappa * Rational(nat(lv.ell));
      r.add("(c) n >= kappa*l_n", label, c, "l_n=" + std::to_string(lv.ell));
    }

    // (d) B_n = a_n!·(ω∖{0}) + H_n, structurally and by membership where small
    bool d = true;
    auto bn = w.B(n);
    if (auto u = bn.get_if<APUnionSet>()) {
      d = u->terms().size() == lv.H.size();
      for (std::size_t t = 0; d && t < lv.H.size(); ++t) {
        const auto& term = u->terms()[t];
        d = term.modulus.value == lv.modulus.value && term.offset == nat(lv.H[t]) && term.start == 1;
      }
      if (d && lv.modulus.value * 3 <= nat(std::uint64_t{1} << 22)) {
        std::uint64_t m = lv.modulus.value.get_ui();
        for (std::uint64_t x = 0; x <= 3 * m && d; ++x) {
          bool expected = x >= m && std::binary_search(lv.H.begin(), lv.H.end(), x % m);
          d = bn.member(x) == expected;
        }
      }
    } else {
      d = lv.H.empty();
    }
    r.add("(d) B_n form", label, d);
  }

  for (unsigned i = 0; i < w.depth + 1; ++i) {
    const auto label = "A[" + std::to_string(i) + "]";
    // (e) A_i = B_0 ∪ … ∪ B_{i+1}
    bool e = true;
    auto ai = w.A(i);
    std::size_t expected_terms = 0;
    for (unsigned j = 0; j <= i + 1; ++j) expected_terms += w.levels[j].H.size();
    if (auto u = ai.get_if<APUnionSet>()) e = u->terms().size() == expected_terms;
    else e = expected_terms == 0;
    r.add("(e) A_i = B_0..B_{i+1}", label, e);

    // (f) |A_i ∩ m|/m < d(A_i) = Σ_{j<=i+1} j/a_j!
    Rational d = w.density_A(i);
    bool density_ok = true;
    if (auto u = ai.get_if<APUnionSet>()) density_ok = u->density() == d;
    r.add("(f) d(A_i) = sum j/a_j!", label, density_ok, to_string(d));
    bool f = true;
    std::string where;
    auto check = [&](const Natural& m) {
      if (m < 1 || !f) return;
      Rational ratio = make_rational(w.count_A(i, m), m);
      if (!(ratio < d)) {
        f = false;
        where = "m=" + m.get_str() + " ratio=" + to_string(ratio);
      }
    };
    for (const auto& x : elements_below(w, i + 1, horizon)) check(x + 1);
    for (const auto& m : log_probes(w.levels[top].modulus.value)) check(m);
    r.add("(f) prefix bound", label, f, where);
  }
  return r;
}

DivergenceCertificate divergence_certificate(const WitnessFamily& w, std::uint64_t horizon) {
  auto inv = check_witness_invariants(w, horizon);
  if (!inv.passed()) fail(ErrorCode::invariants_failed, std::to_string(inv.failures()) + " invariant checks failed");
  DivergenceCertificate c;
  c.demo = w.demo();
  c.target = (1 - w.params.kappa) / 2;
  Rational partial = 0;
  bool below = true;
  for (const auto& lv : w.levels) {
    Rational inc = make_rational(nat(lv.H.size()), lv.modulus.value);
    partial += inc;
    c.increments.push_back(inc);
    c.partial_sums.push_back(partial);
    below = below && partial < c.target;
  }
  c.windows = level_windows(w, w.depth + 1);
  bool windows_ok = std::all_of(c.windows.begin(), c.windows.end(),
                                [&](const WitnessWindow& x) { return x.ratio >= w.params.kappa; });
  c.holds = below && windows_ok;
  c.verdict = c.holds ? "Cauchy-with-kappa-obstruction" : "failed";
  if (c.demo) c.verdict += " (demo)";
  return c;
}

GapCertificate banach_gap_certificate(const WitnessFamily& w, std::uint64_t horizon) {
  if (w.params.kappa != Rational(1, 2))
    fail(ErrorCode::kappa_mismatch, "the gap certificate needs kappa = 1/2, got " + to_string(w.params.kappa));
  auto inv = check_witness_invariants(w, horizon);
  if (!inv.passed()) fail(ErrorCode::invariants_failed, std::to_string(inv.failures()) + " invariant checks failed");
  GapCertificate g;
  g.demo = w.demo();
  g.upper_limit = Rational(1, 4);
  const unsigned top = w.depth;
  auto count = [&](const Natural& m) {
    Natural total = 0;
    for (unsigned n = 0; n <= top; ++n) total += w.count_B(n, m);
    return total;
  };
  auto record = [&](const Natural& m, bool probe) {
    PrefixCheck pc{m, count(m), 0, probe};
    pc.ratio = make_rational(pc.count, m);
    if (pc.ratio > g.max_ratio) g.max_ratio = pc.ratio;
    g.checks.push_back(pc);
  };
  for (const auto& x : elements_below(w, top, horizon)) record(x + 1, false);
  g.breakpoints = g.checks.size();
  for (const auto& m : log_probes(w.levels[top + 1].modulus.value)) record(m, true);
  g.probes = g.checks.size() - g.breakpoints;
  g.upper_holds = g.max_ratio <= g.upper_limit;

  g.windows = level_windows(w, top);
  g.banach_lower = 1;
  for (const auto& win : g.windows) g.banach_lower = std::min(g.banach_lower, win.ratio);
  g.lower_holds = !g.windows.empty() && g.banach_lower >= Rational(1, 2);

  if (g.upper_holds && g.lower_holds)
    g.membership = classify_domain(ExtValue::approx(Rational(1, 2), ExtValue::Direction::lower_bound),
                                   ExtValue::approx(g.upper_limit, ExtValue::Direction::upper_bound));
  g.verdict = g.membership == Membership::out ? "B not in dom(bd) over the certified range" : "inconclusive";
  if (g.demo) g.verdict += " (demo)";
  return g;
}

SetSequence witness_sequence(const WitnessFamily& w) {
  std::vector<NatSet> terms;
  for (unsigned n = 0; n <= w.depth; ++n) terms.push_back(w.A(n));
  std::vector<Rational> inc;
  for (const auto& lv : w.levels) inc.push_back(make_rational(nat(lv.H.size()), lv.modulus.value));
  const auto& a = w.params.a;
  const std::size_t J = w.levels.size() - 1;
  Rational beyond = schedule_tail_bound(J, a[J]);
  return SetSequence::summable_increments(
      std::move(terms),
      [inc, beyond](std::uint64_t n) {
        Rational t = beyond;
        for (std::size_t j = n + 2; j < inc.size(); ++j) t += inc[j];
        return t;
      },
      "summable-increments");
}

}  // namespace densitas
