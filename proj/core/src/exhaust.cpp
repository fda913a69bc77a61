#include "densitas/exhaust.hpp"

#include "densitas/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace densitas {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

constexpr std::uint64_t kPrefixLimit = std::uint64_t{1} << 28;

std::uint64_t prefix_bound(const Natural& n) {
  if (n < 0 || n > nat(kPrefixLimit)) fail(ErrorCode::invalid_argument, "prefix length " + n.get_str() + " too large");
  return to_u64(n);
}

Natural two_to(std::uint64_t k) {
  Natural p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, k);
  return p;
}

std::optional<Rational> pure_density(const NatSet& a, const Settings& s) {
  if (a.backend() == Backend::finite) return Rational(0);
  if (auto p = a.get_if<PeriodicSet>()) return p->density();
  if (auto u = a.get_if<APUnionSet>()) return u->density(s);
  return std::nullopt;
}

// ------------------------------------------------------------- prefix values

Rational prefix_ratio_sup(const std::vector<std::uint64_t>& elems) {
  Rational best = 0;
  std::uint64_t c = 0;
  for (auto e : elems) {
    ++c;
    Rational r = make_rational(static_cast<std::int64_t>(c), static_cast<std::int64_t>(e));
    if (r > best) best = r;
  }
  return best;
}

ExtValue phi_prefix_at(const NatSet& a, const Natural& n, const Settings&) {
  auto top = prefix_bound(n);
  if (top <= 1) return ExtValue::exact(0);
  return ExtValue::exact(prefix_ratio_sup(elements_in(a, 1, top)));
}

ExtValue psi_at(const NatSet& a, const Natural& n, const Settings&) {
  Rational best = 0;
  for (std::uint64_t k = 0;; ++k) {
    Natural lo = two_to(k);
    if (lo >= n) break;
    Natural hi = std::min(Natural(2 * lo), n);
    Rational r = make_rational(a.count_range(lo, hi), lo);
    if (r > best) best = r;
  }
  return ExtValue::exact(best);
}

// sup over k of Σ_{i∈A∩[1,k]} i^α / Σ_{i=1}^k i^α, for the elements of A∩[1,n).
Rational power_ratio_sup(const std::vector<std::uint64_t>& elems, unsigned alpha) {
  if (elems.empty()) return 0;
  Natural total = 0, inside = 0, term;
  Rational best = 0;
  std::size_t idx = 0;
  for (std::uint64_t i = 1; idx < elems.size(); ++i) {
    mpz_ui_pow_ui(term.get_mpz_t(), i, alpha);
    total += term;
    if (elems[idx] == i) {
      inside += term;
      ++idx;
      Rational r = make_rational(inside, total);
      if (r > best) best = r;
    }
  }
  return best;
}

long double log_add(long double a, long double b) {
  if (a == -std::numeric_limits<long double>::infinity()) return b;
  if (b == -std::numeric_limits<long double>::infinity()) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

// The same supremum in long double, in the log domain so that large exponents do not overflow.
long double power_ratio_sup_ld(const std::vector<std::uint64_t>& elems, const std::vector<long double>& logs,
                               long double alpha) {
  const long double ninf = -std::numeric_limits<long double>::infinity();
  long double total = ninf, inside = ninf, best = 0;
  std::size_t idx = 0;
  for (std::uint64_t i = 1; idx < elems.size(); ++i) {
    long double t = alpha * logs[i];
    total = log_add(total, t);
    if (elems[idx] == i) {
      inside = log_add(inside, t);
      ++idx;
      best = std::max(best, std::exp(inside - total));
    }
  }
  return std::min(best, 1.0L);
}

std::vector<long double> log_table(std::uint64_t top) {
  std::vector<long double> logs(top + 1, 0);
  for (std::uint64_t i = 1; i <= top; ++i) logs[i] = std::log(static_cast<long double>(i));
  return logs;
}

Rational from_ld(long double v) { return Rational(static_cast<double>(v)); }

bool is_integer_alpha(const Rational& alpha) { return alpha.get_den() == 1 && alpha >= 0 && alpha <= 1u << 20; }

ExtValue phi_alpha_at(const NatSet& a, const Natural& n, const Rational& alpha) {
  auto top = prefix_bound(n);
  auto elems = top <= 1 ? std::vector<std::uint64_t>{} : elements_in(a, 1, top);
  if (is_integer_alpha(alpha)) return ExtValue::exact(power_ratio_sup(elems, alpha.get_num().get_ui()));
  if (elems.empty()) return ExtValue::exact(0);
  auto v = power_ratio_sup_ld(elems, log_table(elems.back()), static_cast<long double>(alpha.get_d()));
  return ExtValue::approx(from_ld(v), ExtValue::Direction::two_sided, two_pow(-30));
}

// ------------------------------------------------------------- closed forms

// ‖·‖ of φ_β-type sums on dyadic block sets for real exponents, normalized so nothing overflows.
long double dyadic_power_limsup_ld(const DyadicBlockSet& d, long double alpha) {
  const auto& rule = d.rule();
  if (rule.kind() == FillRule::Kind::reciprocal) return 0;
  const auto& cycle = rule.cycle();
  const std::size_t p = cycle.size();
  const long double beta = alpha + 1;
  const long double ln2 = std::log(2.0L);
  auto ln1p = [](const Rational& y) { return std::log1p(static_cast<long double>(y.get_d())); };
  long double best = 0;
  const long double geometric = 1 / (1 - std::exp(-beta * ln2 * static_cast<long double>(p)));
  for (std::size_t r = 0; r < p; ++r) {
    for (std::size_t k = 1; k < cycle[r].size(); k += 2) {
      long double top = ln1p(cycle[r][k]);
      long double sum = 0;
      for (std::size_t t = 1; t <= p; ++t) {
        const auto& s = cycle[(r + p - t % p) % p];
        for (std::size_t i = 0; i + 1 < s.size(); i += 2)
          sum += geometric * (std::exp(beta * (ln1p(s[i + 1]) - top - static_cast<long double>(t) * ln2)) -
                              std::exp(beta * (ln1p(s[i]) - top - static_cast<long double>(t) * ln2)));
      }
      for (std::size_t i = 0; i + 1 <= k; i += 2)
        sum += std::exp(beta * (ln1p(cycle[r][i + 1]) - top)) - std::exp(beta * (ln1p(cycle[r][i]) - top));
      best = std::max(best, sum);
    }
  }
  return std::min(best, 1.0L);
}

unsigned alpha0_for(const Rational& eps) {
  unsigned a0 = 0;
  while (two_pow(-static_cast<long>(a0)) > eps / 2) ++a0;
  return a0;
}

// sup_k |P∩[1,k]|/k for a periodic set: the ratio is monotone along each residue
// class beyond the threshold, so one period past it decides.
std::optional<Rational> phi_prefix_periodic(const PeriodicSet& p) {
  std::uint64_t top = p.threshold() + p.modulus() + 1;
  if (top > kPrefixLimit) return std::nullopt;
  return std::max(prefix_ratio_sup(elements_in(NatSet(p), 1, top)), p.density());
}

// sup over dyadic blocks of |P∩I_k|/|I_k|. Beyond the threshold a block's excess
// over d·2^k depends only on 2^k mod m, so the first occurrence of each residue wins.
Rational psi_periodic(const PeriodicSet& p) {
  const Rational d = p.density();
  const std::uint64_t m = p.modulus();
  Rational best = 0;
  std::uint64_t k = 0;
  for (; k < 64 && (std::uint64_t{1} << k) < p.threshold(); ++k) {
    Natural lo = two_to(k);
    best = std::max(best, make_rational(p.count_range(lo, 2 * lo), lo));
  }
  std::vector<std::uint64_t> pre(m + 1, 0);
  for (std::uint64_t r = 0; r < m; ++r) pre[r + 1] = pre[r] + (p.pattern_contains(r) ? 1 : 0);
  const auto size = static_cast<std::int64_t>(p.residues().size());
  std::vector<bool> seen(m, false);
  Natural power = two_to(k);
  std::uint64_t r = Natural(power % m).get_ui();
  for (;; ++k, power *= 2, r = (2 * r) % m) {
    if (seen[r]) break;
    seen[r] = true;
    std::uint64_t twice = 2 * r;
    Rational excess = make_rational((twice >= m ? size : 0) + static_cast<std::int64_t>(pre[twice % m]) -
                                        static_cast<std::int64_t>(pre[r]),
                                    1) -
                      make_rational(static_cast<std::int64_t>(r) * size, static_cast<std::int64_t>(m));
    if (excess > 0) best = std::max(best, Rational(d + excess / Rational(power)));
    if (best > d && Rational(make_rational(size, 1) / Rational(power)) <= best - d) break;
  }
  return std::max(best, d);
}

// Periodic form for the value scans, which are linear in the modulus.
std::optional<PeriodicSet> as_periodic(const NatSet& a, const Settings& s) {
  constexpr std::uint64_t limit = std::uint64_t{1} << 22;
  if (auto p = a.get_if<PeriodicSet>()) {
    if (p->modulus() > limit) return std::nullopt;
    return *p;
  }
  if (auto u = a.get_if<APUnionSet>()) {
    if (u->modulus_lcm() > nat(limit)) return std::nullopt;
    return normalize_periodic(*u, s);
  }
  return std::nullopt;
}

std::optional<ExtValue> finite_value(const LscsmDescriptor& phi, const NatSet& a, const Settings& s) {
  if (!is_finite(a)) return std::nullopt;
  auto top = max_element(a);
  return phi.prefix(a, top ? Natural(*top + 1) : Natural(0), s);
}

std::optional<ExtValue> infinite_if_unbounded(const NatSet& a) {
  if (a.backend() == Backend::horizon || is_finite(a)) return std::nullopt;
  return ExtValue::infinite();
}

// Certified refutation of a <= b.
bool refutes_le(const ExtValue& a, const ExtValue& b) {
  if (b.is_infinite()) return false;
  auto hi = b.upper();
  if (!hi) return false;
  if (a.is_infinite()) return true;
  auto lo = a.lower();
  return lo && *lo > *hi;
}

}  // namespace

// ---------------------------------------------------------------- descriptor

LscsmDescriptor::LscsmDescriptor(std::string name, Prefix prefix, Closed norm, Closed value, bool bounded)
    : name_(std::move(name)),
      prefix_(std::move(prefix)),
      norm_(std::move(norm)),
      value_(std::move(value)),
      bounded_(bounded) {}

ExtValue LscsmDescriptor::prefix(const NatSet& a, const Natural& n, const Settings& s) const {
  return prefix_(a, n, s);
}

std::optional<ExtValue> LscsmDescriptor::closed_norm(const NatSet& a, const Settings& s) const {
  if (is_finite(a)) return ExtValue::exact(0);
  if (!norm_) return std::nullopt;
  return norm_(a, s);
}

std::optional<ExtValue> LscsmDescriptor::closed_value(const NatSet& a, const Settings& s) const {
  if (auto v = finite_value(*this, a, s)) return v;
  if (!value_) return std::nullopt;
  return value_(a, s);
}

ExtValue LscsmDescriptor::tail(const NatSet& a, const Natural& n, const Settings& s) const {
  auto v = closed_value(drop_prefix(a, n), s);
  if (!v) fail(ErrorCode::no_exact_norm, name_ + " has no closed form on " + std::string(to_string(a.backend())) + " sets");
  return *v;
}

ExtValue lscsm_eval(const LscsmDescriptor& phi, const NatSet& a, const Natural& n, const Settings& s) {
  return phi.prefix(a, n, s);
}

NormEstimate exhaustive_norm(const LscsmDescriptor& phi, const NatSet& a, const Settings& s) {
  NormEstimate est;
  if (is_finite(a)) {
    auto top = max_element(a);
    est.value = ExtValue::exact(0);
    est.upper_profile.push_back({top ? Natural(*top + 1) : Natural(0), ExtValue::exact(0)});
    est.exact = true;
    return est;
  }
  if (auto v = phi.closed_norm(a, s)) {
    est.value = *v;
    est.exact = v->is_exact() || v->is_infinite();
    for (std::uint64_t k = 0; k <= 10; ++k) {
      try {
        est.upper_profile.push_back({nat(std::uint64_t{1} << k), phi.tail(a, nat(std::uint64_t{1} << k), s)});
      } catch (const Error&) {
        break;
      }
    }
    return est;
  }
  // Without a closed form: tails where they are computable, otherwise the observed
  // statistic φ((A∖n)∩N) on the known prefix.
  std::uint64_t top = s.norm_cut_horizon;
  if (auto h = a.get_if<HorizonSet>()) top = std::min(top, h->horizon());
  for (std::uint64_t n = 1; n <= top; n *= 2) {
    ExtValue v;
    try {
      v = phi.tail(a, nat(n), s);
    } catch (const Error&) {
      auto observed = phi.prefix(drop_prefix(truncate_to_horizon(a, top), nat(n)), nat(top), s);
      v = ExtValue::approx(observed.is_infinite() ? Rational(0) : observed.value(), ExtValue::Direction::upper_bound);
      if (observed.is_infinite()) v = observed;
    }
    est.upper_profile.push_back({nat(n), v});
  }
  const auto& last = est.upper_profile.back().value;
  est.value = last.is_infinite() ? last : ExtValue::approx(last.value(), ExtValue::Direction::upper_bound);
  est.exact = false;
  return est;
}

Membership exh_member(const LscsmDescriptor& phi, const NatSet& a, const Settings& s) {
  auto est = exhaustive_norm(phi, a, s);
  const auto& v = est.value;
  if (v.is_infinite()) return Membership::out;
  if (v.is_exact()) return v.value() == 0 ? Membership::in : Membership::out;
  if (v.direction() != ExtValue::Direction::upper_bound) {
    auto lo = v.lower();
    if (lo && *lo > 0) return Membership::out;
  }
  return Membership::unknown;
}

ExtValue phi_infty_eval(const NatSet& a, std::uint64_t n, const Rational& eps) {
  if (eps <= 0) fail(ErrorCode::invalid_argument, "phi_infty_eval needs eps > 0");
  if (n > kPrefixLimit) fail(ErrorCode::invalid_argument, "prefix length too large");
  auto elems = n <= 1 ? std::vector<std::uint64_t>{} : elements_in(a, 1, n);
  if (elems.empty()) return ExtValue::approx(0, ExtValue::Direction::two_sided, eps);
  const unsigned a0 = alpha0_for(eps);
  auto logs = log_table(elems.back());
  long double sum = 0;
  for (unsigned k = 0; k <= a0; ++k)
    sum += power_ratio_sup_ld(elems, logs, std::ldexp(1.0L, static_cast<int>(k))) / std::ldexp(1.0L, static_cast<int>(k));
  return ExtValue::approx(from_ld(sum), ExtValue::Direction::two_sided, eps);
}

AxiomReport check_lscsm_axioms(const LscsmDescriptor& phi, const std::vector<NatSet>& samples, const Settings& s) {
  AxiomReport report;
  report.subject = phi.name();
  const std::vector<std::uint64_t> cuts{16, 64, 256};
  const Natural top = nat(cuts.back());
  auto show = [](const ExtValue& v) { return v.to_string(); };

  auto empty = phi.prefix(NatSet::empty(), top, s);
  bool zero = !empty.is_infinite() && empty.lower() && *empty.lower() == 0 && empty.upper() && *empty.upper() == 0;
  report.add("phi(empty)=0", "empty", zero, zero ? "" : "phi(empty)=" + show(empty));

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto label = "sample[" + std::to_string(i) + "]";
    const auto& a = samples[i];
    std::vector<ExtValue> values;
    for (auto c : cuts) values.push_back(phi.prefix(a, nat(c), s));
    bool finite = std::none_of(values.begin(), values.end(), [](const ExtValue& v) { return v.is_infinite(); });
    report.add("finite-on-finite", label, finite, finite ? "" : "phi(A∩n) is infinite");
    bool mono = true;
    std::string detail;
    for (std::size_t j = 0; j + 1 < values.size(); ++j)
      if (refutes_le(values[j], values[j + 1])) {
        mono = false;
        detail = "phi(A∩" + std::to_string(cuts[j]) + ")=" + show(values[j]) + " > phi(A∩" +
                 std::to_string(cuts[j + 1]) + ")=" + show(values[j + 1]);
      }
    report.add("prefix-monotone", label, mono, detail);

    if (samples.size() < 2) continue;
    const auto& b = samples[(i + 1) % samples.size()];
    const auto pair = label + ",sample[" + std::to_string((i + 1) % samples.size()) + "]";
    auto va = values.back();
    auto vb = phi.prefix(b, top, s);
    auto vi = phi.prefix(set_intersection(a, b, s), top, s);
    auto vu = phi.prefix(set_union(a, b, s), top, s);
    bool monotone = !refutes_le(vi, va) && !refutes_le(va, vu);
    report.add("monotone", pair, monotone,
               monotone ? "" : "phi(A∩B)=" + show(vi) + ", phi(A)=" + show(va) + ", phi(A∪B)=" + show(vu));
    bool sub = !refutes_le(vu, va + vb);
    report.add("subadditive", pair, sub, sub ? "" : "phi(A∪B)=" + show(vu) + " > " + show(va + vb));
  }
  return report;
}

// ---------------------------------------------------------------- catalog

LscsmDescriptor phi_prefix() {
  return LscsmDescriptor(
      "phi-prefix", phi_prefix_at,
      [](const NatSet& a, const Settings& s) -> std::optional<ExtValue> {
        if (auto d = a.get_if<DyadicBlockSet>()) return ExtValue::exact(dyadic_upper_density(*d));
        if (auto v = pure_density(a, s)) return ExtValue::exact(*v);
        return std::nullopt;
      },
      [](const NatSet& a, const Settings& s) -> std::optional<ExtValue> {
        auto p = as_periodic(a, s);
        if (!p) return std::nullopt;
        auto v = phi_prefix_periodic(*p);
        if (!v) return std::nullopt;
        return ExtValue::exact(*v);
      });
}

LscsmDescriptor psi_dyadic() {
  return LscsmDescriptor(
      "psi-dyadic", psi_at,
      [](const NatSet& a, const Settings& s) -> std::optional<ExtValue> {
        if (auto d = a.get_if<DyadicBlockSet>()) return ExtValue::exact(dyadic_block_limsup(*d));
        if (auto v = pure_density(a, s)) return ExtValue::exact(*v);
        return std::nullopt;
      },
      [](const NatSet& a, const Settings& s) -> std::optional<ExtValue> {
        auto p = as_periodic(a, s);
        if (!p) return std::nullopt;
        return ExtValue::exact(psi_periodic(*p));
      });
}

LscsmDescriptor phi_alpha(const Rational& alpha) {
  if (alpha <= -1) fail(ErrorCode::invalid_argument, "phi-alpha needs alpha > -1");
  return LscsmDescriptor(
      "phi-alpha:a=" + to_string(alpha),
      [alpha](const NatSet& a, const Natural& n, const Settings&) { return phi_alpha_at(a, n, alpha); },
      [alpha](const NatSet& a, const Settings& s) -> std::optional<ExtValue> {
        if (auto d = a.get_if<DyadicBlockSet>()) {
          if (is_integer_alpha(alpha)) return ExtValue::exact(dyadic_power_limsup(*d, alpha.get_num().get_ui()));
          return ExtValue::approx(from_ld(dyadic_power_limsup_ld(*d, static_cast<long double>(alpha.get_d()))),
                                  ExtValue::Direction::two_sided, two_pow(-30));
        }
        if (auto v = pure_density(a, s)) return ExtValue::exact(*v);
        return std::nullopt;
      });
}

LscsmDescriptor phi_infty(const Rational& eps) {
  if (eps <= 0) fail(ErrorCode::invalid_argument, "phi-infty needs eps > 0");
  return LscsmDescriptor(
      "phi-infty:eps=" + to_string(eps),
      [eps](const NatSet& a, const Natural& n, const Settings&) { return phi_infty_eval(a, prefix_bound(n), eps); },
      [eps](const NatSet& a, const Settings& s) -> std::optional<ExtValue> {
        if (auto d = a.get_if<DyadicBlockSet>()) {
          const unsigned a0 = alpha0_for(eps);
          long double sum = 0;
          for (unsigned k = 0; k <= a0; ++k)
            sum += dyadic_power_limsup_ld(*d, std::ldexp(1.0L, static_cast<int>(k))) /
                   std::ldexp(1.0L, static_cast<int>(k));
          return ExtValue::approx(from_ld(sum), ExtValue::Direction::two_sided, eps);
        }
        if (auto v = pure_density(a, s)) return ExtValue::exact(2 * *v);
        return std::nullopt;
      },
      nullptr, true);
}

LscsmDescriptor phi_infty_truncated(unsigned a0) {
  if (a0 > 20) fail(ErrorCode::invalid_argument, "phi-infty-trunc supports a0 <= 20");
  return LscsmDescriptor(
      "phi-infty-trunc:a0=" + std::to_string(a0),
      [a0](const NatSet& a, const Natural& n, const Settings&) {
        auto top = prefix_bound(n);
        auto elems = top <= 1 ? std::vector<std::uint64_t>{} : elements_in(a, 1, top);
        Rational sum = 0;
        for (unsigned k = 0; k <= a0; ++k) sum += power_ratio_sup(elems, 1u << k) * two_pow(-static_cast<long>(k));
        return ExtValue::exact(sum);
      },
      [a0](const NatSet& a, const Settings& s) -> std::optional<ExtValue> {
        if (auto d = a.get_if<DyadicBlockSet>()) {
          Rational sum = 0;
          for (unsigned k = 0; k <= a0; ++k) sum += dyadic_power_limsup(*d, 1u << k) * two_pow(-static_cast<long>(k));
          return ExtValue::exact(sum);
        }
        if (auto v = pure_density(a, s)) return ExtValue::exact(*v * (2 - two_pow(-static_cast<long>(a0))));
        return std::nullopt;
      });
}

LscsmDescriptor counting_lscsm() {
  return LscsmDescriptor(
      "counting",
      [](const NatSet& a, const Natural& n, const Settings&) { return ExtValue::exact(Rational(a.count_range(0, n))); },
      [](const NatSet& a, const Settings&) { return infinite_if_unbounded(a); },
      [](const NatSet& a, const Settings&) { return infinite_if_unbounded(a); }, false);
}

LscsmDescriptor harmonic_lscsm() {
  return LscsmDescriptor(
      "harmonic",
      [](const NatSet& a, const Natural& n, const Settings&) {
        Rational sum = 0;
        for (auto e : elements_in(a, 0, prefix_bound(n))) sum += make_rational(1, static_cast<std::int64_t>(e + 1));
        return ExtValue::exact(sum);
      },
      [](const NatSet& a, const Settings&) { return infinite_if_unbounded(a); },
      [](const NatSet& a, const Settings&) { return infinite_if_unbounded(a); }, false);
}

LscsmDescriptor geometric_lscsm() {
  return LscsmDescriptor(
      "geometric",
      [](const NatSet& a, const Natural& n, const Settings&) {
        auto top = prefix_bound(n);
        Natural num = 0;
        for (auto e : elements_in(a, 0, top)) mpz_setbit(num.get_mpz_t(), top - 1 - e);
        return ExtValue::exact(make_rational(num, two_to(top)));
      },
      [](const NatSet& a, const Settings&) -> std::optional<ExtValue> {
        if (a.backend() == Backend::horizon) return std::nullopt;
        return ExtValue::exact(0);
      },
      [](const NatSet& a, const Settings& s) -> std::optional<ExtValue> { return geometric_measure(a, s); });
}

LscsmDescriptor weighted_lscsm(const std::string& expression) {
  WeightFunction f(expression);
  return LscsmDescriptor(
      "weighted:f=" + expression,
      [f](const NatSet& a, const Natural& n, const Settings&) -> ExtValue {
        auto top = prefix_bound(n);
        auto elems = elements_in(a, 0, top);
        if (elems.empty()) return ExtValue::exact(0);
        bool exact = true;
        Rational total = 0, inside = 0, best = 0;
        std::size_t idx = 0;
        for (std::uint64_t i = 0; idx < elems.size() && exact; ++i) {
          auto w = f.exact(i);
          if (!w || *w < 0) {
            exact = false;
            break;
          }
          total += *w;
          if (elems[idx] == i) {
            inside += *w;
            ++idx;
            if (total > 0) best = std::max(best, Rational(inside / total));
          }
        }
        if (exact) return ExtValue::exact(best);
        long double ltotal = 0, linside = 0, lbest = 0;
        idx = 0;
        for (std::uint64_t i = 0; idx < elems.size(); ++i) {
          long double w = f.value(i);
          ltotal += w;
          if (elems[idx] == i) {
            linside += w;
            ++idx;
            if (ltotal > 0) lbest = std::max(lbest, linside / ltotal);
          }
        }
        return ExtValue::approx(from_ld(std::min(lbest, 1.0L)), ExtValue::Direction::two_sided, two_pow(-30));
      },
      [f](const NatSet& a, const Settings& s) -> std::optional<ExtValue> {
        if (f.is_constant() && a.backend() != Backend::horizon) return upper_asymptotic(a, s).value;
        return std::nullopt;
      });
}

LscsmDescriptor lscsm_by_name(const std::string& name) {
  auto param = [&](const std::string& prefix) -> std::optional<std::string> {
    if (name.rfind(prefix, 0) == 0) return name.substr(prefix.size());
    return std::nullopt;
  };
  if (name == "phi-prefix") return phi_prefix();
  if (name == "psi-dyadic" || name == "psi") return psi_dyadic();
  if (name == "counting") return counting_lscsm();
  if (name == "harmonic") return harmonic_lscsm();
  if (name == "geometric") return geometric_lscsm();
  if (auto p = param("phi-alpha:a=")) return phi_alpha(parse_rational(*p));
  if (auto p = param("phi-infty-trunc:a0=")) return phi_infty_truncated(static_cast<unsigned>(to_u64(parse_natural(*p))));
  if (auto p = param("phi-infty:eps=")) return phi_infty(parse_rational(*p));
  if (auto p = param("weighted:f=")) return weighted_lscsm(*p);
  fail(ErrorCode::invalid_argument, "unknown lscsm '" + name + "'");
}

Rational block_family_power_norm(unsigned n, unsigned alpha) {
  const unsigned beta = alpha + 1;
  Natural base = two_to(n);
  Rational shrink = pow(make_rational(base, base + 1), beta);
  Rational out = (1 - shrink) / (1 - two_pow(-static_cast<long>(beta)));
  out.canonicalize();
  return out;
}

}  // namespace densitas
