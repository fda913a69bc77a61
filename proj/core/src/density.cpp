#include "densitas/density.hpp"

#include "densitas/errors.hpp"

#include <algorithm>

namespace densitas {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

Rational ratio(std::uint64_t num, std::uint64_t den) {
  Rational q(nat(num), nat(den));
  q.canonicalize();
  return q;
}

// The profile scales: powers of two up to `top`, then `top` itself.
std::vector<std::uint64_t> scales(std::uint64_t top) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t n = 1; n < top; n *= 2) out.push_back(n);
  if (top) out.push_back(top);
  return out;
}

DensityEstimate horizon_asymptotic(const HorizonSet& h, const Settings& s) {
  std::uint64_t top = std::min(h.horizon(), s.prefix_horizon);
  DensityEstimate est{ExtValue::approx(0, ExtValue::Direction::lower_bound), false, {}};
  if (top == 0) return est;
  // statistic at scale n: max over k in (n/2, n] of |A∩k|/k
  Rational best_tail = 0;
  for (auto n : scales(top)) {
    Rational best = 0;
    for (std::uint64_t k = n / 2 + 1; k <= n; ++k) {
      if (k < n && !h.bits()[k - 1]) continue;  // ratio peaks right after an element
      best = std::max(best, ratio(h.count_u64(0, k), k));
    }
    est.profile.push_back({nat(n), best});
    if (n * 16 >= top) best_tail = std::max(best_tail, best);
  }
  est.value = ExtValue::approx(best_tail, ExtValue::Direction::lower_bound);
  return est;
}

DensityEstimate horizon_banach(const HorizonSet& h, const Settings& s) {
  std::uint64_t H = h.horizon();
  std::uint64_t top = std::min(H, s.window_horizon);
  DensityEstimate est{ExtValue::approx(0, ExtValue::Direction::lower_bound), false, {}};
  Rational last = 0;
  for (std::uint64_t n = 1; n <= top; n *= 2) {
    std::uint64_t best = 0;
    for (std::uint64_t k = 0; k + n <= H; ++k) best = std::max(best, h.count_u64(k, k + n));
    last = ratio(best, n);
    est.profile.push_back({nat(n), last});
  }
  est.value = ExtValue::approx(last, ExtValue::Direction::lower_bound);
  return est;
}

Rational pow_int(const Rational& base, unsigned e) { return pow(base, e); }

}  // namespace

std::string_view to_string(Membership m) {
  switch (m) {
    case Membership::in: return "In";
    case Membership::out: return "Out";
    case Membership::unknown: return "Unknown";
  }
  return "?";
}

SubmeasureDescriptor::SubmeasureDescriptor(std::string name, Evaluator evaluator, std::set<Backend> exact_backends,
                                           bool upper_density, bool sigma_subadditive)
    : name_(std::move(name)),
      evaluator_(std::move(evaluator)),
      exact_backends_(std::move(exact_backends)),
      upper_density_(upper_density),
      sigma_subadditive_(sigma_subadditive) {}

// ---------------------------------------------------------------- dyadic closed forms

Rational dyadic_power_limsup(const DyadicBlockSet& d, unsigned alpha) {
  const auto& rule = d.rule();
  if (rule.kind() == FillRule::Kind::reciprocal) return 0;
  const auto& cycle = rule.cycle();
  const std::size_t p = cycle.size();
  const unsigned beta = alpha + 1;
  const Rational rho = two_pow(-static_cast<long>(beta));
  auto lift = [&](const Rational& y) { return pow_int(Rational(1 + y), beta); };
  std::vector<Rational> volume(p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t i = 0; i + 1 < cycle[j].size(); i += 2) volume[j] += lift(cycle[j][i + 1]) - lift(cycle[j][i]);
  const Rational geometric = 1 / (1 - pow_int(rho, static_cast<unsigned>(p)));
  Rational best = 0;
  for (std::size_t r = 0; r < p; ++r) {
    Rational history = 0;
    Rational weight = 1;
    for (std::size_t t = 1; t <= p; ++t) {
      weight *= rho;
      history += weight * volume[(r + p - t % p) % p];
    }
    history *= geometric;
    Rational inside = 0;
    for (std::size_t i = 0; i + 1 < cycle[r].size(); i += 2) {
      inside += lift(cycle[r][i + 1]) - lift(cycle[r][i]);
      best = std::max(best, Rational((history + inside) / lift(cycle[r][i + 1])));
    }
  }
  best.canonicalize();
  return best;
}

Rational dyadic_upper_density(const DyadicBlockSet& d) { return dyadic_power_limsup(d, 0); }

Rational dyadic_block_limsup(const DyadicBlockSet& d) {
  if (d.rule().kind() == FillRule::Kind::reciprocal) return 0;
  Rational best = 0;
  for (const auto& s : d.rule().cycle()) best = std::max(best, slice_width(s));
  return best;
}

// ---------------------------------------------------------------- densities

DensityEstimate upper_asymptotic(const NatSet& a, const Settings& s) {
  return std::visit(
      [&](const auto& x) -> DensityEstimate {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FiniteSet>) return DensityEstimate::of(ExtValue::exact(0));
        else if constexpr (std::is_same_v<T, HorizonSet>) return horizon_asymptotic(x, s);
        else if constexpr (std::is_same_v<T, PeriodicSet>) return DensityEstimate::of(ExtValue::exact(x.density()));
        else if constexpr (std::is_same_v<T, APUnionSet>) return DensityEstimate::of(ExtValue::exact(x.density(s)));
        else return DensityEstimate::of(ExtValue::exact(dyadic_upper_density(x)));
      },
      a.variant());
}

DensityEstimate upper_banach(const NatSet& a, const Settings& s) {
  return std::visit(
      [&](const auto& x) -> DensityEstimate {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, FiniteSet>) {
          return DensityEstimate::of(ExtValue::exact(0));
        } else if constexpr (std::is_same_v<T, HorizonSet>) {
          return horizon_banach(x, s);
        } else if constexpr (std::is_same_v<T, PeriodicSet>) {
          return DensityEstimate::of(ExtValue::exact(x.density()));
        } else if constexpr (std::is_same_v<T, APUnionSet>) {
          return DensityEstimate::of(ExtValue::exact(x.density(s)));
        } else {
          // arbitrarily long runs inside blocks unless the blocks eventually vanish
          return DensityEstimate::of(ExtValue::exact(x.rule().eventually_empty() ? 0 : 1));
        }
      },
      a.variant());
}

ExtValue upper_buck(const NatSet& a, const Settings& s) {
  // |F| progressions of modulus M cover F, with density |F|/M -> 0
  if (a.backend() == Backend::finite) return ExtValue::exact(0);
  if (auto p = a.get_if<PeriodicSet>()) return ExtValue::exact(p->density());
  if (auto u = a.get_if<APUnionSet>()) return ExtValue::exact(u->density(s));
  fail(ErrorCode::unsupported_backend,
       "upper Buck density needs global periodic structure; backend " + std::string(to_string(a.backend())) +
           " is not supported");
}

DensityEstimate weighted_upper(const NatSet& a, const WeightFunction& f, const Settings& s) {
  auto check = check_erdos_ulam(f, s.weighted_horizon);
  if (!check.valid) fail(ErrorCode::not_erdos_ulam, "f=" + f.expression() + ": " + check.reason);
  if (f.is_constant()) return upper_asymptotic(a, s);
  if (a.backend() == Backend::finite) return DensityEstimate::of(ExtValue::exact(0));

  std::uint64_t top = s.weighted_horizon;
  if (auto h = a.get_if<HorizonSet>()) top = std::min(top, h->horizon());
  std::vector<bool> in(top, false);
  for (auto x : elements_in(a, 0, top)) in[x] = true;
  DensityEstimate est{ExtValue::approx(0, ExtValue::Direction::lower_bound), false, {}};
  auto marks = scales(top);
  std::size_t next = 0;
  long double total = 0, inside = 0;
  Rational last = 0;
  for (std::uint64_t i = 0; i < top && next < marks.size(); ++i) {
    long double w = f.value(i);
    total += w;
    if (in[i]) inside += w;
    if (i + 1 == marks[next]) {
      last = total > 0 ? Rational(static_cast<double>(inside / total)) : Rational(0);
      est.profile.push_back({nat(marks[next]), last});
      ++next;
    }
  }
  est.value = ExtValue::approx(last, ExtValue::Direction::lower_bound);
  return est;
}

ExtValue counting_measure(const NatSet& a) {
  if (auto h = a.get_if<HorizonSet>())
    return ExtValue::approx(Rational(nat(h->count_u64(0, h->horizon()))), ExtValue::Direction::lower_bound);
  if (!is_finite(a)) return ExtValue::infinite();
  auto m = max_element(a);
  if (!m) return ExtValue::exact(0);
  return ExtValue::exact(Rational(a.count_range(0, *m + 1)));
}

namespace {

constexpr std::uint64_t kExactModulus = 1u << 16;
constexpr std::uint64_t kExactElement = 1u << 20;

Rational geometric_point(const Natural& x) { return two_pow(-static_cast<long>(to_u64(x)) - 1); }

struct GeoSum {
  Rational value = 0;
  Rational gap = 0;  // nonzero => only within ±gap
  void add_point(const Natural& x, int sign) {
    if (x <= nat(kExactElement)) value += sign * geometric_point(x);
    else gap += two_pow(-1024);
  }
};

ExtValue finish(GeoSum g) {
  g.value.canonicalize();
  if (g.gap == 0) return ExtValue::exact(g.value);
  return ExtValue::approx(g.value, ExtValue::Direction::two_sided, g.gap);
}

GeoSum periodic_geometric(const PeriodicSet& p) {
  GeoSum g;
  if (p.modulus() > kExactModulus) fail(ErrorCode::modulus_budget_exceeded, "modulus too large for exact geometric sum");
  Rational period = 1 / (1 - two_pow(-static_cast<long>(p.modulus())));
  for (auto r : p.residues()) g.value += geometric_point(nat(r)) * period;
  for (auto x : p.additions()) g.add_point(nat(x), +1);
  for (auto x : p.removals()) g.add_point(nat(x), -1);
  return g;
}

}  // namespace

ExtValue geometric_measure(const NatSet& a, const Settings& s) {
  return std::visit(
      [&](const auto& x) -> ExtValue {
        using T = std::decay_t<decltype(x)>;
        GeoSum g;
        if constexpr (std::is_same_v<T, FiniteSet>) {
          for (const auto& e : x.elements()) g.add_point(e, +1);
        } else if constexpr (std::is_same_v<T, HorizonSet>) {
          for (std::uint64_t i = 0; i < x.horizon(); ++i)
            if (x.bits()[i]) g.value += geometric_point(nat(i));
          Rational tail = two_pow(-static_cast<long>(x.horizon()) - 1);
          g.value += tail;
          g.gap = tail;
        } else if constexpr (std::is_same_v<T, PeriodicSet>) {
          g = periodic_geometric(x);
        } else if constexpr (std::is_same_v<T, APUnionSet>) {
          if (!x.terms_pairwise_disjoint()) return finish(periodic_geometric(normalize_periodic(x, s)));
          for (const auto& t : x.terms()) {
            Natural first = t.first();
            if (first > nat(kExactElement)) {
              g.gap += two_pow(-1024);
            } else if (t.modulus.value <= nat(kExactModulus)) {
              g.value += geometric_point(first) / (1 - two_pow(-static_cast<long>(to_u64(t.modulus.value))));
            } else {
              // 2^{-first-1}/(1-2^{-a}) lies within 2^{-first-1}*2^{-64} of 2^{-first-1}
              Rational head = geometric_point(first);
              g.value += head;
              g.gap += head * two_pow(-64);
            }
          }
          for (const auto& e : x.extras().elements()) g.add_point(e, +1);
          for (const auto& e : x.removals().elements()) g.add_point(e, -1);
        } else {
          for (std::uint64_t n = 0; n <= 16; ++n)
            for (auto& [lo, hi] : x.block_intervals(n))
              g.value += two_pow(-static_cast<long>(to_u64(lo))) - two_pow(-static_cast<long>(to_u64(hi)));
          if (!x.rule().eventually_empty() || x.rule().prefix().size() > 17) g.gap += two_pow(-1024);
          for (const auto& e : x.additions().elements()) g.add_point(e, +1);
          for (const auto& e : x.removals().elements()) g.add_point(e, -1);
        }
        return finish(g);
      },
      a.variant());
}

// ---------------------------------------------------------------- duals and domains

ExtValue lower_dual(const SubmeasureDescriptor& nu, const NatSet& a, const Settings& s) {
  if (!nu.is_upper_density())
    fail(ErrorCode::invalid_argument, "lower dual needs a normalized upper density; " + nu.name() + " is not one");
  return one_minus(clamp_to_one(nu(complement(a, s), s)));
}

Membership classify_domain(const ExtValue& upper, const ExtValue& lower) {
  if (upper.is_exact() && lower.is_exact()) return upper.value() == lower.value() ? Membership::in : Membership::out;
  auto ul = upper.lower();
  auto lu = lower.upper();
  if (ul && lu && *ul > *lu) return Membership::out;
  auto ll = lower.lower();
  auto uu = upper.upper();
  if (ll && uu && *ll > *uu) return Membership::out;
  return Membership::unknown;
}

Membership dom_membership(const SubmeasureDescriptor& nu, const NatSet& a, const Settings& s) {
  if (a.backend() == Backend::horizon) return Membership::unknown;  // a truncation carries no tail information
  ExtValue upper = nu(a, s);
  ExtValue lower = lower_dual(nu, a, s);
  return classify_domain(upper, lower);
}

// ---------------------------------------------------------------- batteries

namespace {

ExtValue exact_eval(const SubmeasureDescriptor& nu, const NatSet& a, const Settings& s, const std::string& label) {
  if (!nu.exact_on(a.backend()))
    fail(ErrorCode::sample_not_exact, label + " has backend " + std::string(to_string(a.backend())) + ", where " +
                                          nu.name() + " is not exact");
  ExtValue v = nu(a, s);
  if (v.is_approx()) fail(ErrorCode::sample_not_exact, nu.name() + " returned an approximation on " + label);
  return v;
}

std::string sample_label(std::size_t i) { return "sample[" + std::to_string(i) + "]"; }

std::string show(const ExtValue& v) { return v.to_string(); }

void check_pairs(AxiomReport& report, const SubmeasureDescriptor& nu, const std::vector<NatSet>& samples,
                 const std::vector<ExtValue>& values, const Settings& s, const char* monotone_name,
                 const char* subadditive_name) {
  const std::size_t n = samples.size();
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t j = (i + 1) % n;
    std::string label = sample_label(i) + "," + sample_label(j);
    NatSet meet = set_intersection(samples[i], samples[j], s);
    NatSet join = set_union(samples[i], samples[j], s);
    ExtValue vm = exact_eval(nu, meet, s, label + " intersection");
    ExtValue vj = exact_eval(nu, join, s, label + " union");
    bool mono = exact_le(vm, values[i]) && exact_le(values[i], vj);
    report.add(monotone_name, label, mono,
               mono ? std::string() : "nu(A∩B)=" + show(vm) + ", nu(A)=" + show(values[i]) + ", nu(A∪B)=" + show(vj));
    ExtValue bound = values[i] + values[j];
    bool sub = exact_le(vj, bound);
    report.add(subadditive_name, label, sub, sub ? std::string() : "nu(A∪B)=" + show(vj) + " > " + show(bound));
  }
}

}  // namespace

AxiomReport check_submeasure_axioms(const SubmeasureDescriptor& nu, const std::vector<NatSet>& samples,
                                    const Settings& s) {
  AxiomReport report;
  report.subject = nu.name();
  ExtValue e = exact_eval(nu, NatSet::empty(), s, "empty set");
  report.add("empty", "empty", e.is_exact() && e.value() == 0, e.is_exact() && e.value() == 0 ? "" : "nu(∅)=" + show(e));
  std::vector<ExtValue> values;
  for (std::size_t i = 0; i < samples.size(); ++i) values.push_back(exact_eval(nu, samples[i], s, sample_label(i)));
  check_pairs(report, nu, samples, values, s, "monotone", "subadditive");
  return report;
}

AxiomReport check_upper_density_axioms(const SubmeasureDescriptor& nu, const std::vector<NatSet>& samples,
                                       const std::vector<std::uint64_t>& dilations,
                                       const std::vector<std::uint64_t>& shifts, const Settings& s) {
  AxiomReport report;
  report.subject = nu.name();
  ExtValue w = exact_eval(nu, NatSet::omega(), s, "omega");
  bool f1 = w.is_exact() && w.value() == 1;
  report.add("f1", "omega", f1, f1 ? "" : "nu(omega)=" + show(w));
  std::vector<ExtValue> values;
  for (std::size_t i = 0; i < samples.size(); ++i) values.push_back(exact_eval(nu, samples[i], s, sample_label(i)));
  check_pairs(report, nu, samples, values, s, "f2", "f3");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (auto k : dilations) {
      std::string label = sample_label(i) + ",k=" + std::to_string(k);
      ExtValue v = exact_eval(nu, dilate(samples[i], nat(k)), s, label);
      ExtValue expect = scale(values[i], Rational(1, nat(k)));
      bool ok = exact_le(v, expect) && exact_le(expect, v);
      report.add("f4", label, ok, ok ? "" : "nu(kA)=" + show(v) + ", nu(A)/k=" + show(expect));
    }
    for (auto h : shifts) {
      std::string label = sample_label(i) + ",h=" + std::to_string(h);
      ExtValue v = exact_eval(nu, shift(samples[i], nat(h)), s, label);
      bool ok = exact_le(v, values[i]) && exact_le(values[i], v);
      report.add("f5", label, ok, ok ? "" : "nu(A+h)=" + show(v) + ", nu(A)=" + show(values[i]));
    }
  }
  return report;
}

// ---------------------------------------------------------------- descriptors

namespace {

const std::set<Backend> kStructured{Backend::finite, Backend::periodic, Backend::ap_union, Backend::dyadic_block};

}  // namespace

SubmeasureDescriptor d_star() {
  return SubmeasureDescriptor(
      "d-star", [](const NatSet& a, const Settings& s) { return upper_asymptotic(a, s); }, kStructured, true, false);
}

SubmeasureDescriptor bd_star() {
  return SubmeasureDescriptor(
      "bd-star", [](const NatSet& a, const Settings& s) { return upper_banach(a, s); }, kStructured, true, false);
}

SubmeasureDescriptor buck() {
  return SubmeasureDescriptor(
      "buck", [](const NatSet& a, const Settings& s) { return DensityEstimate::of(upper_buck(a, s)); },
      {Backend::finite, Backend::periodic, Backend::ap_union}, true, false);
}

SubmeasureDescriptor weighted(const std::string& expression) {
  WeightFunction f(expression);
  std::set<Backend> exact;
  if (f.is_constant()) exact = kStructured;
  else exact = {Backend::finite};
  return SubmeasureDescriptor(
      "weighted:f=" + expression, [f](const NatSet& a, const Settings& s) { return weighted_upper(a, f, s); },
      exact, true, false);
}

SubmeasureDescriptor counting() {
  return SubmeasureDescriptor(
      "counting", [](const NatSet& a, const Settings&) { return DensityEstimate::of(counting_measure(a)); },
      kStructured, false, true);
}

SubmeasureDescriptor geometric() {
  return SubmeasureDescriptor(
      "geometric", [](const NatSet& a, const Settings& s) { return DensityEstimate::of(geometric_measure(a, s)); },
      {Backend::finite, Backend::periodic}, false, true);
}

}  // namespace densitas
