#include "densitas/metric.hpp"

#include "densitas/errors.hpp"

#include <algorithm>

namespace densitas {

namespace {

[[noreturn]] void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

ExtValue exact_or_throw(const ExtValue& v, const std::string& what) {
  if (!v.is_exact() && !v.is_infinite())
    fail(ErrorCode::sample_not_exact, what + " is not exact (" + v.to_string() + ")");
  return v;
}

std::string label(std::size_t i) { return "triple[" + std::to_string(i) + "]"; }

}  // namespace

NatSet SetSequence::at(std::uint64_t n) const {
  if (n < prefix.size()) return prefix[n];
  if (rule) return rule(n);
  fail(ErrorCode::insufficient_prefix,
       "term " + std::to_string(n) + " requested but only " + std::to_string(prefix.size()) + " are known");
}

SetSequence SetSequence::constant(const NatSet& a) {
  SetSequence seq;
  seq.rule = [a](std::uint64_t) { return a; };
  seq.monotone = true;
  seq.tail_bound = [](std::uint64_t) { return Rational(0); };
  seq.tail_note = "constant";
  seq.limit = a;
  return seq;
}

SetSequence SetSequence::of(std::vector<NatSet> terms, bool monotone) {
  SetSequence seq;
  seq.prefix = std::move(terms);
  seq.monotone = monotone;
  return seq;
}

SetSequence SetSequence::finite_modifications(std::function<NatSet(std::uint64_t)> rule) {
  SetSequence seq;
  seq.rule = std::move(rule);
  seq.tail_bound = [](std::uint64_t) { return Rational(0); };
  seq.tail_note = "finite-differences";
  return seq;
}

SetSequence SetSequence::summable_increments(std::vector<NatSet> prefix, std::function<Rational(std::uint64_t)> tail,
                                             std::string note) {
  SetSequence seq;
  seq.prefix = std::move(prefix);
  seq.monotone = true;
  seq.tail_bound = std::move(tail);
  seq.tail_note = std::move(note);
  return seq;
}

void validate_sequence(const SetSequence& seq, const Settings& s, std::uint64_t window) {
  if (seq.monotone)
    for (std::size_t i = 0; i + 1 < seq.prefix.size(); ++i) {
      auto extra = set_difference(seq.prefix[i], seq.prefix[i + 1], s);
      bool empty = is_finite(extra) && !max_element(extra);
      if (!empty) fail(ErrorCode::not_monotone, "A_" + std::to_string(i) + " is not a subset of A_" + std::to_string(i + 1));
    }
  if (seq.rule)
    for (std::size_t i = 0; i < seq.prefix.size(); ++i)
      if (!pointwise_equal(seq.prefix[i], seq.rule(i), 0, window))
        fail(ErrorCode::invalid_argument, "prefix and rule disagree at term " + std::to_string(i));
}

ExtValue dist(const SubmeasureDescriptor& nu, const NatSet& a, const NatSet& b, const Settings& s) {
  return clamp_to_one(nu(set_symdiff(a, b, s), s));
}

AxiomReport check_pseudometric(const SubmeasureDescriptor& nu, const std::vector<std::array<NatSet, 3>>& triples,
                               const Settings& s) {
  AxiomReport report;
  report.subject = "d_" + nu.name();
  for (std::size_t i = 0; i < triples.size(); ++i) {
    const auto& [a, b, c] = triples[i];
    auto d = [&](const NatSet& x, const NatSet& y, const char* what) {
      return exact_or_throw(dist(nu, x, y, s), label(i) + " " + what);
    };
    auto aa = d(a, a, "d(A,A)");
    report.add("d(A,A)=0", label(i), aa.is_exact() && aa.value() == 0, aa.to_string());
    auto ab = d(a, b, "d(A,B)");
    auto ba = d(b, a, "d(B,A)");
    report.add("symmetry", label(i), ab == ba, ab.to_string() + " vs " + ba.to_string());
    auto ac = d(a, c, "d(A,C)");
    auto bc = d(b, c, "d(B,C)");
    bool tri = exact_le(ac, ab + bc);
    report.add("triangle", label(i), tri,
               tri ? "" : "d(A,C)=" + ac.to_string() + " > d(A,B)+d(B,C)=" + (ab + bc).to_string());
  }
  return report;
}

CauchyReport cauchy_profile(const SubmeasureDescriptor& nu, const SetSequence& seq, std::uint64_t depth,
                            const Settings& s, unsigned max_k) {
  if (depth > seq.prefix.size() && !seq.rule)
    fail(ErrorCode::insufficient_prefix, "depth " + std::to_string(depth) + " exceeds the prefix length " +
                                             std::to_string(seq.prefix.size()) + " and no rule is given");
  CauchyReport report;
  report.measure = nu.name();
  std::vector<NatSet> terms;
  for (std::uint64_t i = 0; i < depth; ++i) terms.push_back(seq.at(i));
  report.table.assign(depth, std::vector<ExtValue>(depth, ExtValue::exact(0)));
  bool all_exact = true;
  for (std::uint64_t i = 0; i < depth; ++i)
    for (std::uint64_t j = i + 1; j < depth; ++j) {
      auto v = dist(nu, terms[i], terms[j], s);
      all_exact = all_exact && v.is_exact();
      report.table[i][j] = report.table[j][i] = v;
    }

  // observed: the largest distance among indices >= j
  std::vector<ExtValue> worst(depth + 1, ExtValue::exact(0));
  std::vector<bool> worst_known(depth + 1, true);
  for (std::uint64_t j = depth; j-- > 0;) {
    worst[j] = worst[j + 1];
    worst_known[j] = worst_known[j + 1];
    for (std::uint64_t i = j + 1; i < depth; ++i) {
      const auto& v = report.table[j][i];
      if (!v.is_exact()) worst_known[j] = false;
      else if (v.value() > worst[j].value()) worst[j] = v;
    }
  }

  bool bound_ok = static_cast<bool>(seq.tail_bound);
  if (bound_ok)
    for (std::uint64_t i = 0; i < depth && bound_ok; ++i)
      for (std::uint64_t j = i + 1; j < depth; ++j)
        if (!report.table[i][j].is_exact() || report.table[i][j].value() > seq.tail_bound(i)) {
          bound_ok = false;
          break;
        }
  report.certified = bound_ok && all_exact;
  report.route = report.certified ? seq.tail_note : "observed";

  for (unsigned k = 0; k <= max_k; ++k) {
    Rational eps = two_pow(-static_cast<long>(k));
    std::optional<std::uint64_t> j;
    if (report.certified) {
      for (std::uint64_t n = 0; n < depth; ++n)
        if (seq.tail_bound(n) < eps) {
          j = n;
          break;
        }
    } else {
      for (std::uint64_t n = 0; n < depth; ++n)
        if (worst_known[n] && worst[n].value() < eps) {
          j = n;
          break;
        }
    }
    if (!j) break;
    report.modulus.emplace_back(k, *j);
  }
  return report;
}

std::string_view to_string(RatioReport::Verdict v) {
  switch (v) {
    case RatioReport::Verdict::two_sided: return "two-sided-bounded";
    case RatioReport::Verdict::ratio_diverges: return "ratio-diverges";
    case RatioReport::Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

RatioReport metric_equivalence_probe(const SubmeasureDescriptor& nu1, const SubmeasureDescriptor& nu2,
                                     const std::vector<NatSet>& family,
                                     std::optional<std::pair<Rational, Rational>> claimed,
                                     const std::vector<Rational>& targets, const Settings& s) {
  RatioReport report;
  report.first = nu1.name();
  report.second = nu2.name();
  for (std::size_t i = 0; i < family.size(); ++i) {
    auto v1 = exact_or_throw(nu1(family[i], s), "family[" + std::to_string(i) + "] under " + nu1.name());
    auto v2 = exact_or_throw(nu2(family[i], s), "family[" + std::to_string(i) + "] under " + nu2.name());
    if (v1.is_infinite() || v2.is_infinite())
      fail(ErrorCode::sample_not_exact, "family[" + std::to_string(i) + "] has an infinite value");
    RatioSample sample{v1, v2, std::nullopt, false};
    if (v2.value() > 0) {
      Rational r = v1.value() / v2.value();
      r.canonicalize();
      sample.ratio = r;
      if (!report.max_ratio || r > *report.max_ratio) report.max_ratio = r;
      if (!report.min_ratio || r < *report.min_ratio) report.min_ratio = r;
    } else if (v1.value() > 0) {
      sample.unbounded = true;
    }
    report.samples.push_back(sample);
  }

  if (claimed) {
    bool inside = true;
    for (const auto& sm : report.samples) {
      if (sm.unbounded) inside = false;
      if (sm.ratio && (*sm.ratio < claimed->first || *sm.ratio > claimed->second)) inside = false;
    }
    if (inside) {
      report.verdict = RatioReport::Verdict::two_sided;
      report.c1 = claimed->first;
      report.c2 = claimed->second;
      return report;
    }
  }
  if (!targets.empty()) {
    for (const auto& c : targets)
      for (std::size_t i = 0; i < report.samples.size(); ++i) {
        const auto& sm = report.samples[i];
        if (sm.unbounded || (sm.ratio && *sm.ratio > c)) {
          report.witnesses.emplace_back(c, i);
          break;
        }
      }
    if (report.witnesses.size() == targets.size()) report.verdict = RatioReport::Verdict::ratio_diverges;
  }
  return report;
}

CoconvergenceReport topological_coconvergence_probe(const SubmeasureDescriptor& nu1, const SubmeasureDescriptor& nu2,
                                                    const std::vector<LimitedSequence>& seqs, const Settings& s,
                                                    const Rational& threshold) {
  CoconvergenceReport report;
  report.first = nu1.name();
  report.second = nu2.name();
  report.threshold = threshold;
  auto vanishes = [&](const std::vector<ExtValue>& v) {
    if (v.empty()) return true;
    const auto& last = v.back();
    if (last.is_infinite()) return false;
    auto hi = last.upper();
    return hi && *hi < threshold;
  };
  for (const auto& ls : seqs) {
    CoconvergenceEntry e;
    e.name = ls.name;
    for (std::uint64_t n = 0; n < ls.length; ++n) {
      auto diff = set_symdiff(ls.limit, ls.seq.at(n), s);
      e.first.push_back(nu1(diff, s));
      e.second.push_back(nu2(diff, s));
    }
    e.first_vanishes = vanishes(e.first);
    e.second_vanishes = vanishes(e.second);
    e.agree = e.first_vanishes == e.second_vanishes;
    report.entries.push_back(std::move(e));
  }
  return report;
}

}  // namespace densitas
