#include "catalog.hpp"

#include <densitas/errors.hpp>
#include <densitas/limits.hpp>
#include <densitas/registry.hpp>
#include <densitas/report.hpp>
#include <densitas/sampling.hpp>
#include <densitas/set_literal.hpp>

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace densitas;

enum Exit { pass = 0, certificate_failure = 1, usage_error = 2, contract_violation = 3 };

struct Outcome {
  std::string kind;
  Json report;
  std::string text;
  std::string csv;  // empty: flattened key,value rows
  bool passed = true;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, sep);)
    if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<std::uint64_t> parse_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& item : split(text, ',')) out.push_back(to_u64(parse_natural(item)));
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

void load_config(const std::string& path, Settings& s) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot read config file '" + path + "'");
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::invalid_argument, path + ":" + std::to_string(no) + ": expected key=value");
    s.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
}

std::string flat_csv(const Json& report) {
  std::string out = "key,value\n";
  for (const auto& [k, v] : report.items()) {
    if (v.is_structured()) continue;
    out += k + "," + (v.is_string() ? v.get<std::string>() : v.dump()) + "\n";
  }
  return out;
}

std::string value_text(const ExtValue& v) { return v.to_string(); }

// ---- verbs ----

Outcome run_eval(const std::string& measure, const std::string& literal, bool dual, const Settings& s) {
  auto nu = submeasure_by_name(measure);
  auto a = parse_set_literal(literal);
  auto est = nu.estimate(a, s);
  Outcome o{"eval", Json{{"measure", nu.name()}, {"set", print_set_literal(a)}, {"estimate", to_json(est)}},
            value_text(est.value) + "\n", {}};
  if (dual) {
    auto low = lower_dual(nu, a, s);
    o.report["lower_dual"] = to_json(low);
    o.report["domain"] = std::string(to_string(classify_domain(est.value, low)));
    o.text += "lower dual " + value_text(low) + ", domain " + o.report["domain"].get<std::string>() + "\n";
  }
  return o;
}

Outcome run_dist(const std::string& measure, const std::string& x, const std::string& y, const Settings& s) {
  auto nu = submeasure_by_name(measure);
  auto a = parse_set_literal(x), b = parse_set_literal(y);
  auto d = dist(nu, a, b, s);
  return Outcome{"dist",
                 Json{{"measure", nu.name()},
                      {"A", print_set_literal(a)},
                      {"B", print_set_literal(b)},
                      {"distance", to_json(d)}},
                 value_text(d) + "\n",
                 {}};
}

Outcome run_axioms(const std::string& kind, const std::string& measure, std::size_t samples, std::uint64_t seed,
                   const std::string& family, const std::string& dilations, const std::string& shifts,
                   const Settings& s) {
  AxiomReport r;
  if (kind == "lscsm") {
    r = check_lscsm_axioms(lscsm_by_name(measure), random_family(family, samples, seed), s);
  } else {
    auto nu = submeasure_by_name(measure);
    if (kind == "submeasure") {
      r = check_submeasure_axioms(nu, random_family(family, samples, seed), s);
    } else if (kind == "pseudometric") {
      auto sets = random_family(family, 3 * samples, seed);
      std::vector<std::array<NatSet, 3>> triples;
      for (std::size_t i = 0; i < samples; ++i) triples.push_back({sets[3 * i], sets[3 * i + 1], sets[3 * i + 2]});
      r = check_pseudometric(nu, triples, s);
    } else if (kind == "upper-density") {
      r = check_upper_density_axioms(nu, random_family(family, samples, seed), parse_list(dilations),
                                     parse_list(shifts), s);
    } else {
      throw CLI::ValidationError("kind", "expected submeasure, pseudometric, upper-density or lscsm");
    }
  }
  Json j = to_json(r);
  j["battery"] = Json{{"kind", kind}, {"samples", samples}, {"seed", seed}, {"family", family}};
  return Outcome{"axioms", j, axioms_text(r), axioms_csv(r), r.passed()};
}

Outcome run_norm(const std::string& name, const std::string& literal, const Settings& s) {
  auto phi = lscsm_by_name(name);
  auto a = parse_set_literal(literal);
  auto est = exhaustive_norm(phi, a, s);
  auto member = exh_member(phi, a, s);
  Json j{{"lscsm", phi.name()},
         {"set", print_set_literal(a)},
         {"norm", to_json(est)},
         {"exh_membership", std::string(to_string(member))}};
  std::string csv = "cut,value\n";
  for (const auto& p : est.upper_profile) csv += to_string(p.cut) + "," + p.value.to_string() + "\n";
  return Outcome{"norm", j, value_text(est.value) + "\n", csv};
}

SetSequence sequence_from(const std::string& name, const std::vector<std::string>& terms, unsigned depth,
                          const Settings& s) {
  if (!terms.empty()) {
    std::vector<NatSet> sets;
    for (const auto& t : terms) sets.push_back(parse_set_literal(t));
    auto seq = SetSequence::of(std::move(sets), true);
    return seq;
  }
  if (name.empty()) throw CLI::ValidationError("sequence", "give --sequence or at least one --term");
  return cli::sequence_by_name(name, depth, s);
}

std::string limit_text(const LimitCertificate& c) {
  std::ostringstream out;
  for (const auto& st : c.stages) {
    out << "stage " << st.n << ": inside " << st.inside.to_string() << ", outside " << st.outside.to_string();
    if (st.bound) out << " <= " << to_string(*st.bound);
    if (st.cut) out << ", cut " << to_string(*st.cut);
    out << (st.ok ? "" : "  FAIL") << "\n";
  }
  for (const auto& n : c.notes) out << "note: " << n << "\n";
  out << c.method << ": " << c.verdict() << "\n";
  return out.str();
}

Outcome run_limit(const std::string& method, const std::string& measure, const std::string& sequence,
                  const std::vector<std::string>& terms, unsigned depth, const Settings& s) {
  auto seq = sequence_from(sequence, terms, depth, s);
  const std::uint64_t observed = terms.empty() ? depth : terms.size();
  LimitCertificate c;
  if (method == "sigma") c = sigma_limit(submeasure_by_name(measure), seq, observed, s);
  else if (method == "lscsm") c = lscsm_limit(lscsm_by_name(measure), seq, observed, s);
  else if (method == "cauchy") c = cauchy_to_limit(submeasure_by_name(measure), seq, union_oracle, observed, s);
  else throw CLI::ValidationError("method", "expected sigma, lscsm or cauchy");
  Json j = to_json(c);
  j["sequence"] = terms.empty() ? Json(sequence) : Json(terms);
  std::string csv = "n,inside,outside,bound,ok\n";
  for (const auto& st : c.stages)
    csv += std::to_string(st.n) + "," + st.inside.to_string() + "," + st.outside.to_string() + "," +
           (st.bound ? to_string(*st.bound) : "") + "," + (st.ok ? "true" : "false") + "\n";
  return Outcome{"limit", j, limit_text(c), csv, c.certified};
}

Outcome run_witness_build(const std::string& kappa, unsigned depth, std::size_t length, const std::string& schedule,
                          const Settings& s) {
  WitnessParams p;
  if (schedule.empty()) {
    p = derive_params(parse_rational(kappa), std::max<std::size_t>(length, depth + 2), s);
  } else {
    p = derive_params(parse_rational(kappa), 2, s);
    p.a.clear();
    for (auto a : parse_list(schedule)) p.a.push_back(static_cast<unsigned>(a));
    p.demo = true;
  }
  auto w = build_witness(p, depth, s);
  std::ostringstream text;
  text << "kappa " << to_string(p.kappa) << ", N " << to_string(p.N) << ", C " << to_string(p.C)
       << (p.demo ? " (demo schedule)" : "") << "\n";
  for (const auto& l : w.levels) {
    text << "H_" << l.n << " = {";
    for (std::size_t i = 0; i < l.H.size(); ++i) text << (i ? "," : "") << l.H[i];
    text << "} mod " << l.modulus.label() << "\n";
  }
  return Outcome{"witness", to_json(w), text.str(), {}, true};
}

Outcome run_witness_verify(const std::string& path, std::uint64_t horizon, const Settings& s) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::invalid_argument, "cannot read witness file '" + path + "'");
  Json file;
  try {
    file = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed witness file: ") + e.what());
  }
  const Json& body = file.contains("report") ? file["report"] : file;
  auto w = family_from_json(body);

  auto validation = validate_params(w.params, s);
  auto invariants = check_witness_invariants(w, horizon);
  auto divergence = divergence_certificate(w, horizon);
  Json j{{"family", to_json(w)},
         {"validation", to_json(validation)},
         {"invariants", to_json(invariants)},
         {"divergence", to_json(divergence)},
         {"horizon", horizon}};
  bool ok = validation.passed() && invariants.passed() && divergence.holds;
  std::ostringstream text;
  text << "parameters: " << (validation.passed() ? "valid" : "INVALID") << (w.demo() ? " (demo)" : "") << "\n";
  text << axioms_text(invariants);
  text << "divergence: " << divergence.verdict << (divergence.holds ? "" : " FAILED") << "\n";
  if (w.params.kappa == Rational(1, 2)) {
    auto gap = banach_gap_certificate(w, horizon);
    j["gap"] = to_json(gap);
    ok = ok && gap.upper_holds && gap.lower_holds && gap.membership == Membership::out;
    text << "gap: max prefix ratio " << to_string(gap.max_ratio) << " over " << gap.breakpoints << " breakpoints and "
         << gap.probes << " probes, Banach lower " << to_string(gap.banach_lower) << ": " << gap.verdict << "\n";
  }
  return Outcome{"witness-verify", j, text.str(), axioms_csv(invariants), ok && !w.demo()};
}

Outcome run_probe(const std::string& kind, const std::vector<std::string>& measures, const std::string& family,
                  std::size_t count, std::uint64_t seed, const std::string& targets, const std::string& claim,
                  const std::string& sequence, unsigned depth, const Settings& s) {
  auto need = [&](std::size_t n) {
    if (measures.size() != n)
      throw CLI::ValidationError("measures", "probe " + kind + " takes " + std::to_string(n) + " measure(s)");
  };
  if (kind == "ratio") {
    need(2);
    auto fam = cli::family_by_name(family, count, seed);
    std::vector<Rational> cs;
    for (const auto& t : split(targets, ',')) cs.push_back(parse_rational(t));
    std::optional<std::pair<Rational, Rational>> claimed;
    if (!claim.empty()) {
      auto parts = split(claim, ',');
      if (parts.size() != 2) throw CLI::ValidationError("claim", "expected c1,c2");
      claimed = std::make_pair(parse_rational(parts[0]), parse_rational(parts[1]));
    }
    auto r = metric_equivalence_probe(submeasure_by_name(measures[0]), submeasure_by_name(measures[1]), fam, claimed,
                                      cs, s);
    Json j = to_json(r);
    j["family"] = Json{{"name", family}, {"count", count}, {"seed", seed}};
    std::string csv = "i,first,second,ratio\n";
    for (std::size_t i = 0; i < r.samples.size(); ++i) {
      const auto& sm = r.samples[i];
      csv += std::to_string(i) + "," + sm.first.to_string() + "," + sm.second.to_string() + "," +
             (sm.ratio ? to_string(*sm.ratio) : (sm.unbounded ? "inf" : "")) + "\n";
    }
    bool ok = r.verdict != RatioReport::Verdict::inconclusive;
    return Outcome{"probe-ratio", j, std::string(to_string(r.verdict)) + "\n", csv, ok};
  }
  if (kind == "cauchy") {
    need(1);
    auto r = cauchy_profile(submeasure_by_name(measures[0]), cli::sequence_by_name(sequence, depth, s), depth, s);
    std::ostringstream text;
    text << (r.certified ? "certified" : "observed") << " modulus (" << r.route << "):";
    for (const auto& [k, j] : r.modulus) text << " " << k << "->" << j;
    text << "\n";
    Json j = to_json(r);
    j["sequence"] = sequence;
    return Outcome{"probe-cauchy", j, text.str(), cauchy_csv(r), r.certified};
  }
  if (kind == "coconvergence") {
    need(2);
    std::vector<LimitedSequence> seqs;
    for (const auto& name : split(sequence, ',')) {
      auto lim = cli::declared_limit(name, depth, s);
      if (!lim) throw CLI::ValidationError("sequence", "'" + name + "' declares no limit");
      seqs.push_back(LimitedSequence{name, cli::sequence_by_name(name, depth, s), *lim, depth});
    }
    auto r = topological_coconvergence_probe(submeasure_by_name(measures[0]), submeasure_by_name(measures[1]), seqs, s);
    return Outcome{"probe-coconvergence", to_json(r),
                   std::string(r.all_agree() ? "agree" : "disagree") + " (sampled evidence)\n", {}, r.all_agree()};
  }
  throw CLI::ValidationError("kind", "expected ratio, cauchy or coconvergence");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"densitas: submeasures, upper densities and their pseudometrics on subsets of the naturals"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string format = "text", config_path, out_path;
  std::vector<std::string> overrides;
  app.add_option("--format", format, "json, csv or text")->check(CLI::IsMember({"json", "csv", "text"}));
  app.add_option("--config", config_path, "flat key=value file (default: $DENSITAS_CONFIG)");
  app.add_option("--set", overrides, "key=value setting override, repeatable");
  app.add_option("-o,--out", out_path, "write the report to a file instead of stdout");

  std::string measure, set_a, set_b;
  bool dual = false;
  auto* eval = app.add_subcommand("eval", "evaluate a submeasure on a set");
  eval->add_option("measure", measure)->required();
  eval->add_option("set", set_a)->required();
  eval->add_flag("--dual", dual, "also compute the lower dual and dom membership");

  auto* distc = app.add_subcommand("dist", "d_nu(A,B) = min{1, nu(A symdiff B)}");
  distc->add_option("measure", measure)->required();
  distc->add_option("A", set_a)->required();
  distc->add_option("B", set_b)->required();

  std::string kind, family = "periodic", dilations = "2,3,5", shifts = "1,7,100";
  std::size_t samples = 100;
  std::uint64_t seed = 1;
  auto* axioms = app.add_subcommand("axioms", "seeded axiom battery");
  axioms->add_option("kind", kind, "submeasure, pseudometric, upper-density or lscsm")->required();
  axioms->add_option("measure", measure)->required();
  axioms->add_option("--samples", samples);
  axioms->add_option("--seed", seed);
  axioms->add_option("--family", family, "periodic, dyadic, finite or mixed");
  axioms->add_option("--dilations", dilations);
  axioms->add_option("--shifts", shifts);

  auto* norm = app.add_subcommand("norm", "exhaustive norm of a set under an lscsm");
  norm->add_option("lscsm", measure)->required();
  norm->add_option("set", set_a)->required();

  std::string method, sequence;
  std::vector<std::string> terms;
  unsigned depth = 8;
  auto* limit = app.add_subcommand("limit", "constructive limit of an increasing sequence");
  limit->add_option("method", method, "sigma, lscsm or cauchy")->required();
  limit->add_option("measure", measure)->required();
  limit->add_option("--sequence", sequence, "points, valuation, witness or constant:<set>");
  limit->add_option("--term", terms, "explicit increasing terms, repeatable");
  limit->add_option("--depth", depth);

  auto* witness = app.add_subcommand("witness", "witness family for bd*");
  witness->require_subcommand(1);
  witness->fallthrough();
  std::string kappa = "1/2", schedule, witness_file;
  std::size_t length = 8;
  std::uint64_t horizon = 1'000'000;
  auto* build = witness->add_subcommand("build", "derive parameters and build the family");
  build->add_option("--kappa", kappa);
  build->add_option("--depth", depth);
  build->add_option("--length", length, "schedule length");
  build->add_option("--schedule", schedule, "explicit a_n list; marks the family as a demo");
  auto* verify = witness->add_subcommand("verify", "re-check a stored family");
  verify->add_option("file", witness_file)->required();
  verify->add_option("--horizon", horizon);

  std::vector<std::string> measures;
  std::string targets = "1,2,4,8", claim;
  std::size_t count = 12;
  auto* probe = app.add_subcommand("probe", "ratio, Cauchy and co-convergence probes");
  probe->add_option("kind", kind, "ratio, cauchy or coconvergence")->required();
  probe->add_option("measures", measures)->required();
  probe->add_option("--family", family);
  probe->add_option("--count", count);
  probe->add_option("--seed", seed);
  probe->add_option("--targets", targets);
  probe->add_option("--claim", claim, "c1,c2 constants to test for a two-sided bound");
  probe->add_option("--sequence", sequence);
  probe->add_option("--depth", depth);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? pass : usage_error;
  }

  try {
    Settings s = Settings::defaults();
    if (config_path.empty())
      if (const char* env = std::getenv("DENSITAS_CONFIG")) config_path = env;
    if (!config_path.empty()) load_config(config_path, s);
    for (const auto& kv : overrides) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw CLI::ValidationError("--set", "expected key=value");
      s.set(kv.substr(0, eq), kv.substr(eq + 1));
    }

    Outcome o;
    if (*eval) o = run_eval(measure, set_a, dual, s);
    else if (*distc) o = run_dist(measure, set_a, set_b, s);
    else if (*axioms) o = run_axioms(kind, measure, samples, seed, family, dilations, shifts, s);
    else if (*norm) o = run_norm(measure, set_a, s);
    else if (*limit) o = run_limit(method, measure, sequence, terms, depth, s);
    else if (*build) o = run_witness_build(kappa, depth, length, schedule, s);
    else if (*verify) o = run_witness_verify(witness_file, horizon, s);
    else if (*probe) {
      if (family == "periodic" && kind == "ratio" && !probe->count("--family")) family = "power-blocks";
      if (sequence.empty()) sequence = kind == "coconvergence" ? "valuation" : "witness";
      o = run_probe(kind, measures, family, count, seed, targets, claim, sequence, depth, s);
    }

    // a stored family is only useful as JSON
    if (*build && !out_path.empty() && !app.count("--format")) format = "json";
    std::string bytes;
    switch (parse_format(format)) {
      case Format::json: bytes = emit_json(envelope(o.kind, o.report, s)); break;
      case Format::csv: bytes = o.csv.empty() ? flat_csv(o.report) : o.csv; break;
      case Format::text: bytes = o.text; break;
    }
    if (out_path.empty()) {
      std::cout << bytes;
    } else {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) throw Error(ErrorCode::invalid_argument, "cannot write '" + out_path + "'");
      out << bytes;
    }
    return o.passed ? pass : certificate_failure;
  } catch (const ParseError& e) {
    std::cerr << e.what() << "\n" << e.caret() << "\n";
    return usage_error;
  } catch (const CLI::Error& e) {
    std::cerr << e.what() << "\n";
    return usage_error;
  } catch (const Error& e) {
    std::cerr << e.what() << "\n";
    return e.code() == ErrorCode::invalid_argument ? usage_error : contract_violation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return contract_violation;
  }
}
