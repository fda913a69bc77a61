#include "densitas/report.hpp"

#include "densitas/errors.hpp"
#include "densitas/set_literal.hpp"

#include <sstream>

namespace densitas {

Format parse_format(const std::string& name) {
  if (name == "json") return Format::json;
  if (name == "csv") return Format::csv;
  if (name == "text") return Format::text;
  throw Error(ErrorCode::invalid_argument, "unknown format '" + name + "' (json, csv, text)");
}

Json to_json(const Rational& q) { return to_string(q); }
Json to_json(const Natural& n) { return to_string(n); }

Json to_json(const ExtValue& v) {
  Json j;
  switch (v.kind()) {
    case ExtValue::Kind::exact:
      j["kind"] = "exact";
      j["value"] = to_json(v.value());
      break;
    case ExtValue::Kind::approx:
      j["kind"] = "approx";
      j["direction"] = std::string(to_string(v.direction()));
      j["value"] = to_json(v.value());
      j["gap"] = to_json(v.gap());
      break;
    case ExtValue::Kind::infinite:
      j["kind"] = "infinite";
      break;
  }
  return j;
}

Json to_json(const Modulus& m) { return m.label(); }

namespace {

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? to_json(*v) : Json(nullptr);
}

Json value_list(const std::vector<ExtValue>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) out.push_back(to_json(v));
  return out;
}

Json rational_list(const std::vector<Rational>& qs) {
  Json out = Json::array();
  for (const auto& q : qs) out.push_back(to_json(q));
  return out;
}

Json window_json(const WitnessWindow& w) {
  return Json{{"n", w.n}, {"start", to_json(w.start)}, {"length", w.length}, {"fill", to_json(w.fill)},
              {"ratio", to_json(w.ratio)}};
}

Json verdict_flags(bool demo) { return demo ? Json("demo") : Json("validated"); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

Json to_json(const AxiomReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(Json{{"axiom", c.axiom}, {"sample", c.sample}, {"passed", c.passed}, {"detail", c.detail}});
  return Json{{"subject", r.subject},
              {"checks", checks},
              {"total", r.checks.size()},
              {"failures", r.failures()},
              {"passed", r.passed()}};
}

Json to_json(const DensityEstimate& e) {
  Json profile = Json::array();
  for (const auto& p : e.profile)
    profile.push_back(Json{{"scale", to_json(p.scale)}, {"statistic", to_json(p.statistic)}});
  return Json{{"value", to_json(e.value)}, {"exact", e.exact}, {"profile", profile}};
}

Json to_json(const NormEstimate& e) {
  Json profile = Json::array();
  for (const auto& p : e.upper_profile) profile.push_back(Json{{"cut", to_json(p.cut)}, {"value", to_json(p.value)}});
  return Json{{"value", to_json(e.value)}, {"exact", e.exact}, {"upper_profile", profile}};
}

Json to_json(const CauchyReport& r) {
  Json table = Json::array();
  for (const auto& row : r.table) table.push_back(value_list(row));
  Json modulus = Json::array();
  for (const auto& [k, j] : r.modulus) modulus.push_back(Json{{"k", k}, {"j", j}});
  return Json{{"measure", r.measure},
              {"table", table},
              {"modulus", modulus},
              {"certified", r.certified},
              {"route", r.route}};
}

Json to_json(const RatioReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples)
    samples.push_back(Json{{"first", to_json(s.first)},
                           {"second", to_json(s.second)},
                           {"ratio", optional_json(s.ratio)},
                           {"unbounded", s.unbounded}});
  Json witnesses = Json::array();
  for (const auto& [c, i] : r.witnesses) witnesses.push_back(Json{{"C", to_json(c)}, {"index", i}});
  Json j{{"first", r.first},
         {"second", r.second},
         {"samples", samples},
         {"max_ratio", optional_json(r.max_ratio)},
         {"min_ratio", optional_json(r.min_ratio)},
         {"verdict", std::string(to_string(r.verdict))},
         {"witnesses", witnesses}};
  if (r.verdict == RatioReport::Verdict::two_sided) {
    j["c1"] = to_json(r.c1);
    j["c2"] = to_json(r.c2);
  }
  return j;
}

Json to_json(const CoconvergenceReport& r) {
  Json entries = Json::array();
  for (const auto& e : r.entries)
    entries.push_back(Json{{"name", e.name},
                           {"first", value_list(e.first)},
                           {"second", value_list(e.second)},
                           {"first_vanishes", e.first_vanishes},
                           {"second_vanishes", e.second_vanishes},
                           {"agree", e.agree}});
  return Json{{"first", r.first},
              {"second", r.second},
              {"threshold", to_json(r.threshold)},
              {"entries", entries},
              {"all_agree", r.all_agree()},
              {"evidence", "sampled"}};
}

Json to_json(const LimitCertificate& c) {
  Json stages = Json::array();
  for (const auto& st : c.stages) {
    Json s{{"n", st.n}, {"inside", to_json(st.inside)}, {"outside", to_json(st.outside)},
           {"bound", optional_json(st.bound)}, {"ok", st.ok}};
    if (st.cut) s["cut"] = to_json(*st.cut);
    if (st.c_residual) s["c_residual"] = to_json(*st.c_residual);
    if (st.first_j) s["first_j"] = *st.first_j;
    stages.push_back(s);
  }
  return Json{{"method", c.method},
              {"limit", print_set_literal(c.limit)},
              {"stages", stages},
              {"increment_sum", to_json(c.increment_sum)},
              {"certified", c.certified},
              {"notes", c.notes},
              {"verdict", c.verdict()}};
}

Json to_json(const WitnessParams& p) {
  Json moduli = Json::array();
  for (auto a : p.a) moduli.push_back(std::to_string(a) + "!");
  return Json{{"kappa", to_json(p.kappa)}, {"N", to_json(p.N)}, {"C", to_json(p.C)},
              {"a", p.a},                  {"moduli", moduli},  {"demo", p.demo}};
}

Json to_json(const ValidationReport& r) {
  return Json{{"checks", to_json(r.checks)}, {"demo", r.demo}, {"passed", r.passed()}};
}

Json to_json(const WitnessFamily& w) {
  Json levels = Json::array();
  for (const auto& l : w.levels)
    levels.push_back(Json{{"n", l.n}, {"H", l.H}, {"ell", l.ell}, {"modulus", to_json(l.modulus)},
                          {"increment", to_json(make_rational(nat(l.H.size()), l.modulus.value))}});
  return Json{{"params", to_json(w.params)},
              {"depth", w.depth},
              {"levels", levels},
              {"density_A", to_json(w.density_A(w.depth))},
              {"status", verdict_flags(w.demo())}};
}

WitnessFamily family_from_json(const Json& j) {
  try {
    WitnessParams p;
    const auto& pj = j.at("params");
    p.kappa = parse_rational(pj.at("kappa").get<std::string>());
    p.N = parse_natural(pj.at("N").get<std::string>());
    p.C = parse_natural(pj.at("C").get<std::string>());
    p.a = pj.at("a").get<std::vector<unsigned>>();
    p.demo = pj.value("demo", false);
    std::vector<std::vector<std::uint64_t>> H;
    for (const auto& l : j.at("levels")) H.push_back(l.at("H").get<std::vector<std::uint64_t>>());
    return family_from_levels(p, j.at("depth").get<unsigned>(), std::move(H));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_argument, std::string("malformed witness file: ") + e.what());
  }
}

Json to_json(const DivergenceCertificate& c) {
  Json windows = Json::array();
  for (const auto& w : c.windows) windows.push_back(window_json(w));
  return Json{{"increments", rational_list(c.increments)},
              {"partial_sums", rational_list(c.partial_sums)},
              {"target", to_json(c.target)},
              {"windows", windows},
              {"holds", c.holds},
              {"demo", c.demo},
              {"verdict", c.verdict}};
}

Json to_json(const GapCertificate& c) {
  Json checks = Json::array();
  for (const auto& p : c.checks)
    checks.push_back(Json{{"m", to_json(p.m)}, {"count", to_json(p.count)}, {"ratio", to_json(p.ratio)},
                          {"probe", p.probe}});
  Json windows = Json::array();
  for (const auto& w : c.windows) windows.push_back(window_json(w));
  return Json{{"upper_limit", to_json(c.upper_limit)},
              {"checks", checks},
              {"breakpoints", c.breakpoints},
              {"probes", c.probes},
              {"max_ratio", to_json(c.max_ratio)},
              {"upper_holds", c.upper_holds},
              {"windows", windows},
              {"banach_lower", to_json(c.banach_lower)},
              {"lower_holds", c.lower_holds},
              {"membership", std::string(to_string(c.membership))},
              {"demo", c.demo},
              {"verdict", c.verdict}};
}

Json envelope(const std::string& kind, Json report, const Settings& s) {
  Json config = Json::object();
  for (const auto& [k, v] : s.as_map()) config[k] = v;
  return Json{{"version", kVersion}, {"config", config}, {"kind", kind}, {"report", std::move(report)}};
}

std::string emit_json(const Json& j) { return j.dump(2) + "\n"; }

std::string cauchy_csv(const CauchyReport& r) {
  std::ostringstream out;
  out << "i";
  for (std::size_t j = 0; j < r.table.size(); ++j) out << ',' << j;
  out << '\n';
  for (std::size_t i = 0; i < r.table.size(); ++i) {
    out << i;
    for (const auto& v : r.table[i]) out << ',' << csv_field(v.to_string());
    out << '\n';
  }
  return out.str();
}

std::string axioms_csv(const AxiomReport& r) {
  std::ostringstream out;
  out << "axiom,sample,passed,detail\n";
  for (const auto& c : r.checks)
    out << csv_field(c.axiom) << ',' << csv_field(c.sample) << ',' << (c.passed ? "true" : "false") << ','
        << csv_field(c.detail) << '\n';
  return out.str();
}

std::string axioms_text(const AxiomReport& r) {
  std::ostringstream out;
  for (const auto& c : r.checks)
    if (!c.passed) out << "FAIL " << c.axiom << " [" << c.sample << "] " << c.detail << '\n';
  out << r.subject << ": " << (r.checks.size() - r.failures()) << "/" << r.checks.size() << " checks passed\n";
  return out.str();
}

}  // namespace densitas
