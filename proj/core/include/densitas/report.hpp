#pragma once

#include "densitas/axioms.hpp"
#include "densitas/density.hpp"
#include "densitas/exhaust.hpp"
#include "densitas/limits.hpp"
#include "densitas/metric.hpp"
#include "densitas/settings.hpp"
#include "densitas/witness.hpp"

#include <json.hpp>

#include <string>

namespace densitas {

using Json = nlohmann::json;  // std::map objects: keys always sorted

inline constexpr const char* kVersion = "densitas 0.1.0";

enum class Format { json, csv, text };
Format parse_format(const std::string& name);

Json to_json(const Rational& q);  // "p/q"
Json to_json(const Natural& n);
Json to_json(const ExtValue& v);
Json to_json(const Modulus& m);  // "9!" when factored
Json to_json(const AxiomReport& r);
Json to_json(const DensityEstimate& e);
Json to_json(const NormEstimate& e);
Json to_json(const CauchyReport& r);
Json to_json(const RatioReport& r);
Json to_json(const CoconvergenceReport& r);
Json to_json(const LimitCertificate& c);
Json to_json(const WitnessParams& p);
Json to_json(const ValidationReport& r);
Json to_json(const WitnessFamily& w);
Json to_json(const DivergenceCertificate& c);
Json to_json(const GapCertificate& c);

/// Inverse of to_json(WitnessFamily); levels are taken as stored, not recomputed.
WitnessFamily family_from_json(const Json& j);

/// {"config", "kind", "report", "version"}.
Json envelope(const std::string& kind, Json report, const Settings& s);

std::string emit_json(const Json& j);  // two-space indent, trailing newline
/// Distance table with sequence indices as row and column headers.
std::string cauchy_csv(const CauchyReport& r);
std::string axioms_csv(const AxiomReport& r);
std::string axioms_text(const AxiomReport& r);

}  // namespace densitas
