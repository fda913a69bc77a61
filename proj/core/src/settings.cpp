#include "densitas/settings.hpp"

#include "densitas/errors.hpp"
#include "densitas/numeric.hpp"

namespace densitas {

const Settings& Settings::defaults() {
  static const Settings s{};
  return s;
}

void Settings::set(const std::string& key, const std::string& value) {
  auto u64 = [&] { return to_u64(parse_natural(value)); };
  if (key == "modulus_budget") modulus_budget = u64();
  else if (key == "residue_budget") residue_budget = u64();
  else if (key == "prefix_horizon") prefix_horizon = u64();
  else if (key == "window_horizon") window_horizon = u64();
  else if (key == "weighted_horizon") weighted_horizon = u64();
  else if (key == "norm_cut_horizon") norm_cut_horizon = u64();
  else if (key == "inclusion_exclusion_cap") inclusion_exclusion_cap = static_cast<unsigned>(u64());
  else if (key == "interval_bits") interval_bits = static_cast<unsigned>(u64());
  else if (key == "interval_max_bits") interval_max_bits = static_cast<unsigned>(u64());
  else throw Error(ErrorCode::invalid_argument, "unknown setting '" + key + "'");
}

std::map<std::string, std::string> Settings::as_map() const {
  return {
      {"modulus_budget", std::to_string(modulus_budget)},
      {"residue_budget", std::to_string(residue_budget)},
      {"prefix_horizon", std::to_string(prefix_horizon)},
      {"window_horizon", std::to_string(window_horizon)},
      {"weighted_horizon", std::to_string(weighted_horizon)},
      {"norm_cut_horizon", std::to_string(norm_cut_horizon)},
      {"inclusion_exclusion_cap", std::to_string(inclusion_exclusion_cap)},
      {"interval_bits", std::to_string(interval_bits)},
      {"interval_max_bits", std::to_string(interval_max_bits)},
  };
}

}  // namespace densitas
