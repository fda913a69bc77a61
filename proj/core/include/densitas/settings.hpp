#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace densitas {

/// Tunables shared by every module. Defaults match the documented desk-scale
/// budgets; the CLI overrides them from a flat key=value file and flags.
struct Settings {
  std::uint64_t modulus_budget = 1'000'000'000;  // largest lcm a normalization may build
  std::uint64_t residue_budget = 1u << 24;       // most residues a periodic set may store
  std::uint64_t prefix_horizon = 100'000;        // prefix scans for approximate densities
  std::uint64_t window_horizon = 1u << 14;       // longest window in Banach scans
  std::uint64_t weighted_horizon = 100'000;      // weighted prefix scans / Erdos-Ulam checks
  std::uint64_t norm_cut_horizon = 1u << 16;     // cuts probed by upper-bound norm profiles
  unsigned inclusion_exclusion_cap = 16;         // max overlapping AP terms per component
  unsigned interval_bits = 128;                  // starting MPFR precision
  unsigned interval_max_bits = 8192;

  static const Settings& defaults();

  /// Applies one key=value pair; throws Error(invalid_argument) on unknown keys.
  void set(const std::string& key, const std::string& value);
  std::map<std::string, std::string> as_map() const;
};

}  // namespace densitas
