#pragma once

#include <string>
#include <vector>

namespace densitas {

/// One (axiom, sample) instance of a battery.
struct AxiomCheck {
  std::string axiom;
  std::string sample;
  bool passed = false;
  std::string detail;
};

struct AxiomReport {
  std::string subject;
  std::vector<AxiomCheck> checks;

  bool passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
  std::size_t failures() const {
    std::size_t n = 0;
    for (const auto& c : checks) n += c.passed ? 0 : 1;
    return n;
  }
  void add(std::string axiom, std::string sample, bool ok, std::string detail = {}) {
    checks.push_back(AxiomCheck{std::move(axiom), std::move(sample), ok, std::move(detail)});
  }
};

}  // namespace densitas
