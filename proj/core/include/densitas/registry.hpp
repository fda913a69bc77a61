#pragma once

#include "densitas/density.hpp"
#include "densitas/exhaust.hpp"

#include <string>
#include <vector>

namespace densitas {

/// d-star, bd-star, buck, weighted:f=<expr>, counting, geometric,
/// norm:<lscsm> (the exhaustive norm) and phi:<lscsm> (the lscsm itself).
SubmeasureDescriptor submeasure_by_name(const std::string& name);

/// The exhaustive norm ‖·‖_φ as a submeasure.
SubmeasureDescriptor norm_submeasure(const LscsmDescriptor& phi);
/// φ itself as a submeasure; exact where a closed value exists.
SubmeasureDescriptor lscsm_submeasure(const LscsmDescriptor& phi);

std::vector<std::string> registered_submeasures();

}  // namespace densitas
