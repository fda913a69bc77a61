#include "densitas/registry.hpp"

#include "densitas/errors.hpp"

namespace densitas {

SubmeasureDescriptor norm_submeasure(const LscsmDescriptor& phi) {
  auto eval = [phi](const NatSet& a, const Settings& s) {
    auto est = exhaustive_norm(phi, a, s);
    DensityEstimate out{est.value, est.exact, {}};
    if (!est.exact)
      for (const auto& p : est.upper_profile)
        if (!p.value.is_infinite()) out.profile.push_back({p.cut, p.value.value()});
    return out;
  };
  return SubmeasureDescriptor("norm:" + phi.name(), eval,
                              {Backend::finite, Backend::periodic, Backend::ap_union, Backend::dyadic_block}, false,
                              false);
}

SubmeasureDescriptor lscsm_submeasure(const LscsmDescriptor& phi) {
  auto eval = [phi](const NatSet& a, const Settings& s) {
    auto v = phi.closed_value(a, s);
    if (!v)
      throw Error(ErrorCode::no_exact_norm,
                  phi.name() + " has no closed value on " + std::string(to_string(a.backend())) + " sets");
    return DensityEstimate::of(*v);
  };
  return SubmeasureDescriptor("phi:" + phi.name(), eval, {Backend::finite}, false, true);
}

SubmeasureDescriptor submeasure_by_name(const std::string& name) {
  if (name == "d-star") return d_star();
  if (name == "bd-star") return bd_star();
  if (name == "buck") return buck();
  if (name == "counting") return counting();
  if (name == "geometric") return geometric();
  if (name.rfind("weighted:f=", 0) == 0) return weighted(name.substr(11));
  if (name.rfind("norm:", 0) == 0) return norm_submeasure(lscsm_by_name(name.substr(5)));
  if (name.rfind("phi:", 0) == 0) return lscsm_submeasure(lscsm_by_name(name.substr(4)));
  if (name == "psi-norm") return norm_submeasure(psi_dyadic());
  throw Error(ErrorCode::invalid_argument, "unknown submeasure '" + name + "'");
}

std::vector<std::string> registered_submeasures() {
  return {"d-star", "bd-star", "buck", "weighted:f=<expr>", "counting", "geometric", "norm:<lscsm>", "phi:<lscsm>"};
}

}  // namespace densitas
