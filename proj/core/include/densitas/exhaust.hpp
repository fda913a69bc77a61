#pragma once

#include "densitas/axioms.hpp"
#include "densitas/density.hpp"
#include "densitas/natset.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace densitas {

/// A lower semicontinuous submeasure φ given by its values on prefixes A∩n.
class LscsmDescriptor {
 public:
  using Prefix = std::function<ExtValue(const NatSet&, const Natural&, const Settings&)>;
  using Closed = std::function<std::optional<ExtValue>(const NatSet&, const Settings&)>;

  LscsmDescriptor(std::string name, Prefix prefix, Closed norm = nullptr, Closed value = nullptr, bool bounded = true);

  const std::string& name() const { return name_; }
  bool bounded() const { return bounded_; }

  /// φ(A∩n).
  ExtValue prefix(const NatSet& a, const Natural& n, const Settings& s = Settings::defaults()) const;
  /// ‖A‖_φ in closed form, when one is known for the backend.
  std::optional<ExtValue> closed_norm(const NatSet& a, const Settings& s = Settings::defaults()) const;
  /// φ(A) in closed form; finite sets always have one.
  std::optional<ExtValue> closed_value(const NatSet& a, const Settings& s = Settings::defaults()) const;
  /// φ(A∖n); throws no_exact_norm without a closed form.
  ExtValue tail(const NatSet& a, const Natural& n, const Settings& s = Settings::defaults()) const;

 private:
  std::string name_;
  Prefix prefix_;
  Closed norm_;
  Closed value_;
  bool bounded_;
};

struct NormPoint {
  Natural cut;
  ExtValue value;  // φ(A∖cut), or a bound on it
};

struct NormEstimate {
  ExtValue value;
  std::vector<NormPoint> upper_profile;
  bool exact = false;
};

ExtValue lscsm_eval(const LscsmDescriptor& phi, const NatSet& a, const Natural& n,
                    const Settings& s = Settings::defaults());
NormEstimate exhaustive_norm(const LscsmDescriptor& phi, const NatSet& a, const Settings& s = Settings::defaults());
Membership exh_member(const LscsmDescriptor& phi, const NatSet& a, const Settings& s = Settings::defaults());

/// φ_∞(A∩n) within eps, truncating the α-sum where 2^{-α₀} <= eps/2.
ExtValue phi_infty_eval(const NatSet& a, std::uint64_t n, const Rational& eps);

AxiomReport check_lscsm_axioms(const LscsmDescriptor& phi, const std::vector<NatSet>& samples,
                               const Settings& s = Settings::defaults());

LscsmDescriptor phi_prefix();
LscsmDescriptor psi_dyadic();
LscsmDescriptor phi_alpha(const Rational& alpha);
LscsmDescriptor phi_infty(const Rational& eps);
/// Σ_{α<=a0} φ_{2^α}/2^α, exact.
LscsmDescriptor phi_infty_truncated(unsigned a0);
LscsmDescriptor counting_lscsm();
LscsmDescriptor harmonic_lscsm();
LscsmDescriptor geometric_lscsm();
LscsmDescriptor weighted_lscsm(const std::string& expression);

/// phi-prefix, psi-dyadic, phi-alpha:a=<q>, phi-infty:eps=<q>, phi-infty-trunc:a0=<k>,
/// counting, harmonic, geometric, weighted:f=<expr>.
LscsmDescriptor lscsm_by_name(const std::string& name);

/// ‖A_n‖_{φ_α} for A_n = ⋃_i [2^i, 2^i(1+2^{-n})), in closed form.
Rational block_family_power_norm(unsigned n, unsigned alpha);

}  // namespace densitas
