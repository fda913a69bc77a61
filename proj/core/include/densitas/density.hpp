#pragma once

#include "densitas/axioms.hpp"
#include "densitas/natset.hpp"
#include "densitas/weight.hpp"

#include <functional>
#include <set>
#include <string>
#include <vector>

namespace densitas {

struct ProfilePoint {
  Natural scale;
  Rational statistic;
};

struct DensityEstimate {
  ExtValue value;
  bool exact = true;
  std::vector<ProfilePoint> profile;  // empty when exact

  static DensityEstimate of(ExtValue v) { return DensityEstimate{v, v.is_exact() || v.is_infinite(), {}}; }
};

enum class Membership { in, out, unknown };
std::string_view to_string(Membership m);

/// A named set function with declared exactness per backend.
class SubmeasureDescriptor {
 public:
  using Evaluator = std::function<DensityEstimate(const NatSet&, const Settings&)>;

  SubmeasureDescriptor(std::string name, Evaluator evaluator, std::set<Backend> exact_backends, bool upper_density,
                       bool sigma_subadditive);

  const std::string& name() const { return name_; }
  const std::set<Backend>& exact_backends() const { return exact_backends_; }
  bool exact_on(Backend b) const { return exact_backends_.count(b) > 0; }
  bool is_upper_density() const { return upper_density_; }
  bool sigma_subadditive_claimed() const { return sigma_subadditive_; }

  DensityEstimate estimate(const NatSet& a, const Settings& s = Settings::defaults()) const {
    return evaluator_(a, s);
  }
  ExtValue operator()(const NatSet& a, const Settings& s = Settings::defaults()) const { return estimate(a, s).value; }

 private:
  std::string name_;
  Evaluator evaluator_;
  std::set<Backend> exact_backends_;
  bool upper_density_;
  bool sigma_subadditive_;
};

DensityEstimate upper_asymptotic(const NatSet& a, const Settings& s = Settings::defaults());
DensityEstimate upper_banach(const NatSet& a, const Settings& s = Settings::defaults());
ExtValue upper_buck(const NatSet& a, const Settings& s = Settings::defaults());
DensityEstimate weighted_upper(const NatSet& a, const WeightFunction& f, const Settings& s = Settings::defaults());
/// ν(A) = |A|.
ExtValue counting_measure(const NatSet& a);
/// ν(A) = Σ_{i∈A} 2^{-i-1}; exact while every modulus involved is at most 2^16.
ExtValue geometric_measure(const NatSet& a, const Settings& s = Settings::defaults());

/// Closed-form dyadic quantities shared with the exhaustive norms.
Rational dyadic_upper_density(const DyadicBlockSet& d);
Rational dyadic_block_limsup(const DyadicBlockSet& d);  // limsup |A∩I_n|/|I_n|
/// limsup of Σ_{i∈A∩[1,n]} i^α / Σ_{i=1}^n i^α for an eventually periodic fill rule.
Rational dyadic_power_limsup(const DyadicBlockSet& d, unsigned alpha);

ExtValue lower_dual(const SubmeasureDescriptor& nu, const NatSet& a, const Settings& s = Settings::defaults());
/// In iff both exact and equal; Out iff exact and different, or certified bounds separate.
Membership classify_domain(const ExtValue& upper, const ExtValue& lower);
Membership dom_membership(const SubmeasureDescriptor& nu, const NatSet& a, const Settings& s = Settings::defaults());

/// ν(∅)=0, monotonicity on nested pairs, subadditivity on pairs (consecutive samples).
AxiomReport check_submeasure_axioms(const SubmeasureDescriptor& nu, const std::vector<NatSet>& samples,
                                    const Settings& s = Settings::defaults());
/// (f1)-(f5) on every sample; pairs for (f2)/(f3) are consecutive samples.
AxiomReport check_upper_density_axioms(const SubmeasureDescriptor& nu, const std::vector<NatSet>& samples,
                                       const std::vector<std::uint64_t>& dilations,
                                       const std::vector<std::uint64_t>& shifts,
                                       const Settings& s = Settings::defaults());

SubmeasureDescriptor d_star();
SubmeasureDescriptor bd_star();
SubmeasureDescriptor buck();
SubmeasureDescriptor weighted(const std::string& expression);
SubmeasureDescriptor counting();
SubmeasureDescriptor geometric();

}  // namespace densitas
