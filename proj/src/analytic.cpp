#include "antibunch/analytic.hpp"

#include <cmath>
#include <numbers>

#include "antibunch/errors.hpp"

namespace antibunch {

EffectiveSplit effective_split(cplx alpha_a, cplx alpha_b, const BeamsplitterParams& p) {
  if (alpha_b == cplx(0.0)) throw DomainError("effective_split: alpha_b must be nonzero");
  const cplx alpha_b_prime = alpha_b * std::polar(1.0, p.phase());
  const cplx ratio = alpha_a / alpha_b_prime;
  const double t = std::sqrt(p.T());
  const double s = std::sqrt(p.R());
  return {ratio * t + s, t - ratio * s, alpha_b_prime};
}

double optimal_amplitude_k(double r) {
  if (!(r > 0.0)) throw DomainError("optimal_amplitude_k: r must be positive");
  return std::sqrt(std::sinh(r / 2) * std::sinh(r) / (std::exp(-1.5 * r) * std::expm1(r)));
}

VacuumSqueezingOptimum optimal_vacuum_squeezing_condition(double r, const BeamsplitterParams& p,
                                                          double Phi) {
  if (!(r > 0.0)) throw DomainError("optimal_vacuum_squeezing_condition: r must be positive");
  const double R = p.R(), T = p.T();
  if (R <= 0.0 || R >= 1.0) {
    throw DegenerateSplitter("optimal_vacuum_squeezing_condition: requires 0 < R < 1");
  }
  const double rp = r * std::sqrt(T);
  const double phi = std::acos(std::sqrt(T)) / 2 / std::numbers::pi - Phi;
  const double amp = std::exp(rp * std::sqrt(R / T)) / std::sqrt(R) *
                     std::sqrt(std::sinh(rp) * std::sinh(2 * rp) / (std::exp(-3 * rp) * std::expm1(2 * rp)));
  return {phi, amp};
}

}  // namespace antibunch
