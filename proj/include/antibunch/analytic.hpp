#pragma once

#include "antibunch/beamsplitter.hpp"

namespace antibunch {

/// Two coherent displacements combined into a single displacement alpha_b' along
/// sqrt(R') A + sqrt(T') B. The phase is taken from the splitter parameters.
struct EffectiveSplit {
  cplx sqrt_r_prime;
  cplx sqrt_t_prime;
  cplx alpha_b_prime;
};

EffectiveSplit effective_split(cplx alpha_a, cplx alpha_b, const BeamsplitterParams& p);

/// Closed-form optimal displacement |k| for an amplitude-squeezed state.
double optimal_amplitude_k(double r);

struct VacuumSqueezingOptimum {
  double phi;      // units of pi
  double alpha_b;  // magnitude
};

/// Closed-form phase and coherent amplitude for squeezed vacuum in port a and a
/// coherent state of phase Phi (units of pi) in port b.
VacuumSqueezingOptimum optimal_vacuum_squeezing_condition(double r, const BeamsplitterParams& p,
                                                          double Phi = 0.0);

}  // namespace antibunch
