#pragma once

#include "antibunch/fock.hpp"

namespace antibunch {

struct KerrParams {
  cplx alpha;
  double chi_t;
};

enum class Parity { even, odd };

struct CatParams {
  cplx alpha_sch;
  Parity parity = Parity::even;
};

/// Truncated coherent state, renormalized after truncation.
FockVector coherent(cplx alpha, int dim);

/// Coherent state with the |2> amplitude multiplied by i.
FockVector phase_modified_coherent(cplx alpha, int dim);

/// Coherent state after Kerr evolution: c_n -> c_n exp(-i chi_t (n^2 - n)).
FockVector kerr_coherent(const KerrParams& p, int dim);

/// sqrt(1 - c2^2)|0> + c2|2>, c2 in [0, 1].
FockVector vacuum_two_photon(double c2, int dim = 3);

/// N(|a> +/- |-a>), normalized exactly in the truncated space.
FockVector cat_state(const CatParams& p, int dim);

/// S(xi)|0> from its closed-form series, renormalized after truncation.
FockVector squeezed_vacuum(cplx xi, int dim);

/// D(alpha) S(xi)|0>.
FockVector squeezed_coherent(cplx alpha, cplx xi, int dim);

/// Truncated coherent amplitudes without renormalization.
Vector coherent_amplitudes(cplx alpha, int dim);

}  // namespace antibunch
