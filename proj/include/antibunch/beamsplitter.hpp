#pragma once

#include <span>

#include "antibunch/fock.hpp"

namespace antibunch {

/// Lossless two-port splitter. phi is in units of pi; the physical phase is phi * pi.
class BeamsplitterParams {
 public:
  BeamsplitterParams(double R, double phi);

  double R() const { return R_; }
  double T() const { return 1.0 - R_; }
  double phi() const { return phi_; }
  double phase() const;

 private:
  double R_;
  double phi_;
};

/// Output operators: A = sqrt(T) a + sqrt(R) e^{i phi pi} b, B = -sqrt(R) a + sqrt(T) e^{i phi pi} b.
/// The returned unitary acts on the truncated product space.
TwoModeOperator bs_unitary(const BeamsplitterParams& p, int dim_a, int dim_b);

/// Exact output state. Both output modes have dimension dim_a + dim_b - 1, large
/// enough that no amplitude is lost.
TwoModeState mix(const FockVector& a, const FockVector& b, const BeamsplitterParams& p);

struct OutputStats {
  double g2;
  double n_mean;
};

/// Zero-delay correlation and mean photon number of output mode A.
OutputStats output_g2(const FockVector& a, const FockVector& b, const BeamsplitterParams& p);
/// Same for output mode B.
OutputStats output_g2_b(const FockVector& a, const FockVector& b, const BeamsplitterParams& p);

/// Mean photon number below which g2 is reported as undefined.
inline constexpr double kIntensityFloor = 1e-12;

/// g2 of a pure single-mode state given its Fock amplitudes.
double g2_from_coeffs(std::span<const cplx> c);

/// g2 and mean photon number from a photon-number distribution (any normalization).
OutputStats stats_from_distribution(std::span<const double> p);

}  // namespace antibunch
