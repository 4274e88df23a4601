#pragma once

#include <optional>
#include <string>
#include <vector>

#include "antibunch/fock.hpp"
#include "antibunch/optimizer.hpp"

namespace antibunch {

enum class CavityFamily { single, coupled };

struct CollapseOp {
  OperatorMatrix op;
  double rate;
};

/// Driven cavity model in a frame rotating at the drive; energies and rates in units of gamma.
struct CavityModel {
  CavityFamily family;
  std::vector<int> dims;
  OperatorMatrix hamiltonian;
  std::vector<CollapseOp> collapse_ops;
  /// Annihilation operator of the measured (driven) cavity.
  OperatorMatrix monitored;
  cplx F;
  double Delta;
  double U;
  double J;

  int modes() const { return static_cast<int>(dims.size()); }
  int hilbert_dim() const { return hamiltonian.dim(); }
  /// Throws InvalidState for negative rates or a non-Hermitian Hamiltonian.
  void validate() const;
};

/// H = Delta a^dag a + U a^dag a^dag a a + F a^dag + F* a, one decay channel sqrt(gamma) a.
CavityModel build_single_kerr(double U, cplx F, double Delta, int dim = 12);

/// Two Kerr cavities with hopping J (a^dag b + b^dag a), drive on cavity a, both decaying at gamma.
CavityModel build_coupled_cavities(double U, double J, cplx F, double Delta, int dim_a = 12, int dim_b = 12);

/// L(rho) = -i[H, rho] + sum_k rate_k (c rho c^dag - {c^dag c, rho} / 2).
Matrix apply_liouvillian(const CavityModel& model, const Matrix& rho);

/// Dense superoperator on column-stacked density matrices.
Matrix liouvillian_matrix(const CavityModel& model);

enum class SteadyStateMethod {
  automatic,  // direct for small spaces, krylov otherwise
  direct,     // sparse LU of the vectorized Liouvillian with a trace row
  krylov      // GMRES preconditioned by the excitation-sector inverse of the undriven part
};

/// Throws NoUniqueSteadyState when there is no decay channel, the solve fails,
/// or the residual max|L(rho)| exceeds 1e-10.
DensityMatrix steady_state(const CavityModel& model, SteadyStateMethod method = SteadyStateMethod::automatic);

double liouvillian_residual(const CavityModel& model, const Matrix& rho);

struct EvolveOptions {
  double rtol = 1e-9;
  double atol = 1e-13;
  double initial_step = 1e-3;
  int max_steps = 10000000;
};

/// rho(t) at each requested time (non-decreasing, starting at t >= 0) by adaptive Dormand-Prince 5(4).
std::vector<Matrix> evolve(const CavityModel& model, const Matrix& rho0, const std::vector<double>& times,
                           const EvolveOptions& options = {});

/// Same by repeated application of exp(L dt) for a uniform grid of step dt.
std::vector<Matrix> evolve_propagator(const CavityModel& model, const Matrix& rho0, double dt, int steps);

struct CorrelationCurve {
  std::vector<double> tau;
  std::vector<double> g2;
  /// Tr(d^dag d^dag d d rho) / Tr(d^dag d rho)^2 from the steady state.
  double g2_static = 0.0;
  /// Tr(d^dag d rho).
  double intensity = 0.0;
};

/// Measured operator d = monitored + beta (beta = 0 when absent).
Matrix measured_operator(const CavityModel& model, std::optional<cplx> beta);

/// Regression-theorem g2(tau) for d = monitored + beta.
CorrelationCurve g2_tau(const CavityModel& model, std::optional<cplx> beta, const std::vector<double>& tau_grid,
                        const EvolveOptions& options = {});
CorrelationCurve g2_tau(const CavityModel& model, const DensityMatrix& rho_ss, std::optional<cplx> beta,
                        const std::vector<double>& tau_grid, const EvolveOptions& options = {});

/// Zero-delay value only.
double g2_zero(const DensityMatrix& rho_ss, const Matrix& d);

struct TuneOptions {
  double U = 0.01;
  double J = 6.2;
  /// Free parameters: F, Delta, beta_amp, beta_phase (single) or F, Delta (coupled).
  /// Empty selects all of the family's parameters.
  std::vector<std::string> free_params;
  double F = 0.1;
  double Delta = 0.0;
  /// Used only when beta is not free.
  cplx beta = 0.0;
  double F_min = 0.05;
  double F_max = 0.5;
  double Delta_min = -1.0;
  double Delta_max = 1.0;
  int dim = 12;
  /// Single cavity: penalize g2(tau) that decreases or exceeds 1 on [0, 40].
  bool require_monotone = true;
  RefineOptions refine{1e-5, 1e-12, 2000, 0.05};
};

struct TunedParameters {
  CavityFamily family;
  double U;
  double J;
  cplx F;
  double Delta;
  std::optional<cplx> beta;
  double g2_zero;
  int dim;
  int evaluations;
  bool converged;
  std::string warning;
};

TunedParameters tune_for_antibunching(CavityFamily family, const TuneOptions& options = {});

/// Model described by tuned parameters.
CavityModel build_model(const TunedParameters& t);

}  // namespace antibunch
