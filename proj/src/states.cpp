#include "antibunch/states.hpp"

#include <cmath>

#include "antibunch/errors.hpp"

namespace antibunch {

Vector coherent_amplitudes(cplx alpha, int dim) {
  if (dim < 1) throw InvalidDimension("coherent: dimension must be positive");
  Vector c(dim);
  c[0] = std::exp(-0.5 * std::norm(alpha));
  for (int n = 1; n < dim; ++n) c[n] = c[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  return c;
}

FockVector coherent(cplx alpha, int dim) {
  if (dim < 2) throw InvalidDimension("coherent: dimension must be at least 2");
  check_displacement_dim(alpha, dim);
  return normalize(FockVector(coherent_amplitudes(alpha, dim)));
}

FockVector phase_modified_coherent(cplx alpha, int dim) {
  if (dim < 3) throw InvalidDimension("phase_modified_coherent: dimension must be at least 3");
  check_displacement_dim(alpha, dim);
  Vector c = coherent_amplitudes(alpha, dim);
  c[2] *= cplx(0.0, 1.0);
  return normalize(FockVector(std::move(c)));
}

FockVector kerr_coherent(const KerrParams& p, int dim) {
  if (dim < 2) throw InvalidDimension("kerr_coherent: dimension must be at least 2");
  if (!std::isfinite(p.chi_t)) throw DomainError("kerr_coherent: chi_t must be finite");
  check_displacement_dim(p.alpha, dim);
  Vector c = coherent_amplitudes(p.alpha, dim);
  for (int n = 2; n < dim; ++n) {
    const double nn = static_cast<double>(n);
    c[n] *= std::polar(1.0, -p.chi_t * (nn * nn - nn));
  }
  return normalize(FockVector(std::move(c)));
}

FockVector vacuum_two_photon(double c2, int dim) {
  if (dim < 3) throw InvalidDimension("vacuum_two_photon: dimension must be at least 3");
  if (!(c2 >= 0.0 && c2 <= 1.0)) throw DomainError("vacuum_two_photon: c2 must lie in [0, 1]");
  Vector c = Vector::Zero(dim);
  c[0] = std::sqrt(1.0 - c2 * c2);
  c[2] = c2;
  return FockVector(std::move(c));
}

FockVector cat_state(const CatParams& p, int dim) {
  if (dim < 2) throw InvalidDimension("cat_state: dimension must be at least 2");
  if (p.parity == Parity::odd && std::abs(p.alpha_sch) == 0.0) {
    throw NonNormalizable("cat_state: odd cat with zero amplitude is the zero vector");
  }
  check_displacement_dim(p.alpha_sch, dim);
  Vector c = coherent_amplitudes(p.alpha_sch, dim);
  const int keep = p.parity == Parity::even ? 0 : 1;
  for (int n = 0; n < dim; ++n)
    if (n % 2 != keep) c[n] = 0.0;
  return normalize(FockVector(std::move(c)));
}

FockVector squeezed_vacuum(cplx xi, int dim) {
  const double r = std::abs(xi);
  if (r > 1.5) throw DomainError("squeezed_vacuum: |xi| must not exceed 1.5");
  const int needed = static_cast<int>(std::ceil(20.0 * (1.0 + r) - 1e-12));
  if (dim < needed) throw TruncationError("squeezed_vacuum: dim below 20 (1 + |xi|)", needed);
  const cplx ratio = -std::polar(std::tanh(r), std::arg(xi));
  Vector c = Vector::Zero(dim);
  c[0] = 1.0 / std::sqrt(std::cosh(r));
  for (int n = 0; 2 * n + 2 < dim; ++n) {
    const double k = static_cast<double>(n);
    c[2 * n + 2] = c[2 * n] * ratio * std::sqrt((2 * k + 2) * (2 * k + 1)) / (2 * (k + 1));
  }
  return normalize(FockVector(std::move(c)));
}

FockVector squeezed_coherent(cplx alpha, cplx xi, int dim) {
  FockVector sv = squeezed_vacuum(xi, dim);
  if (alpha == cplx(0.0)) return sv;
  return normalize(apply(displacement(alpha, dim), sv));
}

}  // namespace antibunch
