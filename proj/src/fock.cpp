#include "antibunch/fock.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "antibunch/errors.hpp"

namespace antibunch {

namespace {

void require_dim(int dim, int min_dim, const char* what) {
  if (dim < min_dim) {
    throw InvalidDimension(std::string(what) + ": dimension " + std::to_string(dim) +
                           " is below " + std::to_string(min_dim));
  }
}

void require_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw InvalidDimension(std::string(what) + ": matrix must be square and non-empty");
  }
}

}  // namespace

FockVector::FockVector(Vector amplitudes) : amps_(std::move(amplitudes)) {
  if (amps_.size() == 0) throw InvalidDimension("FockVector: empty amplitude vector");
  if (!amps_.allFinite()) throw InvalidState("FockVector: non-finite amplitude");
}

FockVector FockVector::basis(int n, int dim) {
  require_dim(dim, 1, "FockVector::basis");
  if (n < 0 || n >= dim) throw InvalidDimension("FockVector::basis: level outside the space");
  Vector v = Vector::Zero(dim);
  v[n] = 1.0;
  return FockVector(std::move(v));
}

FockVector FockVector::resized(int dim) const {
  require_dim(dim, 1, "FockVector::resized");
  Vector v = Vector::Zero(dim);
  const int keep = std::min(dim, this->dim());
  v.head(keep) = amps_.head(keep);
  return FockVector(std::move(v));
}

OperatorMatrix::OperatorMatrix(Matrix m) : m_(std::move(m)) { require_square(m_, "OperatorMatrix"); }

OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("operator product: dimensions differ");
  return OperatorMatrix(a.m_ * b.m_);
}

OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("operator sum: dimensions differ");
  return OperatorMatrix(a.m_ + b.m_);
}

OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("operator difference: dimensions differ");
  return OperatorMatrix(a.m_ - b.m_);
}

TwoModeState::TwoModeState(Vector amplitudes, int dim_a, int dim_b)
    : amps_(std::move(amplitudes)), dim_a_(dim_a), dim_b_(dim_b) {
  require_dim(dim_a, 1, "TwoModeState");
  require_dim(dim_b, 1, "TwoModeState");
  if (amps_.size() != static_cast<Eigen::Index>(dim_a) * dim_b) {
    throw DimensionMismatch("TwoModeState: amplitude count does not match dim_a * dim_b");
  }
}

RealVector TwoModeState::distribution_a() const {
  RealVector p = RealVector::Zero(dim_a_);
  for (int i = 0; i < dim_a_; ++i) p[i] = amps_.segment(i * dim_b_, dim_b_).squaredNorm();
  return p;
}

RealVector TwoModeState::distribution_b() const {
  RealVector p = RealVector::Zero(dim_b_);
  for (int i = 0; i < dim_a_; ++i) p += amps_.segment(i * dim_b_, dim_b_).cwiseAbs2();
  return p;
}

DensityMatrix::DensityMatrix(Matrix rho) : rho_(std::move(rho)) {
  require_square(rho_, "DensityMatrix");
  const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10) throw InvalidState("DensityMatrix: not Hermitian");
  if (std::abs(rho_.trace() - 1.0) > 1e-10) throw InvalidState("DensityMatrix: trace differs from 1");
}

double DensityMatrix::min_eigenvalue() const {
  Matrix h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

OperatorMatrix annihilation(int dim) {
  require_dim(dim, 2, "annihilation");
  Matrix a = Matrix::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return OperatorMatrix(std::move(a));
}

OperatorMatrix creation(int dim) { return annihilation(dim).adjoint(); }

OperatorMatrix number(int dim) {
  require_dim(dim, 1, "number");
  Matrix m = Matrix::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) m(n, n) = static_cast<double>(n);
  return OperatorMatrix(std::move(m));
}

OperatorMatrix identity(int dim) {
  require_dim(dim, 1, "identity");
  return OperatorMatrix(Matrix::Identity(dim, dim));
}

Matrix expm_antihermitian(const Matrix& generator) {
  require_square(generator, "expm_antihermitian");
  const cplx i(0.0, 1.0);
  Matrix h = -i * generator;
  h = 0.5 * (h + h.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  Vector phases = (i * es.eigenvalues().cast<cplx>()).array().exp();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

int min_displacement_dim(double amplitude) {
  return std::max(2, static_cast<int>(std::ceil(4.0 * amplitude * amplitude - 1e-12)));
}

void check_displacement_dim(cplx alpha, int dim) {
  const double amp2 = std::norm(alpha);
  if (amp2 > dim / 4.0) {
    throw TruncationError("displacement: |alpha|^2 = " + std::to_string(amp2) +
                              " exceeds dim / 4 for dim " + std::to_string(dim),
                          std::max(min_displacement_dim(std::abs(alpha)), default_dim(std::abs(alpha))));
  }
}

OperatorMatrix displacement(cplx alpha, int dim) {
  require_dim(dim, 2, "displacement");
  check_displacement_dim(alpha, dim);
  const Matrix a = annihilation(dim).matrix();
  return OperatorMatrix(expm_antihermitian(alpha * a.adjoint() - std::conj(alpha) * a));
}

OperatorMatrix squeeze(cplx xi, int dim) {
  require_dim(dim, 2, "squeeze");
  const double r = std::abs(xi);
  if (r > 1.5) throw DomainError("squeeze: |xi| must not exceed 1.5");
  const int needed = static_cast<int>(std::ceil(20.0 * (1.0 + r) - 1e-12));
  if (dim < needed) {
    throw TruncationError("squeeze: dim " + std::to_string(dim) + " is below 20 (1 + |xi|)", needed);
  }
  const Matrix a = annihilation(dim).matrix();
  const Matrix a2 = a * a;
  return OperatorMatrix(expm_antihermitian(0.5 * (std::conj(xi) * a2 - xi * a2.adjoint())));
}

FockVector normalize(const FockVector& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) throw NonNormalizable("normalize: zero or non-finite norm");
  if (std::abs(n - 1.0) <= 4 * std::numeric_limits<double>::epsilon()) return v;
  return FockVector(v.amplitudes() / n);
}

FockVector apply(const OperatorMatrix& op, const FockVector& v) {
  if (op.dim() != v.dim()) throw DimensionMismatch("apply: operator and state dimensions differ");
  return FockVector(op.matrix() * v.amplitudes());
}

TwoModeState tensor(const FockVector& a, const FockVector& b) {
  Vector out(static_cast<Eigen::Index>(a.dim()) * b.dim());
  for (int i = 0; i < a.dim(); ++i) out.segment(i * b.dim(), b.dim()) = a[i] * b.amplitudes();
  return TwoModeState(std::move(out), a.dim(), b.dim());
}

TwoModeOperator tensor(const OperatorMatrix& a, const OperatorMatrix& b) {
  const int da = a.dim(), db = b.dim();
  Matrix out(da * db, da * db);
  for (int i = 0; i < da; ++i)
    for (int k = 0; k < da; ++k) out.block(i * db, k * db, db, db) = a.matrix()(i, k) * b.matrix();
  return {OperatorMatrix(std::move(out)), da, db};
}

cplx expectation(const FockVector& v, const OperatorMatrix& op) {
  if (op.dim() != v.dim()) throw DimensionMismatch("expectation: dimensions differ");
  return v.amplitudes().dot(op.matrix() * v.amplitudes());
}

cplx expectation(const TwoModeState& s, const TwoModeOperator& op) {
  if (op.dim_a != s.dim_a() || op.dim_b != s.dim_b()) {
    throw DimensionMismatch("expectation: two-mode dimensions differ");
  }
  return s.amplitudes().dot(op.op.matrix() * s.amplitudes());
}

cplx expectation(const DensityMatrix& rho, const OperatorMatrix& op) {
  if (op.dim() != rho.dim()) throw DimensionMismatch("expectation: dimensions differ");
  return (op.matrix() * rho.matrix()).trace();
}

DensityMatrix partial_trace_a(const TwoModeState& s) {
  const int da = s.dim_a(), db = s.dim_b();
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi(
      s.amplitudes().data(), da, db);
  Matrix rho = psi * psi.adjoint();
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw NonNormalizable("partial_trace_a: zero state");
  return DensityMatrix(rho / tr);
}

DensityMatrix partial_trace_b(const TwoModeState& s) {
  const int da = s.dim_a(), db = s.dim_b();
  Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> psi(
      s.amplitudes().data(), da, db);
  Matrix rho = psi.transpose() * psi.conjugate();
  const double tr = rho.trace().real();
  if (!(tr > 0.0)) throw NonNormalizable("partial_trace_b: zero state");
  return DensityMatrix(rho / tr);
}

double fidelity(const FockVector& psi, const DensityMatrix& rho) {
  if (psi.dim() != rho.dim()) throw DimensionMismatch("fidelity: dimensions differ");
  return psi.amplitudes().dot(rho.matrix() * psi.amplitudes()).real();
}

int default_dim(double amplitude) {
  const double a = std::abs(amplitude);
  return std::max(16, static_cast<int>(std::ceil(8.0 * (1.0 + a) * (1.0 + a) - 1e-12)));
}

ConvergedValue converge_dim(const std::function<double(int)>& quantity, int start_dim, double rtol,
                            int max_dim) {
  int dim = start_dim;
  double current = quantity(dim);
  while (dim + 8 <= max_dim) {
    const double next = quantity(dim + 8);
    const double scale = std::max(std::abs(next), std::numeric_limits<double>::min());
    const double change = std::abs(next - current) / scale;
    if (change < rtol) return {dim, current, change};
    dim += 8;
    current = next;
  }
  throw TruncationError("converge_dim: no convergence below dim " + std::to_string(max_dim), max_dim);
}

}  // namespace antibunch
