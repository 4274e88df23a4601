#pragma once

#include <complex>
#include <functional>
#include <span>

#include <Eigen/Dense>

namespace antibunch {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Pure single-mode state. Entry n is the amplitude of |n>.
class FockVector {
 public:
  explicit FockVector(Vector amplitudes);

  static FockVector basis(int n, int dim);
  static FockVector vacuum(int dim) { return basis(0, dim); }

  int dim() const { return static_cast<int>(amps_.size()); }
  const Vector& amplitudes() const { return amps_; }
  cplx operator[](int n) const { return amps_[n]; }
  double norm() const { return amps_.norm(); }
  RealVector probabilities() const { return amps_.cwiseAbs2(); }
  std::span<const cplx> span() const { return {amps_.data(), static_cast<std::size_t>(amps_.size())}; }

  /// Copy padded with zeros (or cut) to a new dimension.
  FockVector resized(int dim) const;

 private:
  Vector amps_;
};

class OperatorMatrix {
 public:
  explicit OperatorMatrix(Matrix m);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& matrix() const { return m_; }
  OperatorMatrix adjoint() const { return OperatorMatrix(m_.adjoint()); }

  friend OperatorMatrix operator*(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator+(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator-(const OperatorMatrix& a, const OperatorMatrix& b);
  friend OperatorMatrix operator*(cplx s, const OperatorMatrix& a) {
    return OperatorMatrix(s * a.m_);
  }

 private:
  Matrix m_;
};

/// Pure two-mode state, flattened row-major over mode a: index = i * dim_b + j.
class TwoModeState {
 public:
  TwoModeState(Vector amplitudes, int dim_a, int dim_b);

  int dim_a() const { return dim_a_; }
  int dim_b() const { return dim_b_; }
  const Vector& amplitudes() const { return amps_; }
  cplx operator()(int i, int j) const { return amps_[i * dim_b_ + j]; }
  double norm() const { return amps_.norm(); }

  /// Photon-number distributions of the two modes.
  RealVector distribution_a() const;
  RealVector distribution_b() const;

 private:
  Vector amps_;
  int dim_a_;
  int dim_b_;
};

/// Operator on a two-mode space with its factor dimensions.
struct TwoModeOperator {
  OperatorMatrix op;
  int dim_a;
  int dim_b;
};

class DensityMatrix {
 public:
  /// Validates hermiticity and unit trace within 1e-10.
  explicit DensityMatrix(Matrix rho);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const Matrix& matrix() const { return rho_; }
  double min_eigenvalue() const;

 private:
  Matrix rho_;
};

OperatorMatrix annihilation(int dim);
OperatorMatrix creation(int dim);
OperatorMatrix number(int dim);
OperatorMatrix identity(int dim);

/// exp(G) for anti-Hermitian G, via the spectral decomposition of -iG.
Matrix expm_antihermitian(const Matrix& generator);

/// D(alpha) on the truncated space. Requires |alpha|^2 <= dim / 4.
OperatorMatrix displacement(cplx alpha, int dim);

/// S(xi) = exp((xi* a^2 - xi a^dag^2) / 2). Requires |xi| <= 1.5 and dim >= 20 (1 + |xi|).
OperatorMatrix squeeze(cplx xi, int dim);

FockVector normalize(const FockVector& v);
FockVector apply(const OperatorMatrix& op, const FockVector& v);

TwoModeState tensor(const FockVector& a, const FockVector& b);
TwoModeOperator tensor(const OperatorMatrix& a, const OperatorMatrix& b);

cplx expectation(const FockVector& v, const OperatorMatrix& op);
cplx expectation(const TwoModeState& s, const TwoModeOperator& op);
cplx expectation(const DensityMatrix& rho, const OperatorMatrix& op);

/// Reduced state of mode a (mode b traced out).
DensityMatrix partial_trace_a(const TwoModeState& s);
/// Reduced state of mode b (mode a traced out).
DensityMatrix partial_trace_b(const TwoModeState& s);

/// <psi| rho |psi> for a normalized pure state.
double fidelity(const FockVector& psi, const DensityMatrix& rho);

/// Throws TruncationError unless |alpha|^2 <= dim / 4.
void check_displacement_dim(cplx alpha, int dim);
/// Smallest dim accepted for a displacement of amplitude |alpha|.
int min_displacement_dim(double amplitude);

/// Starting truncation for a state of the given amplitude: max(16, ceil(8 (1 + |a|)^2)).
int default_dim(double amplitude);

struct ConvergedValue {
  int dim;
  double value;
  double relative_change;
};

/// Evaluates quantity(dim) and quantity(dim + 8), growing dim until the relative
/// change drops below rtol. Throws TruncationError when max_dim is exceeded.
ConvergedValue converge_dim(const std::function<double(int)>& quantity, int start_dim,
                            double rtol = 1e-8, int max_dim = 512);

}  // namespace antibunch
