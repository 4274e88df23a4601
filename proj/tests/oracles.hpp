#pragma once

// Reference computations written without the library's fast paths: dense
// operators, matrix exponentials and explicit tensor products.

#include <complex>
#include <numbers>
#include <random>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

inline Mat lowering(int dim) {
  Mat a = Mat::Zero(dim, dim);
  for (int n = 1; n < dim; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

inline Mat kron(const Mat& x, const Mat& y) {
  Mat out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j) out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

inline Vec kron(const Vec& x, const Vec& y) {
  Vec out(x.size() * y.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) out.segment(i * y.size(), y.size()) = x[i] * y;
  return out;
}

/// <a+ a+ a a> / <a+ a>^2 from operator matrices.
inline double g2_operator(const Vec& psi, const Mat& a) {
  const Mat ad = a.adjoint();
  const double n = (psi.adjoint() * ad * a * psi)(0).real();
  const double nn = (psi.adjoint() * ad * ad * a * a * psi)(0).real();
  return nn / (n * n);
}

inline double mean_operator(const Vec& psi, const Mat& op) { return (psi.adjoint() * op * psi)(0).real(); }

/// Beamsplitter unitary by matrix exponential on dims large enough to hold every
/// input photon, already in the (a, b) product basis.
inline Mat splitter(double R, double phi_pi, int dim) {
  const double theta = std::acos(std::sqrt(1.0 - R));
  const Mat a = kron(lowering(dim), Mat::Identity(dim, dim));
  const Mat b = kron(Mat::Identity(dim, dim), lowering(dim));
  const Mat gen = theta * (a.adjoint() * b - a * b.adjoint());
  const Mat rot = gen.exp();
  Vec phase(dim * dim);
  const Mat nb = b.adjoint() * b;
  for (int k = 0; k < dim * dim; ++k) phase[k] = std::polar(1.0, phi_pi * std::numbers::pi * nb(k, k).real());
  return rot * phase.asDiagonal();
}

/// Pads a single-mode vector with zeros.
inline Vec pad(const Vec& v, int dim) {
  Vec out = Vec::Zero(dim);
  out.head(v.size()) = v;
  return out;
}

/// Output g2 and <n> of mode a after the dense splitter, for inputs with at most
/// dim_a - 1 and dim_b - 1 photons.
inline std::pair<double, double> splitter_output(const Vec& in_a, const Vec& in_b, double R, double phi) {
  const int dim = static_cast<int>(in_a.size() + in_b.size() - 1);
  const Vec psi = splitter(R, phi, dim) * kron(pad(in_a, dim), pad(in_b, dim));
  const Mat a = kron(lowering(dim), Mat::Identity(dim, dim));
  return {g2_operator(psi, a), mean_operator(psi, a.adjoint() * a)};
}

inline Vec random_state(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = {g(rng), g(rng)};
  return v / v.norm();
}

/// exp(alpha a+ - conj(alpha) a) |0> on a large space, truncated to dim.
inline Vec coherent_by_expm(cplx alpha, int dim, int work_dim) {
  const Mat a = lowering(work_dim);
  const Mat gen = alpha * a.adjoint() - std::conj(alpha) * a;
  return gen.exp().col(0).head(dim);
}

/// exp((conj(xi) a^2 - xi a+^2) / 2) |0> on a large space, truncated to dim.
inline Vec squeezed_by_expm(cplx xi, int dim, int work_dim) {
  const Mat a = lowering(work_dim);
  const Mat gen = 0.5 * (std::conj(xi) * a * a - xi * a.adjoint() * a.adjoint());
  return gen.exp().col(0).head(dim);
}

}  // namespace oracle
