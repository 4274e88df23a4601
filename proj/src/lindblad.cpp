#include "antibunch/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>
#include <numeric>

#include <Eigen/Eigenvalues>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/MatrixFunctions>

#include "antibunch/errors.hpp"

namespace antibunch {

namespace {

using SpMat = Eigen::SparseMatrix<cplx>;
using Triplet = Eigen::Triplet<cplx>;

constexpr cplx kI(0.0, 1.0);

SpMat to_sparse(const Matrix& m) { return m.sparseView(cplx(0.0), 1e-300); }

// Sparse pieces of the Liouvillian: rho -> -i(Heff rho - rho Heff^dag) + sum c rho c^dag.
struct LiouvillianOps {
  SpMat heff;
  SpMat heff_adj;
  std::vector<SpMat> jumps;
  std::vector<SpMat> jumps_adj;

  explicit LiouvillianOps(const CavityModel& model) {
    Matrix h = model.hamiltonian.matrix();
    for (const auto& c : model.collapse_ops) {
      const Matrix cs = std::sqrt(c.rate) * c.op.matrix();
      h -= 0.5 * kI * (cs.adjoint() * cs);
      jumps.push_back(to_sparse(cs));
      jumps_adj.push_back(to_sparse(cs.adjoint()));
    }
    heff = to_sparse(h);
    heff_adj = to_sparse(h.adjoint());
  }

  void apply(const Matrix& rho, Matrix& out) const {
    out.noalias() = -kI * (heff * rho);
    out.noalias() += kI * (rho * heff_adj);
    for (std::size_t k = 0; k < jumps.size(); ++k) {
      out.noalias() += jumps[k] * (rho * jumps_adj[k]);
    }
  }

  Matrix apply(const Matrix& rho) const {
    Matrix out(rho.rows(), rho.cols());
    apply(rho, out);
    return out;
  }
};

void add_kron(std::vector<Triplet>& out, const SpMat& a, const SpMat& b, cplx scale) {
  const Eigen::Index nb = b.rows();
  for (int ka = 0; ka < a.outerSize(); ++ka)
    for (SpMat::InnerIterator ia(a, ka); ia; ++ia)
      for (int kb = 0; kb < b.outerSize(); ++kb)
        for (SpMat::InnerIterator ib(b, kb); ib; ++ib)
          out.emplace_back(ia.row() * nb + ib.row(), ia.col() * nb + ib.col(), scale * ia.value() * ib.value());
}

// Column-stacked superoperator: vec(A X B) = (B^T kron A) vec(X).
std::vector<Triplet> liouvillian_triplets(const CavityModel& model) {
  const int n = model.hilbert_dim();
  SpMat id(n, n);
  id.setIdentity();
  const Matrix hm = model.hamiltonian.matrix();
  const SpMat h = to_sparse(hm);
  const SpMat ht = to_sparse(hm.transpose());
  std::vector<Triplet> t;
  add_kron(t, id, h, -kI);
  add_kron(t, ht, id, kI);
  for (const auto& c : model.collapse_ops) {
    const Matrix cm = c.op.matrix();
    const Matrix cdc = cm.adjoint() * cm;
    add_kron(t, to_sparse(cm.conjugate()), to_sparse(cm), c.rate);
    add_kron(t, id, to_sparse(cdc), -0.5 * c.rate);
    add_kron(t, to_sparse(cdc.transpose()), id, -0.5 * c.rate);
  }
  return t;
}

Matrix hermitian_part(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

void require_decay(const CavityModel& model) {
  bool any = false;
  for (const auto& c : model.collapse_ops) any = any || c.rate > 0.0;
  if (!any) throw NoUniqueSteadyState("steady_state: model has no decay channel");
}

Matrix steady_state_direct(const CavityModel& model) {
  const int n = model.hilbert_dim();
  const Eigen::Index nn = static_cast<Eigen::Index>(n) * n;
  std::vector<Triplet> t;
  for (const auto& e : liouvillian_triplets(model))
    if (e.row() != 0) t.push_back(e);
  for (int k = 0; k < n; ++k) t.emplace_back(0, k * (n + 1), 1.0);
  SpMat L(nn, nn);
  L.setFromTriplets(t.begin(), t.end());
  L.makeCompressed();
  Eigen::SparseLU<SpMat> lu;
  lu.compute(L);
  if (lu.info() != Eigen::Success) throw NoUniqueSteadyState("steady_state: singular Liouvillian");
  Vector rhs = Vector::Zero(nn);
  rhs[0] = 1.0;
  Vector x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) throw NoUniqueSteadyState("steady_state: solve failed");
  return Eigen::Map<Matrix>(x.data(), n, n);
}

// Excitation-number sectors of the product basis, used to invert the undriven
// Liouvillian block by block.
class SectorSolver {
 public:
  static std::optional<SectorSolver> create(const CavityModel& model) {
    SectorSolver s;
    if (!s.init(model)) return std::nullopt;
    return s;
  }

  Matrix steady_state() const;

 private:
  bool init(const CavityModel& model);
  Matrix precondition(const Matrix& b) const;
  Matrix liouvillian(const Matrix& rho) const { return ops_->apply(rho); }

  int n_ = 0;
  std::vector<int> perm_;  // permuted index -> original index
  std::vector<int> off_, size_;
  std::vector<Matrix> vec_, vec_inv_;
  std::vector<Vector> eig_;
  // jump_[k][s]: block of channel k from sector s + 1 to sector s, scaled by sqrt(rate).
  std::vector<std::vector<Matrix>> jump_;
  std::shared_ptr<LiouvillianOps> ops_;
};

bool SectorSolver::init(const CavityModel& model) {
  n_ = model.hilbert_dim();
  std::vector<int> level(n_);
  if (model.modes() == 1) {
    std::iota(level.begin(), level.end(), 0);
  } else {
    const int db = model.dims[1];
    for (int k = 0; k < n_; ++k) level[k] = k / db + k % db;
  }
  perm_.resize(n_);
  std::iota(perm_.begin(), perm_.end(), 0);
  std::stable_sort(perm_.begin(), perm_.end(), [&](int a, int b) { return level[a] < level[b]; });
  if (level[perm_[0]] != 0) return false;

  auto permute = [&](const Matrix& m) {
    Matrix out(n_, n_);
    for (int r = 0; r < n_; ++r)
      for (int c = 0; c < n_; ++c) out(r, c) = m(perm_[r], perm_[c]);
    return out;
  };
  std::vector<int> plevel(n_);
  for (int k = 0; k < n_; ++k) plevel[k] = level[perm_[k]];
  const int sectors = plevel.back() + 1;
  off_.assign(sectors, 0);
  size_.assign(sectors, 0);
  for (int k = 0; k < n_; ++k) ++size_[plevel[k]];
  for (int s = 1; s < sectors; ++s) off_[s] = off_[s - 1] + size_[s - 1];
  if (size_[0] != 1) return false;

  const Matrix h = permute(model.hamiltonian.matrix());
  Matrix heff0 = Matrix::Zero(n_, n_);
  for (int r = 0; r < n_; ++r)
    for (int c = 0; c < n_; ++c)
      if (plevel[r] == plevel[c]) heff0(r, c) = h(r, c);

  CavityModel permuted = model;
  permuted.hamiltonian = OperatorMatrix(h);
  permuted.monitored = OperatorMatrix(permute(model.monitored.matrix()));
  jump_.clear();
  for (std::size_t k = 0; k < model.collapse_ops.size(); ++k) {
    const Matrix c = permute(model.collapse_ops[k].op.matrix());
    permuted.collapse_ops[k].op = OperatorMatrix(c);
    for (int r = 0; r < n_; ++r)
      for (int col = 0; col < n_; ++col)
        if (c(r, col) != cplx(0.0) && plevel[r] != plevel[col] - 1) return false;
    const Matrix cs = std::sqrt(model.collapse_ops[k].rate) * c;
    heff0 -= 0.5 * kI * (cs.adjoint() * cs);
    std::vector<Matrix> blocks(sectors);
    for (int s = 0; s + 1 < sectors; ++s) blocks[s] = cs.block(off_[s], off_[s + 1], size_[s], size_[s + 1]);
    jump_.push_back(std::move(blocks));
  }

  vec_.resize(sectors);
  vec_inv_.resize(sectors);
  eig_.resize(sectors);
  for (int s = 0; s < sectors; ++s) {
    const Matrix blk = heff0.block(off_[s], off_[s], size_[s], size_[s]);
    Eigen::ComplexEigenSolver<Matrix> es(blk);
    if (es.info() != Eigen::Success) return false;
    vec_[s] = es.eigenvectors();
    vec_inv_[s] = vec_[s].inverse();
    eig_[s] = es.eigenvalues();
    if (!vec_inv_[s].allFinite()) return false;
  }
  ops_ = std::make_shared<LiouvillianOps>(permuted);
  return true;
}

// Approximate inverse of L restricted to the undriven part: back-substitution over
// sector pairs (N, M), highest first along each diagonal N - M, with one Sylvester
// solve per block. The vacuum entry is fixed by requiring a traceless result.
Matrix SectorSolver::precondition(const Matrix& b) const {
  const int sectors = static_cast<int>(off_.size());
  Matrix x = Matrix::Zero(n_, n_);
  for (int d = -(sectors - 1); d <= sectors - 1; ++d) {
    for (int N = sectors - 1; N >= 0; --N) {
      const int M = N - d;
      if (M < 0 || M >= sectors) continue;
      Matrix rhs = b.block(off_[N], off_[M], size_[N], size_[M]);
      if (N + 1 < sectors && M + 1 < sectors) {
        const auto xn = x.block(off_[N + 1], off_[M + 1], size_[N + 1], size_[M + 1]);
        for (const auto& blocks : jump_) rhs -= blocks[N] * xn * blocks[M].adjoint();
      }
      // -i (H_N X - X H_M^dag) = rhs
      Matrix y = vec_inv_[N] * (kI * rhs) * vec_inv_[M].adjoint();
      for (int i = 0; i < size_[N]; ++i) {
        for (int j = 0; j < size_[M]; ++j) {
          const cplx den = eig_[N][i] - std::conj(eig_[M][j]);
          y(i, j) = std::abs(den) < 1e-13 ? cplx(0.0) : y(i, j) / den;
        }
      }
      x.block(off_[N], off_[M], size_[N], size_[M]) = vec_[N] * y * vec_[M].adjoint();
    }
  }
  x(0, 0) -= x.trace();
  return x;
}

// Restarted GMRES for L(P(y)) = -L(|0><0|); rho = |0><0| + P(y).
Matrix SectorSolver::steady_state() const {
  const Eigen::Index nn = static_cast<Eigen::Index>(n_) * n_;
  Matrix vac = Matrix::Zero(n_, n_);
  vac(0, 0) = 1.0;
  const Matrix bmat = -liouvillian(vac);
  const Vector b = Eigen::Map<const Vector>(bmat.data(), nn);
  const double bnorm = b.norm();
  if (bnorm == 0.0) return vac;

  auto op = [&](const Vector& v) {
    const Matrix m = liouvillian(precondition(Eigen::Map<const Matrix>(v.data(), n_, n_)));
    return Vector(Eigen::Map<const Vector>(m.data(), nn));
  };

  const int restart = 60;
  const int max_restarts = 40;
  const double tol = 1e-15 * bnorm;
  Vector x = Vector::Zero(nn);
  Vector r = b;
  for (int cycle = 0; cycle < max_restarts; ++cycle) {
    const double beta = r.norm();
    if (beta <= tol) break;
    std::vector<Vector> V;
    V.push_back(r / beta);
    Matrix H = Matrix::Zero(restart + 1, restart);
    std::vector<double> cs(restart);
    std::vector<cplx> sn(restart);
    Vector g = Vector::Zero(restart + 1);
    g[0] = beta;
    int j = 0;
    for (; j < restart; ++j) {
      Vector w = op(V[j]);
      for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i <= j; ++i) {
          const cplx hij = V[i].dot(w);
          H(i, j) += hij;
          w -= hij * V[i];
        }
      }
      const double hn = w.norm();
      H(j + 1, j) = hn;
      for (int i = 0; i < j; ++i) {
        const cplx a = H(i, j), c = H(i + 1, j);
        H(i, j) = cs[i] * a + sn[i] * c;
        H(i + 1, j) = -std::conj(sn[i]) * a + cs[i] * c;
      }
      const cplx a = H(j, j), c = H(j + 1, j);
      const double rr = std::hypot(std::abs(a), std::abs(c));
      if (rr == 0.0) break;
      if (std::abs(a) == 0.0) {
        cs[j] = 0.0;
        sn[j] = std::conj(c) / std::abs(c);
      } else {
        cs[j] = std::abs(a) / rr;
        sn[j] = (a / std::abs(a)) * std::conj(c) / rr;
      }
      H(j, j) = cs[j] * a + sn[j] * c;
      H(j + 1, j) = 0.0;
      g[j + 1] = -std::conj(sn[j]) * g[j];
      g[j] = cs[j] * g[j];
      if (std::abs(g[j + 1]) <= tol || hn == 0.0) {
        ++j;
        break;
      }
      V.push_back(w / hn);
    }
    const int m = std::min(j, restart);
    Vector yk = H.topLeftCorner(m, m).triangularView<Eigen::Upper>().solve(g.head(m));
    for (int i = 0; i < m; ++i) x += yk[i] * V[i];
    r = b - op(x);
  }
  Matrix rho = vac + precondition(Eigen::Map<const Matrix>(x.data(), n_, n_));
  Matrix out(n_, n_);
  for (int rr = 0; rr < n_; ++rr)
    for (int c = 0; c < n_; ++c) out(perm_[rr], perm_[c]) = rho(rr, c);
  return out;
}

Matrix kerr_term(const Matrix& a) {
  const Matrix ad = a.adjoint();
  return ad * ad * a * a;
}

double trace_product_real(const Matrix& a, const Matrix& rho) {
  return (a.transpose().cwiseProduct(rho)).sum().real();
}

}  // namespace

void CavityModel::validate() const {
  const Matrix& h = hamiltonian.matrix();
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw InvalidState("CavityModel: Hamiltonian not Hermitian");
  for (const auto& c : collapse_ops) {
    if (!(c.rate >= 0.0)) throw InvalidState("CavityModel: negative decay rate");
    if (c.op.dim() != hilbert_dim()) throw DimensionMismatch("CavityModel: collapse operator dimension");
  }
  int prod = 1;
  for (int d : dims) prod *= d;
  if (prod != hilbert_dim() || monitored.dim() != hilbert_dim()) {
    throw DimensionMismatch("CavityModel: mode dimensions do not match the Hamiltonian");
  }
}

CavityModel build_single_kerr(double U, cplx F, double Delta, int dim) {
  if (dim < 8) throw InvalidDimension("build_single_kerr: dim must be at least 8");
  const Matrix a = annihilation(dim).matrix();
  const Matrix ad = a.adjoint();
  Matrix h = Delta * (ad * a) + U * kerr_term(a) + F * ad + std::conj(F) * a;
  h = hermitian_part(h);
  CavityModel m{CavityFamily::single, {dim}, OperatorMatrix(h), {{OperatorMatrix(a), 1.0}},
                OperatorMatrix(a), F, Delta, U, 0.0};
  m.validate();
  return m;
}

CavityModel build_coupled_cavities(double U, double J, cplx F, double Delta, int dim_a, int dim_b) {
  if (dim_a < 6 || dim_b < 6) throw InvalidDimension("build_coupled_cavities: dims must be at least 6");
  const OperatorMatrix a1 = annihilation(dim_a), a2 = annihilation(dim_b);
  const Matrix a = tensor(a1, identity(dim_b)).op.matrix();
  const Matrix b = tensor(identity(dim_a), a2).op.matrix();
  const Matrix ad = a.adjoint(), bd = b.adjoint();
  Matrix h = Delta * (ad * a + bd * b) + U * (kerr_term(a) + kerr_term(b)) + J * (ad * b + bd * a) + F * ad +
             std::conj(F) * a;
  h = hermitian_part(h);
  CavityModel m{CavityFamily::coupled,
                {dim_a, dim_b},
                OperatorMatrix(h),
                {{OperatorMatrix(a), 1.0}, {OperatorMatrix(b), 1.0}},
                OperatorMatrix(a),
                F,
                Delta,
                U,
                J};
  m.validate();
  return m;
}

Matrix apply_liouvillian(const CavityModel& model, const Matrix& rho) {
  if (rho.rows() != model.hilbert_dim() || rho.cols() != model.hilbert_dim()) {
    throw DimensionMismatch("apply_liouvillian: density matrix dimension");
  }
  return LiouvillianOps(model).apply(rho);
}

Matrix liouvillian_matrix(const CavityModel& model) {
  const Eigen::Index nn = static_cast<Eigen::Index>(model.hilbert_dim()) * model.hilbert_dim();
  const auto t = liouvillian_triplets(model);
  SpMat L(nn, nn);
  L.setFromTriplets(t.begin(), t.end());
  return Matrix(L);
}

double liouvillian_residual(const CavityModel& model, const Matrix& rho) {
  return apply_liouvillian(model, rho).cwiseAbs().maxCoeff();
}

DensityMatrix steady_state(const CavityModel& model, SteadyStateMethod method) {
  model.validate();
  require_decay(model);
  const int n = model.hilbert_dim();
  if (method == SteadyStateMethod::automatic) {
    method = n <= 40 ? SteadyStateMethod::direct : SteadyStateMethod::krylov;
  }
  Matrix rho;
  if (method == SteadyStateMethod::krylov) {
    const auto solver = SectorSolver::create(model);
    rho = solver ? solver->steady_state() : steady_state_direct(model);
  } else {
    rho = steady_state_direct(model);
  }
  rho = hermitian_part(rho);
  rho /= rho.trace();
  const double res = liouvillian_residual(model, rho);
  if (!(res < 1e-10)) {
    throw NoUniqueSteadyState("steady_state: residual " + std::to_string(res) + " exceeds 1e-10");
  }
  return DensityMatrix(std::move(rho));
}

std::vector<Matrix> evolve(const CavityModel& model, const Matrix& rho0, const std::vector<double>& times,
                           const EvolveOptions& options) {
  const int n = model.hilbert_dim();
  if (rho0.rows() != n || rho0.cols() != n) throw DimensionMismatch("evolve: density matrix dimension");
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (!(times[k] >= 0.0) || (k > 0 && times[k] < times[k - 1])) {
      throw DomainError("evolve: times must be non-negative and non-decreasing");
    }
  }
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                          b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  const LiouvillianOps ops(model);
  std::vector<Matrix> out;
  out.reserve(times.size());
  Matrix y = rho0;
  Matrix k1(n, n), k2(n, n), k3(n, n), k4(n, n), k5(n, n), k6(n, n), k7(n, n), tmp(n, n), ynew(n, n);
  ops.apply(y, k1);
  double t = 0.0;
  double h = options.initial_step;
  int steps = 0;
  for (double target : times) {
    while (t < target) {
      if (++steps > options.max_steps) throw Error("evolve: step limit exceeded");
      const bool last = t + h >= target;
      const double hs = last ? target - t : h;
      tmp = y + hs * a21 * k1;
      ops.apply(tmp, k2);
      tmp = y + hs * (a31 * k1 + a32 * k2);
      ops.apply(tmp, k3);
      tmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
      ops.apply(tmp, k4);
      tmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      ops.apply(tmp, k5);
      tmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      ops.apply(tmp, k6);
      ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
      ops.apply(ynew, k7);
      tmp = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const auto scale = (options.atol + options.rtol * y.cwiseAbs().cwiseMax(ynew.cwiseAbs()).array());
      const double err = (tmp.cwiseAbs().array() / scale).maxCoeff();
      const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
      if (err <= 1.0) {
        t = last ? target : t + hs;
        y.swap(ynew);
        k1.swap(k7);
        if (!last || hs >= h) h = hs * factor;
      } else {
        h = hs * factor;
      }
    }
    out.push_back(y);
  }
  return out;
}

std::vector<Matrix> evolve_propagator(const CavityModel& model, const Matrix& rho0, double dt, int steps) {
  const int n = model.hilbert_dim();
  if (rho0.rows() != n || rho0.cols() != n) throw DimensionMismatch("evolve_propagator: density matrix dimension");
  const Matrix prop = (liouvillian_matrix(model) * dt).exp();
  std::vector<Matrix> out;
  Vector v = Eigen::Map<const Vector>(rho0.data(), static_cast<Eigen::Index>(n) * n);
  out.push_back(rho0);
  for (int k = 0; k < steps; ++k) {
    v = prop * v;
    out.push_back(Eigen::Map<Matrix>(v.data(), n, n));
  }
  return out;
}

Matrix measured_operator(const CavityModel& model, std::optional<cplx> beta) {
  Matrix d = model.monitored.matrix();
  if (beta) d += *beta * Matrix::Identity(d.rows(), d.cols());
  return d;
}

double g2_zero(const DensityMatrix& rho_ss, const Matrix& d) {
  const Matrix nd = d.adjoint() * d;
  const double n0 = trace_product_real(nd, rho_ss.matrix());
  if (!(n0 >= kIntensityFloor)) throw UndefinedG2("g2_zero: measured intensity below floor", n0);
  const Matrix dd = d * d;
  return trace_product_real(dd.adjoint() * dd, rho_ss.matrix()) / (n0 * n0);
}

CorrelationCurve g2_tau(const CavityModel& model, std::optional<cplx> beta, const std::vector<double>& tau_grid,
                        const EvolveOptions& options) {
  return g2_tau(model, steady_state(model), beta, tau_grid, options);
}

CorrelationCurve g2_tau(const CavityModel& model, const DensityMatrix& rho_ss, std::optional<cplx> beta,
                        const std::vector<double>& tau_grid, const EvolveOptions& options) {
  if (tau_grid.empty() || tau_grid.front() != 0.0) throw DomainError("g2_tau: tau grid must start at 0");
  for (std::size_t k = 1; k < tau_grid.size(); ++k)
    if (!(tau_grid[k] > tau_grid[k - 1])) throw DomainError("g2_tau: tau grid must be strictly increasing");
  const Matrix d = measured_operator(model, beta);
  const Matrix nd = d.adjoint() * d;
  CorrelationCurve curve;
  curve.tau = tau_grid;
  curve.intensity = trace_product_real(nd, rho_ss.matrix());
  curve.g2_static = g2_zero(rho_ss, d);
  const Matrix seed = d * rho_ss.matrix() * d.adjoint() / curve.intensity;
  for (const Matrix& rho : evolve(model, seed, tau_grid, options)) {
    curve.g2.push_back(trace_product_real(nd, rho) / curve.intensity);
  }
  return curve;
}

namespace {

struct TuneSetup {
  bool F = false, Delta = false, beta_amp = false, beta_phase = false;
};

TuneSetup parse_free(CavityFamily family, const std::vector<std::string>& names) {
  TuneSetup s;
  if (names.empty()) {
    s.F = s.Delta = true;
    s.beta_amp = s.beta_phase = family == CavityFamily::single;
    return s;
  }
  for (const auto& n : names) {
    if (n == "F") s.F = true;
    else if (n == "Delta") s.Delta = true;
    else if (n == "beta_amp" && family == CavityFamily::single) s.beta_amp = true;
    else if (n == "beta_phase" && family == CavityFamily::single) s.beta_phase = true;
    else throw ConfigError("tune_for_antibunching: unknown free parameter '" + n + "'");
  }
  return s;
}

// Sum of decreases plus excess above 1 along a uniform tau grid.
double monotonicity_violation(const std::vector<double>& g) {
  double v = 0.0;
  for (std::size_t k = 1; k < g.size(); ++k) v += std::max(0.0, g[k - 1] - g[k]);
  for (double x : g) v += std::max(0.0, x - 1.0);
  return v;
}

// Nondecreasing up to tol against the running maximum, never above 1 + tol.
bool monotone_within(const std::vector<double>& g, double tol) {
  double running = -std::numeric_limits<double>::infinity();
  for (double x : g) {
    if (x < running - tol || x > 1.0 + tol) return false;
    running = std::max(running, x);
  }
  return true;
}

std::vector<double> propagated_curve(const CavityModel& model, const DensityMatrix& rho, const Matrix& d,
                                     double dt, int steps) {
  const Matrix nd = d.adjoint() * d;
  const double n0 = trace_product_real(nd, rho.matrix());
  const Matrix seed = d * rho.matrix() * d.adjoint() / n0;
  std::vector<double> g;
  for (const Matrix& r : evolve_propagator(model, seed, dt, steps)) g.push_back(trace_product_real(nd, r) / n0);
  return g;
}

}  // namespace

CavityModel build_model(const TunedParameters& t) {
  if (t.family == CavityFamily::single) return build_single_kerr(t.U, t.F, t.Delta, t.dim);
  return build_coupled_cavities(t.U, t.J, t.F, t.Delta, t.dim, t.dim);
}

TunedParameters tune_for_antibunching(CavityFamily family, const TuneOptions& options) {
  const TuneSetup free = parse_free(family, options.free_params);
  const bool single = family == CavityFamily::single;
  const bool k_param = single && free.beta_amp && free.beta_phase;
  int evaluations = 0;

  std::vector<double> start, lower, upper;
  enum Slot { kF, kDelta, kBetaA, kBetaB };
  std::vector<Slot> slots;
  auto add = [&](Slot s, double x0, double lo, double hi) {
    slots.push_back(s);
    start.push_back(std::clamp(x0, lo, hi));
    lower.push_back(lo);
    upper.push_back(hi);
  };
  if (free.F) add(kF, options.F, options.F_min, options.F_max);
  if (free.Delta) add(kDelta, options.Delta, options.Delta_min, options.Delta_max);

  struct Point {
    double F, Delta;
    double ba, bb;  // k = <d> (re, im) when k_param, else beta amplitude and phase
  };
  Point base{options.F, options.Delta, std::abs(options.beta), std::arg(options.beta) / std::numbers::pi};
  if (k_param) base.ba = base.bb = 0.0;
  if (single && (free.beta_amp || free.beta_phase)) {
    if (k_param) {
      add(kBetaA, 0.0, -0.5, 0.5);
      add(kBetaB, 0.0, -0.5, 0.5);
    } else if (free.beta_amp) {
      add(kBetaA, base.ba, 0.0, 2.0);
    } else {
      add(kBetaB, base.bb, -1.0, 1.0);
    }
  }

  auto unpack = [&](const std::vector<double>& x) {
    Point p = base;
    for (std::size_t i = 0; i < x.size(); ++i) {
      switch (slots[i]) {
        case kF: p.F = x[i]; break;
        case kDelta: p.Delta = x[i]; break;
        case kBetaA: p.ba = x[i]; break;
        case kBetaB: p.bb = x[i]; break;
      }
    }
    return p;
  };

  struct Eval {
    double objective;
    double g2;
    std::optional<cplx> beta;
    std::vector<double> curve;
  };
  auto evaluate = [&](const Point& p) -> Eval {
    ++evaluations;
    const CavityModel model = single ? build_single_kerr(options.U, p.F, p.Delta, options.dim)
                                     : build_coupled_cavities(options.U, options.J, p.F, p.Delta, options.dim,
                                                              options.dim);
    const DensityMatrix rho = steady_state(model);
    std::optional<cplx> beta;
    if (single) {
      if (k_param) {
        const cplx mean_a = (model.monitored.matrix() * rho.matrix()).trace();
        beta = cplx(p.ba, p.bb) - mean_a;
      } else if (free.beta_amp || free.beta_phase) {
        beta = std::polar(p.ba, std::numbers::pi * p.bb);
      } else {
        beta = options.beta;
      }
    }
    const Matrix d = measured_operator(model, beta);
    const double g0 = g2_zero(rho, d);
    double obj = g0;
    std::vector<double> curve;
    if (single && options.require_monotone) {
      curve = propagated_curve(model, rho, d, 0.2, 200);
      obj += 10.0 * monotonicity_violation(curve);
    }
    return {obj, g0, beta, curve};
  };
  auto objective = [&](const std::vector<double>& x) {
    try {
      return evaluate(unpack(x)).objective;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // Coarse starting grid over Delta (both families) and over k (single).
  if (free.Delta) {
    const std::size_t i = std::find(slots.begin(), slots.end(), kDelta) - slots.begin();
    const int count = single ? 21 : 41;
    double best = objective(start);
    std::vector<double> best_x = start;
    for (int c = 0; c < count; ++c) {
      std::vector<double> x = start;
      x[i] = lower[i] + (upper[i] - lower[i]) * c / (count - 1);
      const double v = objective(x);
      if (v < best) {
        best = v;
        best_x = x;
      }
    }
    start = best_x;
  }
  if (k_param) {
    const std::size_t ia = std::find(slots.begin(), slots.end(), kBetaA) - slots.begin();
    const Point p = unpack(start);
    const CavityModel model = build_single_kerr(options.U, p.F, p.Delta, options.dim);
    const DensityMatrix rho = steady_state(model);
    const cplx mean_a = (model.monitored.matrix() * rho.matrix()).trace();
    double best = std::numeric_limits<double>::infinity();
    for (int u = -20; u <= 20; ++u) {
      for (int v = -20; v <= 20; ++v) {
        const cplx k(0.01 * u, 0.01 * v);
        try {
          const double g = g2_zero(rho, measured_operator(model, k - mean_a));
          if (g < best) {
            best = g;
            start[ia] = k.real();
            start[ia + 1] = k.imag();
          }
        } catch (const UndefinedG2&) {
        }
      }
    }
  }

  RefineResult ref = refine_min(objective, start, lower, upper, options.refine);
  const Point p = unpack(ref.argmin);
  const Eval e = evaluate(p);
  TunedParameters t{family, options.U, single ? 0.0 : options.J, cplx(p.F), p.Delta, e.beta, e.g2,
                    options.dim, evaluations, ref.converged, ref.warning};
  if (single && options.require_monotone && !monotone_within(e.curve, 1e-6)) {
    t.warning += (t.warning.empty() ? "" : "; ") + std::string("monotonicity constraint not satisfied");
  }
  return t;
}

}  // namespace antibunch
