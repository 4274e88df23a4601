#include "antibunch/beamsplitter.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "antibunch/errors.hpp"

namespace antibunch {

namespace {

// sqrt(C(n, k)) for 0 <= k <= n <= nmax, row-major lower triangle.
class SqrtBinomial {
 public:
  explicit SqrtBinomial(int nmax) : nmax_(nmax), table_((nmax + 1) * (nmax + 2) / 2) {
    for (int n = 0; n <= nmax; ++n) {
      double* row = &table_[offset(n)];
      row[0] = 1.0;
      for (int k = 1; k <= n; ++k) {
        row[k] = row[k - 1] * std::sqrt(static_cast<double>(n - k + 1) / static_cast<double>(k));
      }
    }
  }
  double operator()(int n, int k) const { return table_[offset(n) + k]; }

 private:
  static std::size_t offset(int n) { return static_cast<std::size_t>(n) * (n + 1) / 2; }
  int nmax_;
  std::vector<double> table_;
};

// Distributes (t a^dag - s b^dag)^n |0,0> / sqrt(n!) and e^{i chi m} (s a^dag + t b^dag)^m |0,0> / sqrt(m!)
// and multiplies the two polynomials in the normalized monomial basis.
TwoModeState mix_truncated(const Vector& c, int na, const Vector& d, int nb, const BeamsplitterParams& p) {
  const double t = std::sqrt(p.T());
  const double s = std::sqrt(p.R());
  const cplx rot = std::polar(1.0, p.phase());
  const int out_dim = na + nb - 1;
  const SqrtBinomial sqb(out_dim - 1);

  std::vector<double> tp(out_dim), sp(out_dim), msp(out_dim);
  tp[0] = sp[0] = msp[0] = 1.0;
  for (int k = 1; k < out_dim; ++k) {
    tp[k] = tp[k - 1] * t;
    sp[k] = sp[k - 1] * s;
    msp[k] = -msp[k - 1] * s;
  }

  // F[n][j]: amplitude of |j, n-j> from c_n; G[m][l]: amplitude of |l, m-l> from d_m.
  std::vector<std::vector<cplx>> F(na), G(nb);
  for (int n = 0; n < na; ++n) {
    F[n].resize(n + 1);
    for (int j = 0; j <= n; ++j) F[n][j] = c[n] * (sqb(n, j) * tp[j] * msp[n - j]);
  }
  cplx phase_m(1.0);
  for (int m = 0; m < nb; ++m) {
    G[m].resize(m + 1);
    const cplx dm = d[m] * phase_m;
    for (int l = 0; l <= m; ++l) G[m][l] = dm * (sqb(m, l) * sp[l] * tp[m - l]);
    phase_m *= rot;
  }

  Vector out = Vector::Zero(static_cast<Eigen::Index>(out_dim) * out_dim);
  for (int n = 0; n < na; ++n) {
    if (c[n] == cplx(0.0)) continue;
    for (int m = 0; m < nb; ++m) {
      if (d[m] == cplx(0.0)) continue;
      for (int j = 0; j <= n; ++j) {
        const cplx fj = F[n][j];
        const int kb = n - j;
        for (int l = 0; l <= m; ++l) {
          const int pa = j + l;
          const int qb = kb + m - l;
          out[pa * out_dim + qb] += fj * G[m][l] * (sqb(pa, j) * sqb(qb, kb));
        }
      }
    }
  }
  return TwoModeState(std::move(out), out_dim, out_dim);
}

// <a^dag^p a^q> for p, q <= 2, normalized by the state norm.
struct Moments {
  cplx m[3][3];
};

Moments moments(const Vector& c) {
  Moments out{};
  const Eigen::Index n = c.size();
  double norm2 = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) norm2 += std::norm(c[k]);
  if (!(norm2 > 0.0)) throw NonNormalizable("g2: zero input state");
  // f(k, p) = sqrt((k + p)! / k!)
  auto f = [](Eigen::Index k, int p) {
    double v = 1.0;
    for (int i = 1; i <= p; ++i) v *= std::sqrt(static_cast<double>(k + i));
    return v;
  };
  for (int p = 0; p <= 2; ++p) {
    for (int q = 0; q <= 2; ++q) {
      cplx acc(0.0);
      for (Eigen::Index k = 0; k + std::max(p, q) < n; ++k) {
        acc += std::conj(c[k + p]) * c[k + q] * (f(k, p) * f(k, q));
      }
      out.m[p][q] = acc / norm2;
    }
  }
  return out;
}

// Statistics of u a + v b for a product input state.
OutputStats stats_of_mode(const FockVector& a, const FockVector& b, cplx u, cplx v) {
  const Moments ma = moments(a.amplitudes());
  const Moments mb = moments(b.amplitudes());
  const cplx w1[2] = {v, u};
  const cplx w2[3] = {v * v, 2.0 * u * v, u * u};
  cplx first(0.0), second(0.0);
  for (int p = 0; p <= 1; ++p)
    for (int q = 0; q <= 1; ++q) first += std::conj(w1[p]) * w1[q] * ma.m[p][q] * mb.m[1 - p][1 - q];
  for (int p = 0; p <= 2; ++p)
    for (int q = 0; q <= 2; ++q) second += std::conj(w2[p]) * w2[q] * ma.m[p][q] * mb.m[2 - p][2 - q];
  const double mean = first.real();
  if (!(mean >= kIntensityFloor)) {
    throw UndefinedG2(fmt::format("g2: mean photon number {:.3g} below intensity floor 1e-12", mean), mean);
  }
  return {second.real() / (mean * mean), mean};
}

}  // namespace

BeamsplitterParams::BeamsplitterParams(double R, double phi) : R_(R), phi_(phi) {
  if (!(R >= 0.0 && R <= 1.0)) throw DomainError("beamsplitter: R must lie in [0, 1]");
  if (!std::isfinite(phi)) throw DomainError("beamsplitter: phi must be finite");
}

double BeamsplitterParams::phase() const { return phi_ * std::numbers::pi; }

TwoModeOperator bs_unitary(const BeamsplitterParams& p, int dim_a, int dim_b) {
  const OperatorMatrix a = annihilation(dim_a);
  const OperatorMatrix b = annihilation(dim_b);
  const double theta = std::acos(std::sqrt(p.T()));
  const Matrix adag_b = tensor(a.adjoint(), b).op.matrix();
  const Matrix gen = theta * (adag_b - adag_b.adjoint());
  Matrix v = expm_antihermitian(gen);
  Vector phases(static_cast<Eigen::Index>(dim_a) * dim_b);
  for (int i = 0; i < dim_a; ++i)
    for (int j = 0; j < dim_b; ++j) phases[i * dim_b + j] = std::polar(1.0, p.phase() * j);
  Matrix u = v * phases.asDiagonal();
  return {OperatorMatrix(std::move(u)), dim_a, dim_b};
}

TwoModeState mix(const FockVector& a, const FockVector& b, const BeamsplitterParams& p) {
  return mix_truncated(a.amplitudes(), a.dim(), b.amplitudes(), b.dim(), p);
}

OutputStats output_g2(const FockVector& a, const FockVector& b, const BeamsplitterParams& p) {
  return stats_of_mode(a, b, std::sqrt(p.T()), std::sqrt(p.R()) * std::polar(1.0, p.phase()));
}

OutputStats output_g2_b(const FockVector& a, const FockVector& b, const BeamsplitterParams& p) {
  return stats_of_mode(a, b, -std::sqrt(p.R()), std::sqrt(p.T()) * std::polar(1.0, p.phase()));
}

OutputStats stats_from_distribution(std::span<const double> p) {
  double total = 0.0, first = 0.0, second = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) {
    const double nn = static_cast<double>(n);
    total += p[n];
    first += nn * p[n];
    second += nn * (nn - 1.0) * p[n];
  }
  if (!(total > 0.0)) throw NonNormalizable("g2: zero state");
  const double mean = first / total;
  if (mean < kIntensityFloor) {
    throw UndefinedG2(fmt::format("g2: mean photon number {:.3g} below intensity floor 1e-12", mean), mean);
  }
  return {second * total / (first * first), mean};
}

double g2_from_coeffs(std::span<const cplx> c) {
  std::vector<double> p(c.size());
  for (std::size_t n = 0; n < c.size(); ++n) p[n] = std::norm(c[n]);
  return stats_from_distribution(p).g2;
}

}  // namespace antibunch
