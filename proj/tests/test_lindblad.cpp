#include <doctest.h>

#include <random>

#include "antibunch/errors.hpp"
#include "antibunch/lindblad.hpp"
#include "antibunch/states.hpp"
#include "oracles.hpp"

using namespace antibunch;

namespace {

// Column-stacked Liouvillian assembled from Kronecker products.
Matrix kron_liouvillian(const CavityModel& m) {
  const int n = m.hilbert_dim();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix& h = m.hamiltonian.matrix();
  Matrix L = -cplx(0.0, 1.0) * (oracle::kron(I, h) - oracle::kron(Matrix(h.transpose()), I));
  for (const auto& c : m.collapse_ops) {
    const Matrix& op = c.op.matrix();
    const Matrix cdc = op.adjoint() * op;
    L += c.rate * (oracle::kron(Matrix(op.conjugate()), op) - 0.5 * oracle::kron(I, cdc) -
                   0.5 * oracle::kron(Matrix(cdc.transpose()), I));
  }
  return L;
}

Matrix vec_to_mat(const Vector& v, int n) { return Eigen::Map<const Matrix>(v.data(), n, n); }

Matrix random_density(std::mt19937_64& rng, int n) {
  Matrix g(n, n);
  std::normal_distribution<double> d;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = {d(rng), d(rng)};
  Matrix rho = g * g.adjoint();
  return rho / rho.trace();
}

}  // namespace

TEST_CASE("model builders") {
  const CavityModel s = build_single_kerr(0.01, 0.1, 0.2, 10);
  CHECK(s.hilbert_dim() == 10);
  CHECK(s.collapse_ops.size() == 1);
  const CavityModel c = build_coupled_cavities(0.01, 6.2, 0.1, 0.2, 6, 7);
  CHECK(c.hilbert_dim() == 42);
  CHECK(c.collapse_ops.size() == 2);
  CHECK_THROWS_AS(build_single_kerr(0.01, 0.1, 0.0, 4), InvalidDimension);
  CHECK_THROWS_AS(build_coupled_cavities(0.01, 6.2, 0.1, 0.0, 4, 6), InvalidDimension);
}

TEST_CASE("Liouvillian action matches the Kronecker construction") {
  std::mt19937_64 rng(2);
  for (const CavityModel& m : {build_single_kerr(0.3, cplx(0.2, 0.1), -0.4, 8),
                               build_coupled_cavities(0.2, 1.5, 0.3, 0.1, 6, 6)}) {
    const Matrix ref = kron_liouvillian(m);
    CHECK((liouvillian_matrix(m) - ref).norm() < 1e-10 * ref.norm());
    const int n = m.hilbert_dim();
    const Matrix rho = random_density(rng, n);
    const Vector v = Eigen::Map<const Vector>(rho.data(), n * n);
    CHECK((apply_liouvillian(m, rho) - vec_to_mat(ref * v, n)).norm() < 1e-10);
    // trace preservation
    CHECK(std::abs(apply_liouvillian(m, rho).trace()) < 1e-12);
  }
}

TEST_CASE("linear cavity relaxes to a coherent state") {
  const cplx F(0.15, 0.05);
  const double Delta = 0.3;
  const CavityModel m = build_single_kerr(0.0, F, Delta, 14);
  const DensityMatrix rho = steady_state(m);
  const cplx alpha = -cplx(0.0, 1.0) * F / (0.5 + cplx(0.0, 1.0) * Delta);
  CHECK(fidelity(coherent(alpha, 14), rho) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(std::abs(expectation(rho, annihilation(14)) - alpha) < 1e-10);
  CHECK(g2_zero(rho, annihilation(14).matrix()) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("linear coupled cavities") {
  const cplx F = 0.2, i(0.0, 1.0);
  const double Delta = 0.4, J = 1.3;
  const CavityModel m = build_coupled_cavities(0.0, J, F, Delta, 8, 8);
  const DensityMatrix rho = steady_state(m);
  // 0 = -(i Delta + 1/2) a - i J b - i F,  0 = -(i Delta + 1/2) b - i J a
  const cplx z = i * Delta + 0.5;
  const cplx a = -i * F * z / (z * z + J * J);
  const cplx b = -i * J * a / z;
  const Matrix A = tensor(annihilation(8), identity(8)).op.matrix();
  const Matrix B = tensor(identity(8), annihilation(8)).op.matrix();
  CHECK(std::abs((rho.matrix() * A).trace() - a) < 1e-10);
  CHECK(std::abs((rho.matrix() * B).trace() - b) < 1e-10);
}

TEST_CASE("direct and Krylov steady states agree") {
  for (const CavityModel& m : {build_single_kerr(0.5, 0.3, 0.2, 10), build_coupled_cavities(0.01, 6.2, 0.1, 0.28, 6, 6),
                               build_coupled_cavities(0.5, 1.0, 0.4, -0.3, 7, 6)}) {
    const DensityMatrix d = steady_state(m, SteadyStateMethod::direct);
    const DensityMatrix k = steady_state(m, SteadyStateMethod::krylov);
    CHECK((d.matrix() - k.matrix()).norm() < 1e-10);
    CHECK(liouvillian_residual(m, d.matrix()) < 1e-10);
    CHECK(d.min_eigenvalue() > -1e-10);
  }
}

TEST_CASE("steady state errors") {
  CavityModel m = build_single_kerr(0.1, 0.1, 0.0, 8);
  m.collapse_ops.clear();
  CHECK_THROWS_AS(steady_state(m), NoUniqueSteadyState);
  m = build_single_kerr(0.1, 0.1, 0.0, 8);
  m.collapse_ops[0].rate = 0.0;
  CHECK_THROWS_AS(steady_state(m), NoUniqueSteadyState);
}

TEST_CASE("time evolution matches the exact propagator") {
  const CavityModel m = build_single_kerr(0.4, 0.3, 0.2, 8);
  const Matrix L = kron_liouvillian(m);
  Matrix rho0 = Matrix::Zero(8, 8);
  rho0(1, 1) = 1.0;
  const std::vector<double> times{0.0, 0.5, 2.0, 5.0};
  const auto rk = evolve(m, rho0, times);
  const auto prop = evolve_propagator(m, rho0, 0.5, 10);
  REQUIRE(rk.size() == times.size());
  REQUIRE(prop.size() == 11);
  const Vector v0 = Eigen::Map<const Vector>(rho0.data(), 64);
  for (std::size_t k = 0; k < times.size(); ++k) {
    const Matrix ref = vec_to_mat((L * times[k]).exp() * v0, 8);
    CHECK((rk[k] - ref).norm() < 1e-8);
  }
  CHECK((prop[4] - rk[2]).norm() < 1e-8);
  CHECK((prop[10] - rk[3]).norm() < 1e-8);
  // long times approach the steady state
  const auto late = evolve(m, rho0, {60.0});
  CHECK((late[0] - steady_state(m).matrix()).norm() < 1e-8);
}

TEST_CASE("two-time correlations") {
  // coherent light: g2(tau) = 1
  const CavityModel lin = build_single_kerr(0.0, 0.1, 0.1, 10);
  const CorrelationCurve flat = g2_tau(lin, std::nullopt, {0.0, 0.5, 1.0, 3.0});
  for (double g : flat.g2) CHECK(g == doctest::Approx(1.0).epsilon(1e-7));

  const CavityModel m = build_single_kerr(0.01, 0.1, 0.15, 12);
  const cplx beta(0.066, 0.16);
  std::vector<double> tau;
  for (int k = 0; k <= 40; ++k) tau.push_back(0.5 * k);
  const CorrelationCurve c = g2_tau(m, beta, tau);
  CHECK(std::abs(c.g2.front() - c.g2_static) < 1e-10);
  CHECK(std::abs(c.g2.back() - 1.0) < 1e-4);
  const Matrix d = measured_operator(m, beta);
  CHECK((d - (annihilation(12).matrix() + beta * Matrix::Identity(12, 12))).norm() < 1e-15);
  CHECK(c.g2_static == doctest::Approx(g2_zero(steady_state(m), d)).epsilon(1e-12));
}

TEST_CASE("tuner input validation") {
  TuneOptions o;
  o.free_params = {"bogus"};
  CHECK_THROWS_AS(tune_for_antibunching(CavityFamily::single, o), ConfigError);
  o.free_params = {"beta_amp"};
  CHECK_THROWS_AS(tune_for_antibunching(CavityFamily::coupled, o), ConfigError);
}

TEST_CASE("tuned single cavity with a pinned drive") {
  TuneOptions o;
  o.free_params = {"Delta", "beta_amp", "beta_phase"};
  o.F = 0.1;
  o.dim = 10;
  const TunedParameters t = tune_for_antibunching(CavityFamily::single, o);
  CHECK(t.beta.has_value());
  CHECK(t.g2_zero < 0.1);
  CHECK(std::abs(t.F - cplx(0.1)) < 1e-15);
  const CavityModel m = build_model(t);
  CHECK(g2_zero(steady_state(m), measured_operator(m, t.beta)) == doctest::Approx(t.g2_zero).epsilon(1e-10));
}
