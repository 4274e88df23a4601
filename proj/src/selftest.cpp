#include "antibunch/selftest.hpp"

#include <cmath>
#include <functional>
#include <random>

#include <fmt/format.h>

#include "antibunch/beamsplitter.hpp"
#include "antibunch/errors.hpp"
#include "antibunch/states.hpp"

namespace antibunch {

namespace {

CheckResult check(const std::string& name, double value, double tol) {
  const bool ok = std::isfinite(value) && value < tol;
  return {name, ok, fmt::format("max deviation {:.3e} (tolerance {:.0e})", value, tol)};
}

CheckResult guarded(const std::string& name, const std::function<CheckResult()>& body) {
  try {
    return body();
  } catch (const TruncationError& e) {
    return {name, false, fmt::format("truncation: {} (recommended dim {})", e.what(), e.recommended_dim())};
  } catch (const std::exception& e) {
    return {name, false, e.what()};
  }
}

FockVector random_state(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Vector v(dim);
  for (int k = 0; k < dim; ++k) v[k] = cplx(g(rng), g(rng));
  return normalize(FockVector(v));
}

}  // namespace

std::vector<CheckResult> run_selftest(std::optional<int> dim) {
  std::vector<CheckResult> out;
  const int d_disp = dim.value_or(24);

  out.push_back(guarded("displacement unitarity", [&] {
    const Matrix u = displacement(1.0, d_disp).matrix();
    const Matrix id = Matrix::Identity(u.rows(), u.cols());
    return check("displacement unitarity", (u.adjoint() * u - id).cwiseAbs().maxCoeff(), 1e-12);
  }));
  out.push_back(guarded("squeeze unitarity", [&] {
    const Matrix u = squeeze(cplx(0.3, 0.1), std::max(dim.value_or(30), 2)).matrix();
    const Matrix id = Matrix::Identity(u.rows(), u.cols());
    return check("squeeze unitarity", (u.adjoint() * u - id).cwiseAbs().maxCoeff(), 1e-12);
  }));
  out.push_back(guarded("state normalization", [&] {
    double dev = 0.0;
    for (const auto& s : {coherent(1.0, d_disp), phase_modified_coherent(1.0, d_disp),
                          kerr_coherent({1.0, 0.05}, d_disp), cat_state({1.0, Parity::odd}, d_disp),
                          vacuum_two_photon(0.3), squeezed_coherent(0.5, 0.2, std::max(d_disp, 24))}) {
      dev = std::max(dev, std::abs(s.norm() - 1.0));
    }
    return check("state normalization", dev, 1e-14);
  }));
  out.push_back(guarded("g2 formula vs operator", [&] {
    std::mt19937_64 rng(7);
    double dev = 0.0;
    for (int k = 0; k < 100; ++k) {
      const int d = 3 + k % 6;
      const FockVector s = random_state(rng, d);
      const Matrix a = annihilation(d).matrix();
      const Vector v = s.amplitudes();
      const double n1 = (a * v).squaredNorm();
      const double n2 = (a * a * v).squaredNorm();
      dev = std::max(dev, std::abs(g2_from_coeffs(s.span()) - n2 / (n1 * n1)));
    }
    return check("g2 formula vs operator", dev, 1e-12);
  }));
  out.push_back(guarded("HOM coincidence", [&] {
    const TwoModeState out = mix(FockVector::basis(1, 2), FockVector::basis(1, 2), {0.5, 0.0});
    return check("HOM coincidence", std::abs(out(1, 1)), 1e-10);
  }));
  out.push_back(guarded("energy conservation", [&] {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double dev = 0.0;
    for (int k = 0; k < 20; ++k) {
      const FockVector a = random_state(rng, 5), b = random_state(rng, 4);
      const TwoModeState s = mix(a, b, {u(rng), 2.0 * u(rng)});
      const RealVector pa = s.distribution_a(), pb = s.distribution_b();
      double out_n = 0.0, in_n = 0.0;
      for (int n = 0; n < pa.size(); ++n) out_n += n * (pa[n] + pb[n]);
      for (int n = 0; n < a.dim(); ++n) in_n += n * std::norm(a[n]);
      for (int n = 0; n < b.dim(); ++n) in_n += n * std::norm(b[n]);
      dev = std::max(dev, std::abs(out_n - in_n));
    }
    return check("energy conservation", dev, 1e-9);
  }));
  out.push_back(guarded("coherent baseline", [&] {
    double dev = 0.0;
    for (double r : {0.1, 0.5, 0.8})
      for (double phi : {0.0, 0.7, 1.3}) {
        const auto s = output_g2(coherent(cplx(0.8, 0.2), d_disp), coherent(0.5, d_disp), {r, phi});
        dev = std::max(dev, std::abs(s.g2 - 1.0));
      }
    return check("coherent baseline", dev, 1e-8);
  }));
  return out;
}

}  // namespace antibunch
