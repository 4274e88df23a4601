// Acceptance checks, one PASS/FAIL line per criterion. Exit status is nonzero
// when any criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "antibunch/analytic.hpp"
#include "antibunch/beamsplitter.hpp"
#include "antibunch/errors.hpp"
#include "antibunch/lindblad.hpp"
#include "antibunch/optimizer.hpp"
#include "antibunch/pipelines.hpp"
#include "antibunch/states.hpp"
#include "oracles.hpp"

using namespace antibunch;

namespace {

struct Outcome {
  bool passed;
  std::string detail;
};

// Headline numbers recomputed at a larger truncation for the convergence criterion.
struct Headline {
  std::string label;
  std::function<double(int extra)> value;
};
std::vector<Headline> headlines;

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

void add_objective_headline(const std::string& label, const std::string& objective, const Params& at) {
  headlines.push_back({label, [objective, at](int extra) {
                         Params p = at;
                         if (extra > 0) {
                           const auto [da, db] = objective_dims(objective, at);
                           p["dim"] = std::max(da, db) + extra;
                         }
                         return make_objective(objective)(p).g2;
                       }});
}

// Grid sweep followed by refinement from the lowest grid local minima.
ParamRefinement grid_then_refine(const std::string& objective, const std::vector<Axis>& axes, const Params& fixed) {
  const Objective f = make_objective(objective);
  const SweepResult g = sweep(SweepSpec{axes, objective, fixed}, f);
  return refine_from_grid(f, g);
}

Outcome c1_formula() {
  std::mt19937_64 rng(20240101);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int dim = 2 + t % 7;
    const Vector v = oracle::random_state(rng, dim);
    const FockVector s(v);
    worst = std::max(worst, std::abs(g2_from_coeffs(s.span()) - oracle::g2_operator(v, oracle::lowering(dim))));
  }
  return {worst < 1e-12, fmt::format("max |coeff - operator| = {:.2e} over 100 states", worst)};
}

Outcome c2_beamsplitter() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> uni(0.0, 1.0);

  double relation = 0.0;
  const int d = 8;
  for (int t = 0; t < 5; ++t) {
    const BeamsplitterParams p(uni(rng), 2 * uni(rng));
    const Matrix u = bs_unitary(p, d, d).op.matrix();
    const Matrix a = tensor(annihilation(d), identity(d)).op.matrix();
    const Matrix b = tensor(identity(d), annihilation(d)).op.matrix();
    Matrix low = Matrix::Zero(d * d, d * d);
    for (int i = 0; i < d; ++i)
      for (int j = 0; j + i <= d - 2; ++j) low(i * d + j, i * d + j) = 1.0;
    const cplx e = std::polar(1.0, p.phase());
    const Matrix A = std::sqrt(p.T()) * a + std::sqrt(p.R()) * e * b;
    const Matrix B = -std::sqrt(p.R()) * a + std::sqrt(p.T()) * e * b;
    relation = std::max({relation, ((u.adjoint() * a * u - A) * low).cwiseAbs().maxCoeff(),
                         ((u.adjoint() * b * u - B) * low).cwiseAbs().maxCoeff()});
  }

  double energy = 0.0;
  for (int t = 0; t < 50; ++t) {
    const Vector x = oracle::random_state(rng, 2 + t % 6), y = oracle::random_state(rng, 2 + (t / 6) % 6);
    const TwoModeState out = mix(FockVector(x), FockVector(y), BeamsplitterParams(uni(rng), 2 * uni(rng)));
    auto mean = [](const RealVector& p) { return (p.array() * Eigen::ArrayXd::LinSpaced(p.size(), 0, p.size() - 1)).sum(); };
    const double before = mean(x.cwiseAbs2()) + mean(y.cwiseAbs2());
    const double after = mean(out.distribution_a()) + mean(out.distribution_b());
    energy = std::max(energy, std::abs(before - after));
  }

  const FockVector one = FockVector::basis(1, 2);
  const double hom = std::norm(mix(one, one, BeamsplitterParams(0.5, 0.0))(1, 1));
  return {relation < 1e-9 && energy < 1e-9 && hom < 1e-10,
          fmt::format("relation residual {:.2e}, energy drift {:.2e}, HOM P(1,1) {:.2e}", relation, energy, hom)};
}

Outcome c3_coherent() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const cplx aa = std::polar(1.5 * uni(rng), 2 * std::numbers::pi * uni(rng));
    const cplx ab = std::polar(1.5 * uni(rng), 2 * std::numbers::pi * uni(rng));
    const BeamsplitterParams p(0.02 + 0.96 * uni(rng), 2 * uni(rng));
    const OutputStats s =
        output_g2(coherent(aa, default_dim(std::abs(aa))), coherent(ab, default_dim(std::abs(ab))), p);
    worst = std::max(worst, std::abs(s.g2 - 1.0));
  }
  return {worst < 1e-8, fmt::format("max |g2 - 1| = {:.2e} over 20 draws", worst)};
}

Outcome c4_kerr() {
  const auto t0 = std::chrono::steady_clock::now();
  const Params fixed{{"alpha", 0.3}, {"chi_t", 0.05}};
  const ParamRefinement r = grid_then_refine("kerr", {{"R", 0.0, 1.0, 101}, {"phi", 0.0, 2.0, 101}}, fixed);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  add_objective_headline("kerr min g2", "kerr", r.argmin);
  const bool ok = r.stats.g2 <= 0.05 && r.stats.n_mean >= 0.003 && r.stats.n_mean <= 0.012 && secs < 120;
  return {ok, fmt::format("min g2 {:.4f} at R {:.4f}, phi {:.4f} pi, <n_A> {:.5f}, {:.2f} s", r.stats.g2,
                          r.argmin.at("R"), r.argmin.at("phi"), r.stats.n_mean, secs)};
}

Outcome c5_scan() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto curve = min_curve(make_objective("kerr"), {"alpha", 0.02, 0.5, 25},
                               {{"R", 0.0, 1.0, 101}, {"phi", 0.0, 2.0, 101}}, {{"chi_t", 0.05}});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  bool below_half = true, below_001 = true;
  double worst_half = 0.0, worst_small = 0.0, n_at_02 = 0.0;
  for (const auto& c : curve) {
    if (!c.defined) below_half = false;
    worst_half = std::max(worst_half, c.g2);
    if (c.g2 >= 0.5) below_half = false;
    if (c.scan_value <= 0.2 + 1e-12) {
      worst_small = std::max(worst_small, c.g2);
      if (c.g2 >= 0.01) below_001 = false;
      n_at_02 = c.n_mean;
      add_objective_headline(fmt::format("kerr scan alpha {:.2f}", c.scan_value), "kerr", c.argmin);
    }
  }
  add_objective_headline("kerr scan alpha 0.50", "kerr", curve.back().argmin);
  const bool n_ok = n_at_02 >= 0.0015 && n_at_02 <= 0.0045;
  return {below_half && below_001 && n_ok && secs < 600,
          fmt::format("max min-g2 {:.4f} (alpha <= 0.5), {:.5f} (alpha <= 0.2), <n_A> at alpha 0.2 {:.5f}, {:.1f} s",
                      worst_half, worst_small, n_at_02, secs)};
}

Outcome c6_two_photon() {
  const double input = g2_from_coeffs(vacuum_two_photon(0.1).span());
  const ParamRefinement r =
      grid_then_refine("two_photon", {{"alpha_b", 0.01, 1.5, 101}, {"phi", 0.0, 2.0, 101}}, {{"c2", 0.1}, {"R", 0.5}});
  add_objective_headline("two-photon output g2", "two_photon", r.argmin);

  // Brute-force oracle: dense splitter unitary, coherent state by matrix exponential.
  const Vector psi = vacuum_two_photon(0.1).amplitudes().head(3);
  const int db = 18;
  const int d = 3 + db - 1;
  std::vector<Vector> coherent_inputs;
  for (int i = 1; i <= 300; ++i) {
    const Vector coh = oracle::coherent_by_expm(0.005 * i, db, 60);
    coherent_inputs.push_back(oracle::pad(coh / coh.norm(), d));
  }
  const Vector a_in = oracle::pad(psi, d);
  const oracle::Mat mode_a = oracle::kron(oracle::lowering(d), oracle::Mat::Identity(d, d));
  // the splitter phase only multiplies |n> of mode b by e^{i n phi pi}
  const oracle::Mat rotation = oracle::splitter(0.5, 0.0, d);
  double best = 1e300;
  for (int k = 0; k <= 80; ++k) {
    const double phi = 2.0 * k / 80;
    Vector phase(d);
    for (int n = 0; n < d; ++n) phase[n] = std::polar(1.0, phi * std::numbers::pi * n);
    for (const Vector& coh : coherent_inputs) {
      const Vector out = rotation * oracle::kron(a_in, Vector(phase.cwiseProduct(coh)));
      const Vector once = mode_a * out, twice = mode_a * once;
      best = std::min(best, twice.squaredNorm() / std::pow(once.squaredNorm(), 2));
    }
  }
  const double dev = rel(r.stats.g2, best);
  return {r.stats.g2 <= 0.5 && std::abs(input - 50.0) < 1e-12 && dev <= 0.05,
          fmt::format("input g2 {:.12g}, optimized output {:.4f} at alpha {:.4f}, phi {:.4f} pi; "
                      "oracle scan {:.4f} (deviation {:.2f}%)",
                      input, r.stats.g2, r.argmin.at("alpha_b"), r.argmin.at("phi"), best, 100 * dev)};
}

Outcome c7_cat() {
  const Params base{{"alpha_b", 0.04}, {"R", 0.5}, {"phi", 0.5}};
  const ParamRefinement r = grid_then_refine("cat", {{"alpha_sch", 0.005, 0.5, 100}}, base);
  const double target = std::sqrt(0.04) / 2.0;
  const double where = r.argmin.at("alpha_sch");
  add_objective_headline("cat min g2", "cat", r.argmin);
  const bool located = std::abs(where - target) / target <= 0.2;

  // bunching for alpha_sch < alpha, antibunching for alpha_sch > alpha
  const Objective f = make_objective("cat");
  int flips = 0;
  std::string samples;
  for (double a : {0.1, 0.2, 0.3}) {
    Params lo = base, hi = base;
    lo["alpha_b"] = hi["alpha_b"] = a;
    lo["alpha_sch"] = 0.7 * a;
    hi["alpha_sch"] = 1.3 * a;
    const double glo = f(lo).g2, ghi = f(hi).g2;
    if (glo > 1.0 && ghi < 1.0) ++flips;
    samples += fmt::format(" alpha {:.1f}: g2({:.2f}) {:.3f}, g2({:.2f}) {:.3f};", a, 0.7 * a, glo, 1.3 * a, ghi);
  }
  return {located && flips == 3,
          fmt::format("argmin alpha_sch {:.4f} vs sqrt(alpha)/2 = {:.4f} (g2 {:.3e}); "
                      "bunching below / antibunching above the diagonal at {}/3 points:{}",
                      where, target, r.stats.g2, flips, samples)};
}

Outcome c8_squeezed() {
  const double rr = 0.05;
  const BeamsplitterParams bs(0.1, 0.0);
  const auto pred = optimal_vacuum_squeezing_condition(rr, bs);
  const Params base{{"r", rr}, {"omega", 0.0}, {"alpha_a", 0.0}, {"Phi", 0.0}, {"R", 0.1}};
  const Objective f = make_objective("squeezed");
  auto g2_at = [&](double phi, double ab) {
    Params p = base;
    p["phi"] = phi;
    p["alpha_b"] = ab;
    return f(p).g2;
  };
  const double at_pred = g2_at(pred.phi, pred.alpha_b);
  double lowest = at_pred;
  for (int i = -10; i <= 10; ++i)
    for (int j = -10; j <= 10; ++j) lowest = std::min(lowest, g2_at(pred.phi * (1 + 0.01 * i), pred.alpha_b * (1 + 0.01 * j)));
  const bool local = lowest >= at_pred - 1e-12 * std::abs(at_pred);

  const ParamRefinement num = grid_then_refine("squeezed", {{"phi", 0.0, 2.0, 201}, {"alpha_b", 0.01, 3.0, 300}}, base);
  add_objective_headline("squeezed optimum g2", "squeezed", num.argmin);
  const double phi_num = num.argmin.at("phi"), ab_num = num.argmin.at("alpha_b");
  // phase compared on the circle, relative to the predicted value
  double dphi = std::fmod(std::abs(phi_num - pred.phi), 2.0);
  dphi = std::min(dphi, 2.0 - dphi);
  const double dev_phi = dphi / std::abs(pred.phi);
  const double dev_ab = rel(ab_num, pred.alpha_b);
  return {local && dev_phi <= 0.05 && dev_ab <= 0.05,
          fmt::format("predicted phi {:.4f} pi, alpha_b {:.4f} (g2 {:.4f}); lowest g2 within +-10% {:.4f}; "
                      "numeric optimum phi {:.4f} pi, alpha_b {:.4f} (g2 {:.4f}); deviations phi {:.1f}%, alpha_b {:.1f}%",
                      pred.phi, pred.alpha_b, at_pred, lowest, phi_num, ab_num, num.stats.g2, 100 * dev_phi,
                      100 * dev_ab)};
}

Outcome c9_fig6() {
  const Params fixed{{"R", 0.1}, {"phi", 1.0}, {"omega", 0.0}, {"alpha_a", 0.0}, {"Phi", 0.0}};
  const std::vector<Axis> axes{{"r", 0.01, 0.3, 101}, {"alpha_b", 0.02, 3.0, 101}};
  const SweepResult g = sweep(SweepSpec{axes, "squeezed", fixed}, make_objective("squeezed"));
  double worst = 0.0, worst_r = 0.0, worst_a = 0.0;
  for (std::size_t i = 0; i < g.cells.size(); ++i) {
    const Params p = g.params_at(i);
    if (p.at("alpha_b") < 2.0 || g.cells[i].status != CellStatus::ok) continue;
    const double dev = std::abs(g.cells[i].g2 - 1.0);
    if (dev > worst) {
      worst = dev;
      worst_r = p.at("r");
      worst_a = p.at("alpha_b");
    }
  }
  const bool limit = worst <= 0.1;
  const bool smallest_r = g.has_min && g.argmin.at("r") == axes[0].min;
  Params at = g.argmin;
  add_objective_headline("fig6 grid min g2", "squeezed", at);
  return {limit && smallest_r,
          fmt::format("max |g2 - 1| for alpha_b >= 2: {:.3f} (at r {:.3f}, alpha_b {:.2f}); grid min {:.4f} at r {:.3f}, "
                      "alpha_b {:.3f}",
                      worst, worst_r, worst_a, g.min_value, g.argmin.at("r"), g.argmin.at("alpha_b"))};
}

Outcome c10_blockade() {
  const auto t0 = std::chrono::steady_clock::now();
  TuneOptions so;
  so.free_params = {"F", "Delta", "beta_amp", "beta_phase"};
  TuneOptions co;
  co.free_params = {"F", "Delta"};
  co.F_min = 0.01;
  const TunedParameters ts = tune_for_antibunching(CavityFamily::single, so);
  const TunedParameters tc = tune_for_antibunching(CavityFamily::coupled, co);
  std::vector<double> tau;
  for (int k = 0; k <= 400; ++k) tau.push_back(0.05 * k);
  const CavityModel ms = build_model(ts), mc = build_model(tc);
  const CorrelationCurve cs = g2_tau(ms, ts.beta, tau);
  const CorrelationCurve cc = g2_tau(mc, std::nullopt, tau);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  // nondecreasing with the same 1e-6 allowance as the ceiling, measured from the running maximum
  bool monotone = true;
  double above = -1e300, running = -1e300, drop = 0.0;
  for (std::size_t k = 0; k < tau.size(); ++k) {
    drop = std::max(drop, running - cs.g2[k]);
    running = std::max(running, cs.g2[k]);
    above = std::max(above, cs.g2[k] - 1.0);
  }
  if (drop > 1e-6) monotone = false;
  int crossings = 0;
  for (std::size_t k = 1; k < tau.size() && tau[k] <= 5.0 + 1e-12; ++k) {
    if ((cc.g2[k - 1] - 1.0) * (cc.g2[k] - 1.0) < 0.0) ++crossings;
  }
  const double end = cc.g2.back();
  const double consistency = std::max(std::abs(cs.g2.front() - cs.g2_static), std::abs(cc.g2.front() - cc.g2_static));

  headlines.push_back({"single cavity g2(0)", [ts](int extra) {
                         TunedParameters t = ts;
                         t.dim += extra;
                         const CavityModel m = build_model(t);
                         return g2_zero(steady_state(m), measured_operator(m, t.beta));
                       }});
  headlines.push_back({"coupled cavities g2(0)", [tc](int extra) {
                         TunedParameters t = tc;
                         t.dim += extra;
                         const CavityModel m = build_model(t);
                         return g2_zero(steady_state(m), m.monitored.matrix());
                       }});

  const bool ok = cs.g2.front() < 0.1 && monotone && above <= 1e-6 && crossings >= 2 && std::abs(end - 1.0) <= 1e-3 &&
                  consistency <= 1e-10 && secs < 300;
  return {ok, fmt::format("single g2(0) {:.4e} (F {:.4f}, Delta {:.4f}), monotone {} (largest drop {:.1e}), max excess {:.1e}; "
                          "coupled g2(0) {:.3e} (F {:.4f}, Delta {:.4f}), {} crossings in (0,5], g2(20) - 1 = {:.1e}; "
                          "regression vs static {:.1e}; {:.1f} s",
                          cs.g2.front(), ts.F.real(), ts.Delta, monotone ? "yes" : "no", drop, above, cc.g2.front(),
                          tc.F.real(), tc.Delta, crossings, end - 1.0, consistency, secs)};
}

Outcome c11_truncation() {
  double worst = 0.0;
  std::string worst_label;
  for (const auto& h : headlines) {
    const double base = h.value(0), more = h.value(8);
    const double change = rel(more, base);
    if (change >= worst) {
      worst = change;
      worst_label = h.label;
    }
  }
  return {!headlines.empty() && worst < 1e-6,
          fmt::format("{} headline numbers, max relative change at dim + 8: {:.2e} ({})", headlines.size(), worst,
                      worst_label)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"formula equivalence", c1_formula},      {"beamsplitter contract", c2_beamsplitter},
      {"coherent baseline", c3_coherent},       {"kerr headline", c4_kerr},
      {"amplitude scan", c5_scan},              {"two-photon superposition", c6_two_photon},
      {"cat-state optimum", c7_cat},            {"squeezed analytics", c8_squeezed},
      {"squeezed map structure", c9_fig6},      {"blockade comparison", c10_blockade},
      {"truncation convergence", c11_truncation},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.passed) ++failed;
    std::printf("%s criterion %zu (%s): %s [%.2f s]\n", o.passed ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
