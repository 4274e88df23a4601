#include "antibunch/figures.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include "antibunch/errors.hpp"
#include "antibunch/lindblad.hpp"
#include "antibunch/pipelines.hpp"

namespace antibunch {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Axis axis(const std::string& name, double lo, double hi, int count) { return {name, lo, hi, count}; }

json params_json(const Params& p) {
  json j = json::object();
  for (const auto& [k, v] : p) j[k] = v;
  return j;
}

// Largest truncations used anywhere on the grid (evaluated at the axis corners).
json grid_dims(const std::string& objective, const Params& fixed, const std::vector<Axis>& axes) {
  int da = 0, db = 0;
  const std::size_t corners = std::size_t{1} << axes.size();
  for (std::size_t c = 0; c < corners; ++c) {
    Params p = fixed;
    for (std::size_t k = 0; k < axes.size(); ++k) p[axes[k].name] = (c >> k) & 1 ? axes[k].max : axes[k].min;
    try {
      const auto [a, b] = objective_dims(objective, p);
      da = std::max(da, a);
      db = std::max(db, b);
    } catch (const Error&) {
    }
  }
  return {{"input_a", da}, {"input_b", db}, {"output", da + db - 1}};
}

// g2 at the point with both truncations raised by 8 relative to their defaults.
json convergence_check(const std::string& objective, const Params& at) {
  const Objective f = make_objective(objective);
  const OutputStats base = f(at);
  const auto [da, db] = objective_dims(objective, at);
  Params bigger = at;
  bigger["dim"] = static_cast<double>(std::max(da, db) + 8);
  const OutputStats more = f(bigger);
  return {{"dim", std::max(da, db) + 8},
          {"g2", base.g2},
          {"g2_at_dim", more.g2},
          {"relative_change", std::abs(more.g2 - base.g2) / std::abs(more.g2)}};
}

CsvTable grid_table(const SweepResult& r) {
  CsvTable t;
  for (const auto& a : r.axes) t.columns.push_back(a.name);
  t.columns.insert(t.columns.end(), {"g2", "n_mean", "defined"});
  for (std::size_t i = 0; i < r.cells.size(); ++i) {
    std::vector<double> row;
    const Params p = r.params_at(i);
    for (const auto& a : r.axes) row.push_back(p.at(a.name));
    const Cell& c = r.cells[i];
    const bool ok = c.status == CellStatus::ok;
    row.push_back(ok ? c.g2 : kNaN);
    row.push_back(ok ? c.n_mean : kNaN);
    row.push_back(ok ? 1.0 : 0.0);
    t.rows.push_back(std::move(row));
  }
  return t;
}

Params fixed_params(const RunConfig& c) {
  Params p = c.parameters;
  if (c.dim && !p.count("dim")) p["dim"] = *c.dim;
  return p;
}

FigureResult run_grid(const RunConfig& c) {
  const std::string objective = c.objective.value();
  const SweepSpec spec{c.axes.value(), objective, fixed_params(c)};
  const Objective f = make_objective(objective);
  const SweepResult r = sweep(spec, f);
  FigureResult out;
  out.table = grid_table(r);
  json results = {{"undefined_cells", r.undefined_cells}, {"failed_cells", r.failed_cells}};
  if (r.has_min) {
    results["grid_min"] = {{"g2", r.min_value}, {"at", params_json(r.argmin)}};
    const ParamRefinement ref = refine_from_grid(f, r);
    results["refined_min"] = {{"g2", ref.stats.g2},
                              {"n_mean", ref.stats.n_mean},
                              {"at", params_json(ref.argmin)},
                              {"converged", ref.detail.converged}};
    if (!spec.fixed.count("dim")) results["convergence"] = convergence_check(objective, ref.argmin);
  }
  out.meta["dims"] = grid_dims(objective, spec.fixed, spec.axes);
  out.meta["results"] = results;
  return out;
}

// Minimum over the last axis for each value of the first (the r rows of the squeezing map),
// with the curvature of g2 along that axis at the refined row minimum.
json row_minima(const RunConfig& c) {
  const auto& axes = c.axes.value();
  if (axes.size() != 2) return json::array();
  const Objective f = make_objective(c.objective.value());
  json rows = json::array();
  for (int i = 0; i < axes[0].count; ++i) {
    Params base = fixed_params(c);
    base[axes[0].name] = axes[0].value(i);
    const SweepResult r = sweep(SweepSpec{{axes[1]}, c.objective.value(), base}, f);
    if (!r.has_min) continue;
    try {
      const ParamRefinement ref = refine_from_grid(f, r);
      const Derivatives d = finite_differences(f, ref.argmin, {axes[1].name});
      rows.push_back({{axes[0].name, axes[0].value(i)},
                      {axes[1].name, ref.argmin.at(axes[1].name)},
                      {"g2", ref.stats.g2},
                      {"second_derivative", d.second[0]}});
    } catch (const Error&) {
    }
  }
  return rows;
}

FigureResult run_curve(const RunConfig& c) {
  const std::string objective = c.objective.value();
  const Objective f = make_objective(objective);
  const Axis scan = c.scan.value();
  const auto& inner = c.axes.value();
  const Params fixed = fixed_params(c);
  const auto curve = min_curve(f, scan, inner, fixed);
  FigureResult out;
  out.table.columns = {scan.name, "g2_min", "n_mean"};
  for (const auto& a : inner) out.table.columns.push_back(a.name + "_opt");
  out.table.columns.push_back("defined");
  const bool two_photon = objective == "two_photon";
  if (two_photon) out.table.columns.push_back("g2_input");
  for (const auto& pt : curve) {
    std::vector<double> row = {pt.scan_value, pt.defined ? pt.g2 : kNaN, pt.defined ? pt.n_mean : kNaN};
    for (const auto& a : inner) row.push_back(pt.defined ? pt.argmin.at(a.name) : kNaN);
    row.push_back(pt.defined ? 1.0 : 0.0);
    if (two_photon) row.push_back(1.0 / (2.0 * pt.scan_value * pt.scan_value));
    out.table.rows.push_back(std::move(row));
  }
  std::vector<Axis> all = inner;
  all.push_back(scan);
  out.meta["dims"] = grid_dims(objective, fixed, all);
  json results = json::object();
  for (const auto& pt : curve) {
    if (!pt.defined) continue;
    if (!results.contains("min_g2") || pt.g2 < results["min_g2"].get<double>()) {
      results["min_g2"] = pt.g2;
      results["at"] = params_json(pt.argmin);
    }
  }
  out.meta["results"] = results;
  return out;
}

std::vector<double> tau_grid(const DynamicsSpec& d) {
  std::vector<double> t(d.tau_points);
  for (int i = 0; i < d.tau_points; ++i) t[i] = d.tau_max * i / (d.tau_points - 1);
  t.back() = d.tau_max;
  return t;
}

json tuned_json(const TunedParameters& t) {
  json j = {{"U", t.U},
            {"F", complex_to_json(t.F)},
            {"Delta", t.Delta},
            {"g2_zero", t.g2_zero},
            {"dim", t.dim},
            {"evaluations", t.evaluations},
            {"converged", t.converged},
            {"warning", t.warning}};
  if (t.family == CavityFamily::coupled) j["J"] = t.J;
  if (t.beta) j["beta"] = complex_to_json(*t.beta);
  return j;
}

// Crossings of g2 = 1 by linear interpolation.
std::vector<double> unit_crossings(const CorrelationCurve& c, bool upward_only) {
  std::vector<double> out;
  for (std::size_t k = 1; k < c.g2.size(); ++k) {
    const double a = c.g2[k - 1] - 1.0, b = c.g2[k] - 1.0;
    if ((a < 0.0 && b >= 0.0) || (!upward_only && a > 0.0 && b <= 0.0)) {
      out.push_back(c.tau[k - 1] + (c.tau[k] - c.tau[k - 1]) * a / (a - b));
    }
  }
  return out;
}

FigureResult run_dynamics(const RunConfig& c) {
  const DynamicsSpec d = c.dynamics.value_or(DynamicsSpec{});
  const std::vector<double> tau = tau_grid(d);

  TuneOptions single_opt;
  single_opt.U = d.U;
  single_opt.dim = d.dim;
  single_opt.free_params = {"F", "Delta", "beta_amp", "beta_phase"};
  auto drop = [](std::vector<std::string>& v, const std::string& name) { std::erase(v, name); };
  if (d.F_single) {
    single_opt.F = *d.F_single;
    drop(single_opt.free_params, "F");
  }
  if (d.Delta_single) {
    single_opt.Delta = *d.Delta_single;
    drop(single_opt.free_params, "Delta");
  }
  if (d.beta) {
    single_opt.beta = *d.beta;
    drop(single_opt.free_params, "beta_amp");
    drop(single_opt.free_params, "beta_phase");
  }
  TuneOptions coupled_opt;
  coupled_opt.U = d.U;
  coupled_opt.J = d.J;
  coupled_opt.dim = d.dim;
  coupled_opt.F_min = 0.01;
  coupled_opt.free_params = {"F", "Delta"};
  if (d.F_coupled) {
    coupled_opt.F = *d.F_coupled;
    drop(coupled_opt.free_params, "F");
  }
  if (d.Delta_coupled) {
    coupled_opt.Delta = *d.Delta_coupled;
    drop(coupled_opt.free_params, "Delta");
  }

  // An empty free list means "tune everything" to the tuner, so pinned runs are evaluated here.
  auto tune = [](CavityFamily fam, const TuneOptions& opt) {
    if (opt.free_params.empty() && fam == CavityFamily::single) {
      const CavityModel m = build_single_kerr(opt.U, opt.F, opt.Delta, opt.dim);
      const DensityMatrix rho = steady_state(m);
      return TunedParameters{fam, opt.U, 0.0, opt.F, opt.Delta, opt.beta,
                             g2_zero(rho, measured_operator(m, opt.beta)), opt.dim, 1, true, ""};
    }
    if (opt.free_params.empty()) {
      const CavityModel m = build_coupled_cavities(opt.U, opt.J, opt.F, opt.Delta, opt.dim, opt.dim);
      const DensityMatrix rho = steady_state(m);
      return TunedParameters{fam, opt.U, opt.J, opt.F, opt.Delta, std::nullopt,
                             g2_zero(rho, m.monitored.matrix()), opt.dim, 1, true, ""};
    }
    return tune_for_antibunching(fam, opt);
  };
  const TunedParameters ts = tune(CavityFamily::single, single_opt);
  const TunedParameters tc = tune(CavityFamily::coupled, coupled_opt);
  const CavityModel ms = build_model(ts);
  const CavityModel mc = build_model(tc);
  const CorrelationCurve cs = g2_tau(ms, ts.beta, tau);
  const CorrelationCurve cc = g2_tau(mc, std::nullopt, tau);

  FigureResult out;
  out.table.columns = {"tau", "g2_single", "g2_coupled"};
  for (std::size_t k = 0; k < tau.size(); ++k) out.table.rows.push_back({tau[k], cs.g2[k], cc.g2[k]});

  const auto up = unit_crossings(cc, true);
  const auto all = unit_crossings(cc, false);
  json osc = {{"crossings_of_one", all.size()}};
  if (up.size() >= 2) {
    const double period = (up.back() - up.front()) / static_cast<double>(up.size() - 1);
    osc["period"] = period;
    osc["frequency"] = 1.0 / period;
    osc["angular_frequency"] = 2.0 * std::numbers::pi / period;
  }
  double peak = 0.0;
  for (double g : cc.g2) peak = std::max(peak, g);
  osc["peak_g2"] = peak;
  out.meta["dims"] = {{"single", {d.dim}}, {"coupled", {d.dim, d.dim}}};
  out.meta["results"] = {
      {"single", tuned_json(ts)},
      {"coupled", tuned_json(tc)},
      {"single_curve", {{"g2_zero", cs.g2.front()}, {"g2_static", cs.g2_static}, {"g2_end", cs.g2.back()}}},
      {"coupled_curve",
       {{"g2_zero", cc.g2.front()}, {"g2_static", cc.g2_static}, {"g2_end", cc.g2.back()}, {"oscillation", osc}}}};
  return out;
}

}  // namespace

std::vector<std::string> figure_names() { return {"fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6", "fig7"}; }

RunConfig figure_defaults(const std::string& name) {
  RunConfig c;
  c.command = "figure";
  c.figure = name;
  if (name == "fig2") {
    c.objective = "phase_modified";
    c.axes = {{axis("R", 0.01, 0.5, 101), axis("phi", 0.0, 2.0, 101)}};
    c.parameters = {{"alpha", 0.3}};
  } else if (name == "fig3a") {
    c.objective = "kerr";
    c.axes = {{axis("R", 0.0, 1.0, 101), axis("phi", 0.0, 2.0, 101)}};
    c.parameters = {{"alpha", 0.3}, {"chi_t", 0.05}};
  } else if (name == "fig3b") {
    c.objective = "kerr";
    c.scan = axis("alpha", 0.02, 0.5, 25);
    c.axes = {{axis("R", 0.0, 1.0, 101), axis("phi", 0.0, 2.0, 101)}};
    c.parameters = {{"chi_t", 0.05}};
  } else if (name == "fig4") {
    c.objective = "two_photon";
    c.scan = axis("c2", 0.01, 0.3, 30);
    c.axes = {{axis("alpha_b", 0.01, 1.5, 101), axis("phi", 0.0, 2.0, 101)}};
    c.parameters = {{"R", 0.5}};
  } else if (name == "fig5") {
    c.objective = "cat";
    c.axes = {{axis("alpha_b", 0.01, 0.5, 101), axis("alpha_sch", 0.01, 0.5, 101)}};
    c.parameters = {{"R", 0.5}, {"phi", 0.5}};
  } else if (name == "fig6") {
    c.objective = "squeezed";
    c.axes = {{axis("r", 0.01, 0.3, 101), axis("alpha_b", 0.02, 3.0, 101)}};
    c.parameters = {{"R", 0.1}, {"phi", 1.0}, {"omega", 0.0}, {"alpha_a", 0.0}, {"Phi", 0.0}};
  } else if (name == "fig7") {
    c.dynamics = DynamicsSpec{};
  } else {
    throw ConfigError("unknown figure '" + name + "'");
  }
  return c;
}

RunConfig merge_figure_config(const std::string& name, const RunConfig& o) {
  RunConfig c = figure_defaults(name);
  if (o.figure && *o.figure != name) throw ConfigError("config names figure '" + *o.figure + "' but '" + name + "' was requested");
  if (o.state || o.state_b || o.beamsplitter) throw ConfigError("figure: state and beamsplitter keys belong to the g2 command");
  if (name == "fig7") {
    if (o.axes || o.scan || o.objective || !o.parameters.empty()) {
      throw ConfigError("fig7: only the dynamics block can be overridden");
    }
    if (o.dynamics) c.dynamics = o.dynamics;
    if (o.dim) c.dynamics->dim = *o.dim;
    return c;
  }
  if (o.dynamics) throw ConfigError(name + ": dynamics block applies to fig7 only");
  if (o.objective) c.objective = o.objective;
  if (o.axes) c.axes = o.axes;
  if (o.scan) {
    if (!c.scan) throw ConfigError(name + ": figure has no scan axis");
    c.scan = o.scan;
  }
  for (const auto& [k, v] : o.parameters) c.parameters[k] = v;
  if (o.dim) c.dim = o.dim;
  return c;
}

FigureResult run_figure(const RunConfig& config) {
  const std::string name = config.figure.value_or("");
  const auto start = std::chrono::steady_clock::now();
  FigureResult out;
  if (name == "fig7") {
    out = run_dynamics(config);
  } else if (config.scan) {
    out = run_curve(config);
  } else {
    out = run_grid(config);
    if (name == "fig6") out.meta["results"]["row_minima"] = row_minima(config);
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out.name = name;
  RunConfig reproducible = config;
  reproducible.output.reset();
  out.meta["figure"] = name;
  out.meta["config"] = to_json(reproducible);
  out.meta["version"] = ANTIBUNCH_VERSION;
  out.meta["wall_time_s"] = wall;
  out.meta["columns"] = out.table.columns;
  out.meta["phase_units"] = "pi";
  return out;
}

void write_figure(const FigureResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory '" + dir.string() + "': " + ec.message());
  write_csv(dir / (result.name + ".csv"), result.table);
  std::ofstream meta(dir / (result.name + ".meta.json"));
  if (!meta) throw Error("cannot write '" + (dir / (result.name + ".meta.json")).string() + "'");
  meta << result.meta.dump(2) << '\n';
}

}  // namespace antibunch
