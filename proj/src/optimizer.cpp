#include "antibunch/optimizer.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <thread>

#include "antibunch/errors.hpp"

namespace antibunch {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Cell evaluate_cell(const Objective& objective, const Params& params) {
  Cell cell;
  try {
    const OutputStats s = objective(params);
    cell.g2 = s.g2;
    cell.n_mean = s.n_mean;
    cell.status = CellStatus::ok;
  } catch (const UndefinedG2& e) {
    cell.g2 = std::numeric_limits<double>::quiet_NaN();
    cell.n_mean = e.intensity();
    cell.status = CellStatus::undefined;
    cell.message = e.what();
  } catch (const std::exception& e) {
    cell.g2 = std::numeric_limits<double>::quiet_NaN();
    cell.n_mean = std::numeric_limits<double>::quiet_NaN();
    cell.status = CellStatus::failed;
    cell.message = e.what();
  }
  return cell;
}

double g2_or_inf(const Objective& objective, const Params& p) {
  try {
    const double g = objective(p).g2;
    return std::isfinite(g) ? g : kInf;
  } catch (const Error&) {
    return kInf;
  }
}

}  // namespace

void Axis::validate() const {
  if (name.empty()) throw ConfigError("axis: empty parameter name");
  if (!std::isfinite(min) || !std::isfinite(max)) throw ConfigError("axis " + name + ": bounds must be finite");
  if (count == 1) {
    if (min != max) throw ConfigError("axis " + name + ": a single point requires min == max");
    return;
  }
  if (count < 2) throw ConfigError("axis " + name + ": point count must be at least 2");
  if (!(min < max)) throw ConfigError("axis " + name + ": min must be below max");
}

double Axis::value(int i) const {
  if (count == 1) return min;
  if (i == count - 1) return max;
  return min + (max - min) * static_cast<double>(i) / static_cast<double>(count - 1);
}

std::vector<double> Axis::values() const {
  std::vector<double> v(count);
  for (int i = 0; i < count; ++i) v[i] = value(i);
  return v;
}

void SweepSpec::validate() const {
  if (axes.empty()) throw ConfigError("sweep: at least one axis is required");
  for (std::size_t i = 0; i < axes.size(); ++i) {
    axes[i].validate();
    for (std::size_t j = 0; j < i; ++j)
      if (axes[j].name == axes[i].name) throw ConfigError("sweep: duplicate axis " + axes[i].name);
    if (fixed.count(axes[i].name)) throw ConfigError("sweep: " + axes[i].name + " is both swept and fixed");
  }
}

std::size_t SweepSpec::cell_count() const {
  std::size_t n = 1;
  for (const auto& a : axes) n *= static_cast<std::size_t>(a.count);
  return n;
}

Params SweepResult::params_at(std::size_t index) const {
  Params p;
  for (std::size_t k = axes.size(); k-- > 0;) {
    const auto count = static_cast<std::size_t>(axes[k].count);
    p[axes[k].name] = axes[k].value(static_cast<int>(index % count));
    index /= count;
  }
  return p;
}

SweepResult sweep(const SweepSpec& spec, const Objective& objective, unsigned threads) {
  spec.validate();
  SweepResult result;
  result.axes = spec.axes;
  const std::size_t n = spec.cell_count();
  result.cells.resize(n);

  auto params_for = [&](std::size_t index) {
    Params p = spec.fixed;
    for (const auto& [k, v] : result.params_at(index)) p[k] = v;
    return p;
  };

  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) result.cells[i] = evaluate_cell(objective, params_for(i));
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < n; i = next++) result.cells[i] = evaluate_cell(objective, params_for(i));
      });
    }
    for (auto& th : pool) th.join();
  }

  std::size_t best = n;
  for (std::size_t i = 0; i < n; ++i) {
    const Cell& c = result.cells[i];
    if (c.status == CellStatus::undefined) ++result.undefined_cells;
    if (c.status == CellStatus::failed) ++result.failed_cells;
    if (c.status == CellStatus::ok && (best == n || c.g2 < result.cells[best].g2)) best = i;
  }
  if (best < n) {
    result.has_min = true;
    result.min_value = result.cells[best].g2;
    result.argmin = params_for(best);
  }
  return result;
}

RefineResult refine_min(const std::function<double(const std::vector<double>&)>& f,
                        const std::vector<double>& start, const std::vector<double>& lower,
                        const std::vector<double>& upper, const RefineOptions& options) {
  const std::size_t dim = start.size();
  if (lower.size() != dim || upper.size() != dim) throw DimensionMismatch("refine_min: bound sizes differ");
  for (std::size_t k = 0; k < dim; ++k) {
    if (!(lower[k] <= start[k] && start[k] <= upper[k])) throw DomainError("refine_min: start outside bounds");
  }
  auto clamp = [&](std::vector<double> x) {
    for (std::size_t k = 0; k < dim; ++k) x[k] = std::clamp(x[k], lower[k], upper[k]);
    return x;
  };
  auto eval = [&](const std::vector<double>& x) {
    const double v = f(x);
    return std::isfinite(v) ? v : kInf;
  };

  RefineResult out;
  const double f_start = eval(start);
  if (dim == 0) {
    out.argmin = start;
    out.value = f_start;
    out.converged = true;
    return out;
  }

  std::vector<std::vector<double>> simplex(dim + 1, start);
  std::vector<double> values(dim + 1, f_start);
  for (std::size_t k = 0; k < dim; ++k) {
    const double width = upper[k] - lower[k];
    double step = options.initial_step * (width > 0 ? width : 1.0);
    if (start[k] + step > upper[k]) step = -step;
    simplex[k + 1][k] = start[k] + step;
    simplex[k + 1] = clamp(simplex[k + 1]);
    values[k + 1] = eval(simplex[k + 1]);
  }

  std::vector<std::size_t> order(dim + 1);
  int it = 0;
  for (; it < options.max_iterations; ++it) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front(), worst = order.back(), second = order[dim - 1];

    double size = 0.0;
    for (std::size_t v = 0; v <= dim; ++v)
      for (std::size_t k = 0; k < dim; ++k) size = std::max(size, std::abs(simplex[v][k] - simplex[best][k]));
    const double spread = values[worst] - values[best];
    if (size < options.step_tol || (std::isfinite(spread) && spread < options.value_tol)) {
      out.converged = true;
      break;
    }

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t v = 0; v <= dim; ++v) {
      if (v == worst) continue;
      for (std::size_t k = 0; k < dim; ++k) centroid[k] += simplex[v][k] / static_cast<double>(dim);
    }
    auto along = [&](double coef) {
      std::vector<double> x(dim);
      for (std::size_t k = 0; k < dim; ++k) x[k] = centroid[k] + coef * (simplex[worst][k] - centroid[k]);
      return clamp(x);
    };

    const auto xr = along(-1.0);
    const double fr = eval(xr);
    if (fr < values[best]) {
      const auto xe = along(-2.0);
      const double fe = eval(xe);
      if (fe < fr) {
        simplex[worst] = xe;
        values[worst] = fe;
      } else {
        simplex[worst] = xr;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = xr;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    const auto xc = along(outside ? -0.5 : 0.5);
    const double fc = eval(xc);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = xc;
      values[worst] = fc;
      continue;
    }
    for (std::size_t v = 0; v <= dim; ++v) {
      if (v == best) continue;
      for (std::size_t k = 0; k < dim; ++k) simplex[v][k] = simplex[best][k] + 0.5 * (simplex[v][k] - simplex[best][k]);
      simplex[v] = clamp(simplex[v]);
      values[v] = eval(simplex[v]);
    }
  }

  std::size_t best = 0;
  for (std::size_t v = 1; v <= dim; ++v)
    if (values[v] < values[best]) best = v;
  out.iterations = it;
  if (!out.converged) out.warning = "refine_min: iteration limit reached, returning best point found";
  if (values[best] <= f_start) {
    out.argmin = simplex[best];
    out.value = values[best];
  } else {
    out.argmin = start;
    out.value = f_start;
  }
  return out;
}

ParamRefinement refine_params(const Objective& objective, const Params& base,
                              const std::vector<Axis>& free_axes, const RefineOptions& options) {
  std::vector<double> start, lower, upper;
  for (const auto& a : free_axes) {
    const auto it = base.find(a.name);
    if (it == base.end()) throw ConfigError("refine_params: no start value for " + a.name);
    start.push_back(std::clamp(it->second, a.min, a.max));
    lower.push_back(a.min);
    upper.push_back(a.max);
  }
  auto to_params = [&](const std::vector<double>& x) {
    Params p = base;
    for (std::size_t k = 0; k < free_axes.size(); ++k) p[free_axes[k].name] = x[k];
    return p;
  };
  ParamRefinement out;
  out.detail = refine_min([&](const std::vector<double>& x) { return g2_or_inf(objective, to_params(x)); },
                          start, lower, upper, options);
  out.argmin = to_params(out.detail.argmin);
  out.stats = objective(out.argmin);
  return out;
}

std::vector<std::size_t> grid_local_minima(const SweepResult& grid, std::size_t max_count) {
  const std::size_t n_axes = grid.axes.size();
  std::vector<std::size_t> stride(n_axes, 1);
  for (std::size_t k = n_axes; k-- > 1;) stride[k - 1] = stride[k] * grid.axes[k].count;
  std::vector<std::size_t> found;
  for (std::size_t i = 0; i < grid.cells.size(); ++i) {
    const Cell& c = grid.cells[i];
    if (c.status != CellStatus::ok) continue;
    bool minimal = true;
    for (std::size_t k = 0; k < n_axes && minimal; ++k) {
      const std::size_t pos = (i / stride[k]) % grid.axes[k].count;
      for (int step : {-1, 1}) {
        if ((step < 0 && pos == 0) || (step > 0 && pos + 1 == static_cast<std::size_t>(grid.axes[k].count))) continue;
        const Cell& nb = grid.cells[step < 0 ? i - stride[k] : i + stride[k]];
        if (nb.status == CellStatus::ok && nb.g2 < c.g2) minimal = false;
      }
    }
    if (minimal) found.push_back(i);
  }
  std::stable_sort(found.begin(), found.end(),
                   [&](std::size_t a, std::size_t b) { return grid.cells[a].g2 < grid.cells[b].g2; });
  if (found.size() > max_count) found.resize(max_count);
  return found;
}

ParamRefinement refine_from_grid(const Objective& objective, const SweepResult& grid, const RefineOptions& options,
                                 std::size_t starts) {
  if (!grid.has_min) throw Error("refine_from_grid: grid has no defined cell");
  std::vector<Axis> free_axes;
  for (const auto& a : grid.axes)
    if (a.count > 1) free_axes.push_back(a);
  std::optional<ParamRefinement> best;
  for (std::size_t idx : grid_local_minima(grid, starts)) {
    Params start = grid.argmin;
    for (const auto& [k, v] : grid.params_at(idx)) start[k] = v;
    ParamRefinement r = refine_params(objective, start, free_axes, options);
    if (!best || r.stats.g2 < best->stats.g2) best = std::move(r);
  }
  if (!best) best = refine_params(objective, grid.argmin, free_axes, options);
  return *best;
}

std::vector<CurvePoint> min_curve(const Objective& objective, const Axis& scan,
                                  const std::vector<Axis>& inner, const Params& fixed,
                                  const RefineOptions& options) {
  scan.validate();
  std::vector<CurvePoint> curve;
  for (int i = 0; i < scan.count; ++i) {
    CurvePoint pt;
    pt.scan_value = scan.value(i);
    Params base = fixed;
    base[scan.name] = pt.scan_value;
    SweepSpec spec{inner, "", base};
    const SweepResult grid = sweep(spec, objective);
    if (grid.has_min) {
      try {
        const ParamRefinement ref = refine_from_grid(objective, grid, options);
        pt.g2 = ref.stats.g2;
        pt.n_mean = ref.stats.n_mean;
        pt.argmin = ref.argmin;
        pt.defined = true;
      } catch (const Error&) {
        pt.defined = false;
      }
    }
    if (!pt.defined) {
      pt.g2 = std::numeric_limits<double>::quiet_NaN();
      pt.n_mean = std::numeric_limits<double>::quiet_NaN();
    }
    curve.push_back(std::move(pt));
  }
  return curve;
}

Derivatives finite_differences(const Objective& objective, const Params& at,
                               const std::vector<std::string>& names, double h) {
  Derivatives d;
  const double f0 = objective(at).g2;
  for (const auto& name : names) {
    Params plus = at, minus = at;
    plus[name] += h;
    minus[name] -= h;
    const double fp = objective(plus).g2;
    const double fm = objective(minus).g2;
    d.gradient.push_back((fp - fm) / (2 * h));
    d.second.push_back((fp - 2 * f0 + fm) / (h * h));
  }
  return d;
}

}  // namespace antibunch
