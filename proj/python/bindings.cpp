#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "antibunch/analytic.hpp"
#include "antibunch/beamsplitter.hpp"
#include "antibunch/config.hpp"
#include "antibunch/errors.hpp"
#include "antibunch/figures.hpp"
#include "antibunch/lindblad.hpp"
#include "antibunch/pipelines.hpp"
#include "antibunch/selftest.hpp"
#include "antibunch/states.hpp"

namespace py = pybind11;
using namespace antibunch;

namespace {

void bind_errors(py::module_& m) {
  static py::exception<Error> base(m, "AntibunchError", PyExc_RuntimeError);
  static py::exception<InvalidDimension> invalid_dim(m, "InvalidDimension", base.ptr());
  static py::exception<DimensionMismatch> mismatch(m, "DimensionMismatch", base.ptr());
  static py::exception<TruncationError> truncation(m, "TruncationError", base.ptr());
  static py::exception<InvalidState> invalid_state(m, "InvalidState", base.ptr());
  static py::exception<NonNormalizable> non_norm(m, "NonNormalizable", base.ptr());
  static py::exception<DomainError> domain(m, "DomainError", base.ptr());
  static py::exception<UndefinedG2> undefined(m, "UndefinedG2", base.ptr());
  static py::exception<DegenerateSplitter> degenerate(m, "DegenerateSplitter", base.ptr());
  static py::exception<NoUniqueSteadyState> no_ss(m, "NoUniqueSteadyState", base.ptr());
  static py::exception<ConfigError> config(m, "ConfigError", base.ptr());

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const InvalidDimension& e) {
      py::set_error(invalid_dim, e.what());
    } catch (const DimensionMismatch& e) {
      py::set_error(mismatch, e.what());
    } catch (const TruncationError& e) {
      py::set_error(truncation, e.what());
    } catch (const InvalidState& e) {
      py::set_error(invalid_state, e.what());
    } catch (const NonNormalizable& e) {
      py::set_error(non_norm, e.what());
    } catch (const DomainError& e) {
      py::set_error(domain, e.what());
    } catch (const UndefinedG2& e) {
      py::set_error(undefined, e.what());
    } catch (const DegenerateSplitter& e) {
      py::set_error(degenerate, e.what());
    } catch (const NoUniqueSteadyState& e) {
      py::set_error(no_ss, e.what());
    } catch (const ConfigError& e) {
      py::set_error(config, e.what());
    } catch (const Error& e) {
      py::set_error(base, e.what());
    }
  });
}

void bind_fock(py::module_& m) {
  py::class_<FockVector>(m, "FockVector")
      .def(py::init<Vector>(), py::arg("amplitudes"))
      .def_static("basis", &FockVector::basis, py::arg("n"), py::arg("dim"))
      .def_static("vacuum", &FockVector::vacuum, py::arg("dim"))
      .def_property_readonly("dim", &FockVector::dim)
      .def_property_readonly("amplitudes", &FockVector::amplitudes)
      .def("norm", &FockVector::norm)
      .def("probabilities", &FockVector::probabilities)
      .def("resized", &FockVector::resized, py::arg("dim"))
      .def("__len__", &FockVector::dim)
      .def("__repr__", [](const FockVector& v) { return "FockVector(dim=" + std::to_string(v.dim()) + ")"; });

  py::class_<TwoModeState>(m, "TwoModeState")
      .def_property_readonly("dim_a", &TwoModeState::dim_a)
      .def_property_readonly("dim_b", &TwoModeState::dim_b)
      .def_property_readonly("amplitudes", &TwoModeState::amplitudes)
      .def("matrix",
           [](const TwoModeState& s) {
             Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> c =
                 Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
                     s.amplitudes().data(), s.dim_a(), s.dim_b());
             return c;
           },
           "Amplitudes c[i, j] with i photons in mode a and j in mode b.")
      .def("norm", &TwoModeState::norm)
      .def("distribution_a", &TwoModeState::distribution_a)
      .def("distribution_b", &TwoModeState::distribution_b);

  m.def("annihilation", [](int d) { return annihilation(d).matrix(); }, py::arg("dim"));
  m.def("creation", [](int d) { return creation(d).matrix(); }, py::arg("dim"));
  m.def("number", [](int d) { return number(d).matrix(); }, py::arg("dim"));
  m.def("displacement", [](cplx a, int d) { return displacement(a, d).matrix(); }, py::arg("alpha"), py::arg("dim"));
  m.def("squeeze", [](cplx xi, int d) { return squeeze(xi, d).matrix(); }, py::arg("xi"), py::arg("dim"));
  m.def("normalize", &normalize, py::arg("state"));
  m.def("default_dim", &default_dim, py::arg("amplitude"));
}

void bind_states(py::module_& m) {
  m.def("coherent", &coherent, py::arg("alpha"), py::arg("dim"));
  m.def("phase_modified_coherent", &phase_modified_coherent, py::arg("alpha"), py::arg("dim"));
  m.def("kerr_coherent", [](cplx alpha, double chi_t, int dim) { return kerr_coherent({alpha, chi_t}, dim); },
        py::arg("alpha"), py::arg("chi_t"), py::arg("dim"));
  m.def("vacuum_two_photon", &vacuum_two_photon, py::arg("c2"), py::arg("dim") = 3);
  m.def("cat_state",
        [](cplx alpha_sch, const std::string& parity, int dim) {
          if (parity != "even" && parity != "odd") throw ConfigError("parity must be 'even' or 'odd'");
          return cat_state({alpha_sch, parity == "odd" ? Parity::odd : Parity::even}, dim);
        },
        py::arg("alpha_sch"), py::arg("parity") = "even", py::arg("dim"));
  m.def("squeezed_vacuum", &squeezed_vacuum, py::arg("xi"), py::arg("dim"));
  m.def("squeezed_coherent", &squeezed_coherent, py::arg("alpha"), py::arg("xi"), py::arg("dim"));
}

void bind_beamsplitter(py::module_& m) {
  py::class_<BeamsplitterParams>(m, "BeamsplitterParams")
      .def(py::init<double, double>(), py::arg("R"), py::arg("phi"))
      .def_property_readonly("R", &BeamsplitterParams::R)
      .def_property_readonly("T", &BeamsplitterParams::T)
      .def_property_readonly("phi", &BeamsplitterParams::phi)
      .def("__repr__", [](const BeamsplitterParams& p) {
        return "BeamsplitterParams(R=" + std::to_string(p.R()) + ", phi=" + std::to_string(p.phi()) + ")";
      });

  py::class_<OutputStats>(m, "OutputStats")
      .def_readonly("g2", &OutputStats::g2)
      .def_readonly("n_mean", &OutputStats::n_mean)
      .def("__repr__", [](const OutputStats& s) {
        return "OutputStats(g2=" + std::to_string(s.g2) + ", n_mean=" + std::to_string(s.n_mean) + ")";
      });

  m.def("mix", &mix, py::arg("a"), py::arg("b"), py::arg("params"));
  m.def("bs_unitary", [](const BeamsplitterParams& p, int da, int db) { return bs_unitary(p, da, db).op.matrix(); },
        py::arg("params"), py::arg("dim_a"), py::arg("dim_b"));
  m.def("output_g2", &output_g2, py::arg("a"), py::arg("b"), py::arg("params"));
  m.def("output_g2_b", &output_g2_b, py::arg("a"), py::arg("b"), py::arg("params"));
  m.def("g2_from_coeffs", [](const Vector& c) { return g2_from_coeffs({c.data(), static_cast<std::size_t>(c.size())}); },
        py::arg("coeffs"));
  m.attr("INTENSITY_FLOOR") = kIntensityFloor;
}

void bind_analytic(py::module_& m) {
  m.def("effective_split",
        [](cplx a, cplx b, const BeamsplitterParams& p) {
          const EffectiveSplit s = effective_split(a, b, p);
          return py::make_tuple(s.sqrt_r_prime, s.sqrt_t_prime, s.alpha_b_prime);
        },
        py::arg("alpha_a"), py::arg("alpha_b"), py::arg("params"),
        "Returns (sqrt_R', sqrt_T', alpha_b') of the equivalent vacuum-input splitter.");
  m.def("optimal_amplitude_k", &optimal_amplitude_k, py::arg("r"));
  m.def("optimal_vacuum_squeezing_condition",
        [](double r, const BeamsplitterParams& p, double Phi) {
          const auto o = optimal_vacuum_squeezing_condition(r, p, Phi);
          return py::dict(py::arg("phi") = o.phi, py::arg("alpha_b") = o.alpha_b);
        },
        py::arg("r"), py::arg("params"), py::arg("Phi") = 0.0);
}

void bind_optimizer(py::module_& m) {
  m.def("objective_names", &objective_names);
  m.def("objective_parameters", &objective_parameters, py::arg("name"));
  m.def("evaluate",
        [](const std::string& name, const Params& p) { return make_objective(name)(p); },
        py::arg("objective"), py::arg("params"));
  m.def("sweep",
        [](const std::string& objective, const std::vector<std::tuple<std::string, double, double, int>>& axes,
           const Params& fixed) {
          SweepSpec spec;
          for (const auto& [n, lo, hi, count] : axes) spec.axes.push_back({n, lo, hi, count});
          spec.objective = objective;
          spec.fixed = fixed;
          SweepResult r;
          {
            py::gil_scoped_release release;
            r = sweep(spec);
          }
          std::vector<py::ssize_t> shape;
          for (const auto& a : r.axes) shape.push_back(a.count);
          py::array_t<double> g2(shape), n(shape);
          auto* pg = g2.mutable_data();
          auto* pn = n.mutable_data();
          for (std::size_t i = 0; i < r.cells.size(); ++i) {
            pg[i] = r.cells[i].g2;
            pn[i] = r.cells[i].n_mean;
          }
          py::dict out;
          out["g2"] = g2;
          out["n_mean"] = n;
          py::dict coords;
          for (const auto& a : r.axes) coords[py::str(a.name)] = a.values();
          out["axes"] = coords;
          out["argmin"] = r.has_min ? py::cast(r.argmin) : py::none();
          out["min_value"] = r.has_min ? py::cast(r.min_value) : py::none();
          out["undefined_cells"] = r.undefined_cells;
          out["failed_cells"] = r.failed_cells;
          return out;
        },
        py::arg("objective"), py::arg("axes"), py::arg("fixed") = Params{},
        "Grid sweep. axes is a list of (name, min, max, count); the last axis varies fastest.");
  m.def("refine",
        [](const std::string& objective, const Params& start, const std::map<std::string, std::pair<double, double>>& free) {
          std::vector<Axis> axes;
          for (const auto& [n, b] : free) axes.push_back({n, b.first, b.second, 2});
          const ParamRefinement r = refine_params(make_objective(objective), start, axes, {});
          py::dict out;
          out["argmin"] = r.argmin;
          out["g2"] = r.stats.g2;
          out["n_mean"] = r.stats.n_mean;
          out["converged"] = r.detail.converged;
          out["iterations"] = r.detail.iterations;
          return out;
        },
        py::arg("objective"), py::arg("start"), py::arg("bounds"),
        "Bounded Nelder-Mead refinement; bounds maps each free parameter to (min, max).");
}

void bind_lindblad(py::module_& m) {
  py::enum_<CavityFamily>(m, "CavityFamily").value("single", CavityFamily::single).value("coupled", CavityFamily::coupled);
  py::enum_<SteadyStateMethod>(m, "SteadyStateMethod")
      .value("automatic", SteadyStateMethod::automatic)
      .value("direct", SteadyStateMethod::direct)
      .value("krylov", SteadyStateMethod::krylov);

  py::class_<CavityModel>(m, "CavityModel")
      .def_readonly("family", &CavityModel::family)
      .def_readonly("dims", &CavityModel::dims)
      .def_readonly("F", &CavityModel::F)
      .def_readonly("Delta", &CavityModel::Delta)
      .def_readonly("U", &CavityModel::U)
      .def_readonly("J", &CavityModel::J)
      .def_property_readonly("hamiltonian", [](const CavityModel& c) { return c.hamiltonian.matrix(); })
      .def_property_readonly("monitored", [](const CavityModel& c) { return c.monitored.matrix(); })
      .def_property_readonly("hilbert_dim", &CavityModel::hilbert_dim);

  m.def("build_single_kerr", &build_single_kerr, py::arg("U"), py::arg("F"), py::arg("Delta"), py::arg("dim") = 12);
  m.def("build_coupled_cavities", &build_coupled_cavities, py::arg("U"), py::arg("J"), py::arg("F"), py::arg("Delta"),
        py::arg("dim_a") = 12, py::arg("dim_b") = 12);
  m.def("steady_state",
        [](const CavityModel& c, SteadyStateMethod method) {
          py::gil_scoped_release release;
          return steady_state(c, method).matrix();
        },
        py::arg("model"), py::arg("method") = SteadyStateMethod::automatic);
  m.def("liouvillian_residual", &liouvillian_residual, py::arg("model"), py::arg("rho"));
  m.def("g2_zero",
        [](const CavityModel& c, std::optional<cplx> beta) {
          return g2_zero(steady_state(c), measured_operator(c, beta));
        },
        py::arg("model"), py::arg("beta") = std::nullopt);
  m.def("g2_tau",
        [](const CavityModel& c, const std::vector<double>& tau, std::optional<cplx> beta) {
          CorrelationCurve cc;
          {
            py::gil_scoped_release release;
            cc = g2_tau(c, beta, tau);
          }
          py::dict out;
          out["tau"] = cc.tau;
          out["g2"] = cc.g2;
          out["g2_static"] = cc.g2_static;
          out["intensity"] = cc.intensity;
          return out;
        },
        py::arg("model"), py::arg("tau"), py::arg("beta") = std::nullopt);
  m.def("tune_for_antibunching",
        [](CavityFamily family, double U, double J, std::vector<std::string> free_params, double F, double Delta,
           int dim) {
          TuneOptions o;
          o.U = U;
          o.J = J;
          o.free_params = std::move(free_params);
          o.F = F;
          o.Delta = Delta;
          o.dim = dim;
          TunedParameters t;
          {
            py::gil_scoped_release release;
            t = tune_for_antibunching(family, o);
          }
          py::dict out;
          out["F"] = t.F;
          out["Delta"] = t.Delta;
          out["beta"] = t.beta ? py::cast(*t.beta) : py::none();
          out["g2_zero"] = t.g2_zero;
          out["dim"] = t.dim;
          out["converged"] = t.converged;
          out["warning"] = t.warning;
          return out;
        },
        py::arg("family"), py::arg("U") = 0.01, py::arg("J") = 6.2, py::arg("free_params") = std::vector<std::string>{},
        py::arg("F") = 0.1, py::arg("Delta") = 0.0, py::arg("dim") = 12);
}

void bind_driver(py::module_& m) {
  m.def("figure_names", &figure_names);
  m.def("_run_figure",
        [](const std::string& name, const std::string& config_json, const std::string& out_dir) {
          const RunConfig user = config_json.empty() ? RunConfig{} : parse_config(json::parse(config_json));
          FigureResult r;
          {
            py::gil_scoped_release release;
            r = run_figure(merge_figure_config(name, user));
            if (!out_dir.empty()) write_figure(r, out_dir);
          }
          py::dict table;
          for (std::size_t c = 0; c < r.table.columns.size(); ++c) {
            std::vector<double> col;
            col.reserve(r.table.rows.size());
            for (const auto& row : r.table.rows) col.push_back(row[c]);
            table[py::str(r.table.columns[c])] = col;
          }
          return py::make_tuple(table, r.meta.dump());
        },
        py::arg("name"), py::arg("config_json") = "", py::arg("out_dir") = "");
  m.def("selftest",
        [](std::optional<int> dim) {
          py::list out;
          for (const auto& r : run_selftest(dim)) {
            out.append(py::dict(py::arg("name") = r.name, py::arg("passed") = r.passed, py::arg("detail") = r.detail));
          }
          return out;
        },
        py::arg("dim") = std::nullopt);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Photon statistics of states mixed on a beamsplitter, and driven-dissipative Kerr cavities";
  m.attr("__version__") = ANTIBUNCH_VERSION;
  bind_errors(m);
  bind_fock(m);
  bind_states(m);
  bind_beamsplitter(m);
  bind_analytic(m);
  bind_optimizer(m);
  bind_lindblad(m);
  bind_driver(m);
}
