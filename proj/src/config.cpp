#include "antibunch/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "antibunch/errors.hpp"

namespace antibunch {

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
  }
}

double get_number(const json& j, const std::string& where) {
  if (!j.is_number()) throw ConfigError(where + ": expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ConfigError(where + ": value is not finite");
  return v;
}

int get_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ConfigError(where + ": expected an integer");
  return j.get<int>();
}

std::string get_string(const json& j, const std::string& where) {
  if (!j.is_string()) throw ConfigError(where + ": expected a string");
  return j.get<std::string>();
}

cplx get_complex(const json& j, const std::string& where) {
  if (j.is_number()) return get_number(j, where);
  if (j.is_array() && j.size() == 2) return {get_number(j[0], where + "[0]"), get_number(j[1], where + "[1]")};
  throw ConfigError(where + ": expected [re, im] or a number");
}

const std::set<std::string>& state_keys(const std::string& kind) {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"vacuum", {"kind", "dim"}},
      {"fock", {"kind", "n", "dim"}},
      {"coherent", {"kind", "alpha", "dim"}},
      {"phase_modified_coherent", {"kind", "alpha", "dim"}},
      {"kerr_coherent", {"kind", "alpha", "chi_t", "dim"}},
      {"vacuum_two_photon", {"kind", "c2", "dim"}},
      {"cat_state", {"kind", "alpha_sch", "parity", "dim"}},
      {"squeezed_coherent", {"kind", "alpha", "xi", "dim"}},
  };
  const auto it = keys.find(kind);
  if (it == keys.end()) throw ConfigError("state: unknown kind '" + kind + "'");
  return it->second;
}

SplitterSpec parse_splitter(const json& j) {
  check_keys(j, {"R", "phi"}, "beamsplitter");
  SplitterSpec s;
  if (j.contains("R")) s.R = get_number(j["R"], "beamsplitter.R");
  if (j.contains("phi")) s.phi = get_number(j["phi"], "beamsplitter.phi");
  if (!(s.R >= 0.0 && s.R <= 1.0)) throw ConfigError("beamsplitter.R must lie in [0, 1]");
  return s;
}

DynamicsSpec parse_dynamics(const json& j) {
  check_keys(j, {"U", "J", "dim", "tau_max", "tau_points", "single", "coupled"}, "dynamics");
  DynamicsSpec d;
  if (j.contains("U")) d.U = get_number(j["U"], "dynamics.U");
  if (j.contains("J")) d.J = get_number(j["J"], "dynamics.J");
  if (j.contains("dim")) d.dim = get_int(j["dim"], "dynamics.dim");
  if (j.contains("tau_max")) d.tau_max = get_number(j["tau_max"], "dynamics.tau_max");
  if (j.contains("tau_points")) d.tau_points = get_int(j["tau_points"], "dynamics.tau_points");
  if (j.contains("single")) {
    const json& s = j["single"];
    check_keys(s, {"F", "Delta", "beta"}, "dynamics.single");
    if (s.contains("F")) d.F_single = get_number(s["F"], "dynamics.single.F");
    if (s.contains("Delta")) d.Delta_single = get_number(s["Delta"], "dynamics.single.Delta");
    if (s.contains("beta")) d.beta = get_complex(s["beta"], "dynamics.single.beta");
  }
  if (j.contains("coupled")) {
    const json& c = j["coupled"];
    check_keys(c, {"F", "Delta"}, "dynamics.coupled");
    if (c.contains("F")) d.F_coupled = get_number(c["F"], "dynamics.coupled.F");
    if (c.contains("Delta")) d.Delta_coupled = get_number(c["Delta"], "dynamics.coupled.Delta");
  }
  if (d.dim < 6) throw ConfigError("dynamics.dim must be at least 6");
  if (!(d.tau_max > 0.0)) throw ConfigError("dynamics.tau_max must be positive");
  if (d.tau_points < 2) throw ConfigError("dynamics.tau_points must be at least 2");
  return d;
}

json to_json(const DynamicsSpec& d) {
  json j = {{"U", d.U}, {"J", d.J}, {"dim", d.dim}, {"tau_max", d.tau_max}, {"tau_points", d.tau_points}};
  json single = json::object(), coupled = json::object();
  if (d.F_single) single["F"] = *d.F_single;
  if (d.Delta_single) single["Delta"] = *d.Delta_single;
  if (d.beta) single["beta"] = complex_to_json(*d.beta);
  if (d.F_coupled) coupled["F"] = *d.F_coupled;
  if (d.Delta_coupled) coupled["Delta"] = *d.Delta_coupled;
  if (!single.empty()) j["single"] = single;
  if (!coupled.empty()) j["coupled"] = coupled;
  return j;
}

}  // namespace

json complex_to_json(cplx z) { return json::array({z.real(), z.imag()}); }

double StateSpec::amplitude() const {
  if (kind == "fock") return std::sqrt(static_cast<double>(n));
  if (kind == "cat_state") return std::abs(alpha_sch);
  if (kind == "squeezed_coherent") return std::abs(alpha) + std::abs(xi);
  if (kind == "vacuum_two_photon") return 1.0;
  return std::abs(alpha);
}

StateSpec parse_state(const json& j) {
  if (!j.is_object() || !j.contains("kind")) throw ConfigError("state: missing 'kind'");
  StateSpec s;
  s.kind = get_string(j["kind"], "state.kind");
  check_keys(j, state_keys(s.kind), "state (" + s.kind + ")");
  if (j.contains("alpha")) s.alpha = get_complex(j["alpha"], "state.alpha");
  if (j.contains("chi_t")) s.chi_t = get_number(j["chi_t"], "state.chi_t");
  if (j.contains("c2")) s.c2 = get_number(j["c2"], "state.c2");
  if (j.contains("alpha_sch")) s.alpha_sch = get_complex(j["alpha_sch"], "state.alpha_sch");
  if (j.contains("xi")) s.xi = get_complex(j["xi"], "state.xi");
  if (j.contains("n")) s.n = get_int(j["n"], "state.n");
  if (j.contains("dim")) s.dim = get_int(j["dim"], "state.dim");
  if (j.contains("parity")) {
    const std::string p = get_string(j["parity"], "state.parity");
    if (p != "even" && p != "odd") throw ConfigError("state.parity must be 'even' or 'odd'");
    s.parity = p == "even" ? Parity::even : Parity::odd;
  }
  if (s.kind == "fock" && s.n < 0) throw ConfigError("state.n must be non-negative");
  return s;
}

json to_json(const StateSpec& s) {
  json j = {{"kind", s.kind}};
  const auto& keys = state_keys(s.kind);
  if (keys.count("alpha")) j["alpha"] = complex_to_json(s.alpha);
  if (keys.count("chi_t")) j["chi_t"] = s.chi_t;
  if (keys.count("c2")) j["c2"] = s.c2;
  if (keys.count("alpha_sch")) j["alpha_sch"] = complex_to_json(s.alpha_sch);
  if (keys.count("parity")) j["parity"] = s.parity == Parity::even ? "even" : "odd";
  if (keys.count("xi")) j["xi"] = complex_to_json(s.xi);
  if (keys.count("n")) j["n"] = s.n;
  if (s.dim) j["dim"] = *s.dim;
  return j;
}

Axis parse_axis(const json& j) {
  check_keys(j, {"name", "min", "max", "count"}, "axis");
  for (const char* k : {"name", "min", "max", "count"})
    if (!j.contains(k)) throw ConfigError(std::string("axis: missing '") + k + "'");
  Axis a{get_string(j["name"], "axis.name"), get_number(j["min"], "axis.min"), get_number(j["max"], "axis.max"),
         get_int(j["count"], "axis.count")};
  a.validate();
  return a;
}

json to_json(const Axis& a) { return {{"name", a.name}, {"min", a.min}, {"max", a.max}, {"count", a.count}}; }

RunConfig parse_config(const json& j) {
  check_keys(j,
             {"command", "figure", "state", "state_b", "beamsplitter", "axes", "objective", "scan", "parameters",
              "dynamics", "output", "dim"},
             "config");
  RunConfig c;
  if (j.contains("command")) c.command = get_string(j["command"], "config.command");
  if (j.contains("figure")) c.figure = get_string(j["figure"], "config.figure");
  if (j.contains("state")) c.state = parse_state(j["state"]);
  if (j.contains("state_b")) c.state_b = parse_state(j["state_b"]);
  if (j.contains("beamsplitter")) c.beamsplitter = parse_splitter(j["beamsplitter"]);
  if (j.contains("axes")) {
    if (!j["axes"].is_array()) throw ConfigError("config.axes: expected an array");
    std::vector<Axis> axes;
    for (const auto& a : j["axes"]) axes.push_back(parse_axis(a));
    c.axes = std::move(axes);
  }
  if (j.contains("objective")) c.objective = get_string(j["objective"], "config.objective");
  if (j.contains("scan")) c.scan = parse_axis(j["scan"]);
  if (j.contains("parameters")) {
    if (!j["parameters"].is_object()) throw ConfigError("config.parameters: expected an object");
    for (const auto& [k, v] : j["parameters"].items()) c.parameters[k] = get_number(v, "parameters." + k);
  }
  if (j.contains("dynamics")) c.dynamics = parse_dynamics(j["dynamics"]);
  if (j.contains("output")) c.output = get_string(j["output"], "config.output");
  if (j.contains("dim")) {
    c.dim = get_int(j["dim"], "config.dim");
    if (*c.dim < 2) throw ConfigError("config.dim must be at least 2");
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  return parse_config(j);
}

json to_json(const RunConfig& c) {
  json j = json::object();
  if (c.command) j["command"] = *c.command;
  if (c.figure) j["figure"] = *c.figure;
  if (c.state) j["state"] = to_json(*c.state);
  if (c.state_b) j["state_b"] = to_json(*c.state_b);
  if (c.beamsplitter) j["beamsplitter"] = {{"R", c.beamsplitter->R}, {"phi", c.beamsplitter->phi}};
  if (c.axes) {
    j["axes"] = json::array();
    for (const auto& a : *c.axes) j["axes"].push_back(to_json(a));
  }
  if (c.objective) j["objective"] = *c.objective;
  if (c.scan) j["scan"] = to_json(*c.scan);
  if (!c.parameters.empty()) j["parameters"] = c.parameters;
  if (c.dynamics) j["dynamics"] = to_json(*c.dynamics);
  if (c.output) j["output"] = *c.output;
  if (c.dim) j["dim"] = *c.dim;
  return j;
}

int state_dim(const StateSpec& s, std::optional<int> override_dim) {
  if (s.dim) return *s.dim;
  if (override_dim) return *override_dim;
  int d = default_dim(s.amplitude());
  if (s.kind == "squeezed_coherent") d = std::max(d, static_cast<int>(std::ceil(20.0 * (1.0 + std::abs(s.xi)))));
  if (s.kind == "fock") d = std::max(d, s.n + 1);
  return d;
}

FockVector make_state(const StateSpec& s, int dim) {
  if (s.kind == "vacuum") return FockVector::vacuum(dim);
  if (s.kind == "fock") return FockVector::basis(s.n, dim);
  if (s.kind == "coherent") return coherent(s.alpha, dim);
  if (s.kind == "phase_modified_coherent") return phase_modified_coherent(s.alpha, dim);
  if (s.kind == "kerr_coherent") return kerr_coherent({s.alpha, s.chi_t}, dim);
  if (s.kind == "vacuum_two_photon") return vacuum_two_photon(s.c2, dim);
  if (s.kind == "cat_state") return cat_state({s.alpha_sch, s.parity}, dim);
  if (s.kind == "squeezed_coherent") return squeezed_coherent(s.alpha, s.xi, dim);
  throw ConfigError("state: unknown kind '" + s.kind + "'");
}

}  // namespace antibunch
