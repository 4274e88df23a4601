#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "antibunch/fock.hpp"
#include "antibunch/optimizer.hpp"
#include "antibunch/states.hpp"

namespace antibunch {

using json = nlohmann::json;

/// Single-mode input state, e.g. {"kind": "kerr_coherent", "alpha": [0.3, 0.0], "chi_t": 0.05}.
/// Complex values are [re, im] pairs; plain numbers are read as real.
///
/// kinds and their keys:
///   vacuum                    -
///   fock                      n
///   coherent                  alpha
///   phase_modified_coherent   alpha
///   kerr_coherent             alpha, chi_t
///   vacuum_two_photon         c2
///   cat_state                 alpha_sch, parity ("even" | "odd")
///   squeezed_coherent         alpha, xi
/// Every kind also accepts "dim".
struct StateSpec {
  std::string kind;
  cplx alpha{0.0};
  double chi_t = 0.0;
  double c2 = 0.0;
  cplx alpha_sch{0.0};
  Parity parity = Parity::even;
  cplx xi{0.0};
  int n = 0;
  std::optional<int> dim;

  /// Largest displacement-like amplitude, used for the default truncation.
  double amplitude() const;
};

struct SplitterSpec {
  double R = 0.5;
  double phi = 0.0;
};

struct DynamicsSpec {
  double U = 0.01;
  double J = 6.2;
  int dim = 12;
  double tau_max = 10.0;
  int tau_points = 201;
  /// Fixed values; parameters left unset are tuned.
  std::optional<double> F_single, Delta_single, F_coupled, Delta_coupled;
  std::optional<cplx> beta;
};

struct RunConfig {
  std::optional<std::string> command;
  std::optional<std::string> figure;
  std::optional<StateSpec> state;
  std::optional<StateSpec> state_b;
  std::optional<SplitterSpec> beamsplitter;
  /// Grid axes (or inner axes of a minimum curve) and the objective.
  std::optional<std::vector<Axis>> axes;
  std::optional<std::string> objective;
  std::optional<Axis> scan;
  /// Pinned objective parameters, merged over figure defaults.
  Params parameters;
  std::optional<DynamicsSpec> dynamics;
  std::optional<std::string> output;
  std::optional<int> dim;
};

/// Strict parsing: unknown keys and wrong types raise ConfigError.
RunConfig parse_config(const json& j);
RunConfig load_config(const std::string& path);
json to_json(const RunConfig& c);

StateSpec parse_state(const json& j);
json to_json(const StateSpec& s);
Axis parse_axis(const json& j);
json to_json(const Axis& a);

/// Builds the state at the given truncation.
FockVector make_state(const StateSpec& s, int dim);

/// Truncation for a state: explicit dim, else override, else the default rule.
int state_dim(const StateSpec& s, std::optional<int> override_dim);

json complex_to_json(cplx z);

}  // namespace antibunch
