#include "antibunch/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "antibunch/errors.hpp"
#include "antibunch/states.hpp"

namespace antibunch {

namespace {

struct Pipeline {
  std::string name;
  std::vector<std::string> params;
  std::vector<std::string> required;
};

const std::vector<Pipeline>& pipelines() {
  static const std::vector<Pipeline> list = {
      {"coherent", {"alpha", "alpha_phase", "alpha_b", "R", "phi", "dim"}, {"alpha", "R", "phi"}},
      {"phase_modified", {"alpha", "alpha_phase", "alpha_b", "R", "phi", "dim"}, {"alpha", "R", "phi"}},
      {"kerr", {"alpha", "alpha_phase", "chi_t", "alpha_b", "R", "phi", "dim"}, {"alpha", "chi_t", "R", "phi"}},
      {"two_photon", {"c2", "alpha_b", "R", "phi", "dim"}, {"c2", "alpha_b", "R", "phi"}},
      {"cat", {"alpha_sch", "alpha_b", "R", "phi", "parity", "dim"}, {"alpha_sch", "alpha_b", "R", "phi"}},
      {"squeezed", {"r", "omega", "alpha_a", "alpha_b", "Phi", "R", "phi", "dim"}, {"r", "alpha_b", "R", "phi"}},
  };
  return list;
}

const Pipeline& find_pipeline(const std::string& name) {
  for (const auto& p : pipelines())
    if (p.name == name) return p;
  throw ConfigError("unknown objective '" + name + "'");
}

double get(const Params& p, const std::string& key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

void check_params(const Pipeline& pl, const Params& p) {
  for (const auto& [k, v] : p) {
    if (std::find(pl.params.begin(), pl.params.end(), k) == pl.params.end()) {
      throw ConfigError("objective " + pl.name + ": unknown parameter '" + k + "'");
    }
    if (!std::isfinite(v)) throw ConfigError("objective " + pl.name + ": parameter '" + k + "' is not finite");
  }
  for (const auto& k : pl.required)
    if (!p.count(k)) throw ConfigError("objective " + pl.name + ": missing parameter '" + k + "'");
}

cplx phased(double amplitude, double phase_pi) { return std::polar(amplitude, std::numbers::pi * phase_pi); }

int pinned_dim(const Params& p) {
  const double d = get(p, "dim", 0.0);
  if (d == 0.0) return 0;
  if (d < 2 || d != std::floor(d)) throw ConfigError("objective: dim must be an integer >= 2");
  return static_cast<int>(d);
}

double coherent_b(const std::string& name, const Params& p) {
  if (name == "coherent" || name == "phase_modified" || name == "kerr") return get(p, "alpha_b", p.at("alpha"));
  return p.at("alpha_b");
}

int squeezed_dim(const Params& p) {
  const double r = std::abs(p.at("r"));
  const int needed = static_cast<int>(std::ceil(20.0 * (1.0 + r) - 1e-12));
  return std::max({default_dim(std::abs(get(p, "alpha_a", 0.0)) + r), needed, 48});
}

}  // namespace

std::vector<std::string> objective_names() {
  std::vector<std::string> names;
  for (const auto& p : pipelines()) names.push_back(p.name);
  return names;
}

std::vector<std::string> objective_parameters(const std::string& name) { return find_pipeline(name).params; }

std::pair<int, int> objective_dims(const std::string& name, const Params& p) {
  const Pipeline& pl = find_pipeline(name);
  check_params(pl, p);
  const int pin = pinned_dim(p);
  const int db = pin ? pin : default_dim(std::abs(coherent_b(name, p)));
  if (pin) return {pin, db};
  if (name == "two_photon") return {16, db};
  if (name == "cat") return {default_dim(std::abs(p.at("alpha_sch"))), db};
  if (name == "squeezed") return {squeezed_dim(p), db};
  return {default_dim(std::abs(p.at("alpha"))), db};
}

Objective make_objective(const std::string& name) {
  const Pipeline& pl = find_pipeline(name);
  return [name, &pl](const Params& p) -> OutputStats {
    const auto [da, db] = objective_dims(name, p);
    const BeamsplitterParams bs(p.at("R"), p.at("phi"));
    const FockVector b = coherent(phased(coherent_b(name, p), get(p, "Phi", 0.0)), db);
    if (name == "coherent" || name == "phase_modified" || name == "kerr") {
      const cplx alpha = phased(p.at("alpha"), get(p, "alpha_phase", 0.0));
      if (name == "coherent") return output_g2(coherent(alpha, da), b, bs);
      if (name == "phase_modified") return output_g2(phase_modified_coherent(alpha, da), b, bs);
      return output_g2(kerr_coherent({alpha, p.at("chi_t")}, da), b, bs);
    }
    if (name == "two_photon") return output_g2(vacuum_two_photon(p.at("c2"), da), b, bs);
    if (name == "cat") {
      const double parity = get(p, "parity", 0.0);
      if (parity != 0.0 && parity != 1.0) throw ConfigError("objective cat: parity must be 0 or 1");
      return output_g2(cat_state({p.at("alpha_sch"), parity == 0.0 ? Parity::even : Parity::odd}, da), b, bs);
    }
    const cplx xi = phased(p.at("r"), get(p, "omega", 0.0));
    return output_g2(squeezed_coherent(get(p, "alpha_a", 0.0), xi, da), b, bs);
  };
}

SweepResult sweep(const SweepSpec& spec) { return sweep(spec, make_objective(spec.objective)); }

}  // namespace antibunch
