#pragma once

#include <string>
#include <vector>

#include "antibunch/optimizer.hpp"

namespace antibunch {

/// Named g2 evaluation pipelines: build both input states from a parameter map,
/// mix them on the splitter and return the statistics of output mode A.
///
///   coherent        alpha, alpha_b, R, phi
///   phase_modified  alpha, alpha_b, R, phi
///   kerr            alpha, chi_t, alpha_b, R, phi
///   two_photon      c2, alpha_b, R, phi
///   cat             alpha_sch, alpha_b, R, phi, parity (0 even, 1 odd)
///   squeezed        r, omega, alpha_a, alpha_b, Phi, R, phi
///
/// Phases (phi, omega, Phi, alpha_phase) are in units of pi. When alpha_b is
/// absent from the first three pipelines both inputs share alpha. An optional
/// "dim" pins the truncation of both inputs.
Objective make_objective(const std::string& name);

std::vector<std::string> objective_names();

/// Parameters a pipeline accepts.
std::vector<std::string> objective_parameters(const std::string& name);

/// Truncations a pipeline would use for the given parameters.
std::pair<int, int> objective_dims(const std::string& name, const Params& p);

/// sweep() with the objective looked up by spec.objective.
SweepResult sweep(const SweepSpec& spec);

}  // namespace antibunch
