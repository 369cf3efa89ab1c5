#pragma once

#include <json.hpp>

#include "sghum/hum.hpp"
#include "sghum/multiplier_checks.hpp"
#include "sghum/profiles.hpp"

namespace sghum {

using json = nlohmann::ordered_json;

/// {"ok", "violations": [{"constraint", "message"}]}
json to_json(const ValidationReport& rep);

/// Keys lambda_min, lambda_max, c_theory, one_over_c_theory, iterations, T, T_min, epsilon,
/// below_half_theory. Absent optionals are null.
json to_json(const GramianDiagnostics& diag);

/// Keys cg_iterations, cg_residual, steering_error_M, steering_error_dual, control_energy,
/// residual_history, energy_decrements.
json to_json(const HUMResult& res);

/// Keys mass_drift, energy_drift, gram_drift, n_states, initial {mass, h1, h2}.
json to_json(const ConservationReport& rep);

/// multiplier, terms (one key per term, in summation order), residual, scale, relative.
json to_json(const IdentityReport& rep);

json to_json(const VertexBalance& vb);

/// Profile objects:
///   {"type": "zero"}
///   {"type": "gaussian" | "bump", "edge", "center", "width", "amplitude"}
///   {"type": "eigenmode", "index", "amplitude"}
///   {"type": "random_modes", "n_modes", "seed", "amplitude"}
/// "amplitude" is a number or [re, im] (default 1). A JSON array is a superposition.
/// Throws std::invalid_argument on unknown types or malformed fields.
std::vector<Profile> profiles_from_json(const json& j);

}  // namespace sghum
