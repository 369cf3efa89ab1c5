#include "sghum/json_io.hpp"

#include <stdexcept>

namespace sghum {

namespace {

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

cplx read_amplitude(const json& j) {
  if (!j.contains("amplitude")) return {1.0, 0.0};
  const auto& a = j.at("amplitude");
  if (a.is_number()) return {a.get<double>(), 0.0};
  if (a.is_array() && a.size() == 2) return {a[0].get<double>(), a[1].get<double>()};
  throw std::invalid_argument("profile amplitude must be a number or [re, im]");
}

Profile profile_from_json(const json& j) {
  if (!j.is_object() || !j.contains("type")) throw std::invalid_argument("profile needs a \"type\"");
  const auto type = j.at("type").get<std::string>();
  Profile p;
  p.amplitude = read_amplitude(j);
  if (type == "zero") {
    p.kind = Profile::Kind::zero;
  } else if (type == "gaussian" || type == "bump") {
    p.kind = type == "gaussian" ? Profile::Kind::gaussian : Profile::Kind::bump;
    p.edge = j.value("edge", 1);
    p.center = j.value("center", 0.0);
    p.width = j.value("width", 0.1);
  } else if (type == "eigenmode") {
    p.kind = Profile::Kind::eigenmode;
    p.index = j.value("index", 0);
  } else if (type == "random_modes") {
    p.kind = Profile::Kind::random_modes;
    p.n_modes = j.value("n_modes", 8);
    p.seed = j.value("seed", std::uint64_t{0});
  } else {
    throw std::invalid_argument("unknown profile type \"" + type + "\"");
  }
  return p;
}

}  // namespace

json to_json(const ValidationReport& rep) {
  json v = json::array();
  for (const auto& x : rep.violations) v.push_back({{"constraint", x.constraint}, {"message", x.message}});
  return {{"ok", rep.ok()}, {"violations", v}};
}

json to_json(const GramianDiagnostics& d) {
  json j;
  j["lambda_min"] = d.lambda_min;
  j["lambda_max"] = d.lambda_max;
  j["c_theory"] = optional_number(d.c_theory);
  j["one_over_c_theory"] = d.c_theory ? json(1.0 / *d.c_theory) : json(nullptr);
  j["iterations"] = d.iterations;
  j["T"] = d.T;
  j["T_min"] = optional_number(d.T_min);
  j["epsilon"] = d.epsilon;
  j["below_half_theory"] = d.below_half_theory;
  return j;
}

json to_json(const HUMResult& r) {
  return {{"cg_iterations", r.cg_iterations},
          {"cg_residual", r.cg_residual},
          {"steering_error_M", r.steering_error_M},
          {"steering_error_dual", r.steering_error_dual},
          {"control_energy", r.control_energy},
          {"residual_history", r.residual_history},
          {"energy_decrements", r.energy_decrements}};
}

json to_json(const ConservationReport& r) {
  return {{"mass_drift", r.mass_drift},
          {"energy_drift", r.energy_drift},
          {"gram_drift", r.gram_drift},
          {"n_states", r.n_states},
          {"initial", {{"mass", r.initial.mass}, {"h1", r.initial.h1}, {"h2", r.initial.h2}}}};
}

json to_json(const IdentityReport& r) {
  json terms = json::object();
  for (const auto& [name, v] : r.terms) terms[name] = v;
  return {{"multiplier", r.multiplier}, {"terms", terms},        {"residual", r.residual},
          {"scale", r.scale},           {"relative", r.relative()}};
}

json to_json(const VertexBalance& v) {
  return {{"slope_balance", v.slope_balance},     {"second_balance", v.second_balance},
          {"third_cross", v.third_cross},         {"left_tip", v.left_tip},
          {"tip_observation", v.tip_observation}, {"time_bracket", v.time_bracket},
          {"tip_inequality", v.tip_inequality}};
}

std::vector<Profile> profiles_from_json(const json& j) {
  std::vector<Profile> out;
  try {
    if (j.is_array()) {
      for (const auto& e : j) out.push_back(profile_from_json(e));
    } else {
      out.push_back(profile_from_json(j));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("malformed profile: ") + e.what());
  }
  return out;
}

}  // namespace sghum
