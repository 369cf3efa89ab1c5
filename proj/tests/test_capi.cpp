#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sghum/sghum.h"

namespace {

const double kSqrt2 = std::sqrt(2.0);

std::string fetch(const std::function<sg_status(char*, size_t, size_t*)>& call) {
  size_t needed = 0;
  REQUIRE(call(nullptr, 0, &needed) == SG_ERR_BUFFER_TOO_SMALL);
  std::string buf(needed, '\0');
  REQUIRE(call(buf.data(), buf.size(), &needed) == SG_OK);
  buf.resize(needed - 1);
  return buf;
}

struct Fixture {
  sg_graph* g = nullptr;
  sg_model* m = nullptr;
  Fixture() {
    const double l[] = {1, 1, 1}, a[] = {kSqrt2, kSqrt2};
    REQUIRE(sg_graph_create(l, 3, a, 2, &g) == SG_OK);
    REQUIRE(sg_model_create(g, 4, &m) == SG_OK);
  }
  ~Fixture() {
    sg_model_destroy(m);
    sg_graph_destroy(g);
  }
};

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(sg_status_name(SG_OK)) == "ok");
  CHECK(std::string(sg_status_name(SG_ERR_NOT_CONVERGED)) == "not_converged");
  CHECK(std::string(sg_version()).size() > 0);
}

TEST_CASE("graph constants through the C interface") {
  Fixture f;
  double L = 0, Lbar = 0, eps = 0, T = 0, C = 0;
  CHECK(sg_graph_length_constants(f.g, &L, &Lbar) == SG_OK);
  CHECK(L == 1.0);
  CHECK(Lbar == 2.0);
  CHECK(sg_graph_optimal_horizon(f.g, &eps, &T) == SG_OK);
  CHECK(T == doctest::Approx(4.197754034990307).epsilon(1e-13));
  CHECK(sg_graph_c_theory(f.g, 0.25, 6.0, &C) == SG_OK);
  CHECK(C == doctest::Approx(0.3595395318383611).epsilon(1e-13));
  CHECK(sg_graph_t_min(f.g, 0.9, &T) == SG_ERR_DOMAIN);
  CHECK(std::string(sg_last_error()).find("epsilon") != std::string::npos);
  const auto j = nlohmann::json::parse(fetch([&](char* b, size_t c, size_t* n) { return sg_graph_validate_json(f.g, b, c, n); }));
  CHECK(j["ok"] == true);
  CHECK(j["T_opt"].get<double>() == doctest::Approx(4.197754034990307));
}

TEST_CASE("invalid graphs are reported, not modelled") {
  const double l[] = {1, 1, 1}, a[] = {1, 1};
  sg_graph* g = nullptr;
  REQUIRE(sg_graph_create(l, 3, a, 2, &g) == SG_OK);
  const auto j = nlohmann::json::parse(fetch([&](char* b, size_t c, size_t* n) { return sg_graph_validate_json(g, b, c, n); }));
  CHECK(j["ok"] == false);
  CHECK(j["L"].is_null());
  sg_model* m = nullptr;
  CHECK(sg_model_create(g, 4, &m) == SG_ERR_INVALID_CONFIG);
  CHECK(m == nullptr);
  sg_graph_destroy(g);
  CHECK(sg_graph_create(l, 3, a, 2, nullptr) == SG_ERR_INVALID_ARGUMENT);
}

TEST_CASE("simulate, conserve and export") {
  Fixture f;
  const int n = sg_model_n_dof(f.m);
  CHECK(n == 21);
  CHECK(sg_model_n_slots(f.m) == 2);
  std::vector<sg_complex> u(static_cast<size_t>(n));
  REQUIRE(sg_model_state_from_json(f.m, R"({"type": "eigenmode", "index": 0})", u.data(), u.size()) == SG_OK);
  double mass = 0;
  REQUIRE(sg_model_mass_norm2(f.m, u.data(), u.size(), &mass) == SG_OK);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sg_model_state_from_json(f.m, "{nope", u.data(), u.size()) == SG_ERR_INVALID_ARGUMENT);
  CHECK(sg_model_state_from_json(f.m, R"({"type": "zero"})", u.data(), 3) == SG_ERR_INVALID_ARGUMENT);

  sg_trajectory* t = nullptr;
  REQUIRE(sg_simulate(f.m, u.data(), u.size(), 1.0, 100, 10, &t) == SG_OK);
  CHECK(sg_trajectory_n_states(t) == 11);
  std::vector<sg_complex> last(static_cast<size_t>(n));
  CHECK(sg_trajectory_final(t, last.data(), last.size()) == SG_OK);
  const auto cons = nlohmann::json::parse(
      fetch([&](char* b, size_t c, size_t* k) { return sg_trajectory_conservation_json(t, b, c, k); }));
  CHECK(cons["mass_drift"].get<double>() <= 1e-10);
  const auto path = (std::filesystem::temp_directory_path() / "sghum_capi_traj.csv").string();
  CHECK(sg_trajectory_write_csv(t, path.c_str()) == SG_OK);
  CHECK(std::filesystem::exists(path));
  std::filesystem::remove(path);
  CHECK(sg_trajectory_write_csv(t, "/nonexistent-dir/x.csv") == SG_ERR_IO);
  sg_trajectory_destroy(t);
}

TEST_CASE("identity report through the C interface") {
  Fixture f;
  std::vector<sg_complex> u(static_cast<size_t>(sg_model_n_dof(f.m)));
  REQUIRE(sg_model_state_from_json(f.m, R"({"type": "random_modes", "n_modes": 4, "seed": 3})", u.data(), u.size()) == SG_OK);
  sg_trajectory* t = nullptr;
  REQUIRE(sg_simulate(f.m, u.data(), u.size(), 0.5, 50, 1, &t) == SG_OK);
  for (const char* q : {"1", "x", "[0, 0, 1]"}) {
    const auto j = nlohmann::json::parse(
        fetch([&](char* b, size_t c, size_t* k) { return sg_trajectory_identity_json(t, q, b, c, k); }));
    CHECK(j["identity"]["terms"].size() == 17);
    CHECK(j.contains("vertex_balance"));
  }
  size_t need = 0;
  CHECK(sg_trajectory_identity_json(t, "[1,1,1,1,1,1]", nullptr, 0, &need) == SG_ERR_INVALID_ARGUMENT);
  CHECK(sg_trajectory_identity_json(t, "y", nullptr, 0, &need) == SG_ERR_INVALID_ARGUMENT);
  sg_trajectory_destroy(t);
}

TEST_CASE("control and observation through the C interface") {
  Fixture f;
  const size_t n = static_cast<size_t>(sg_model_n_dof(f.m));
  std::vector<sg_complex> u0(n), uT(n);
  REQUIRE(sg_model_state_from_json(f.m, R"({"type": "random_modes", "n_modes": 5, "seed": 1})", u0.data(), n) == SG_OK);
  REQUIRE(sg_model_state_from_json(f.m, R"({"type": "eigenmode", "index": 1})", uT.data(), n) == SG_OK);
  sg_hum_result* r = nullptr;
  REQUIRE(sg_hum_solve(f.m, u0.data(), uT.data(), n, 5.0, 400, 1e-8, &r) == SG_OK);
  const auto j = nlohmann::json::parse(fetch([&](char* b, size_t c, size_t* k) { return sg_hum_result_json(r, b, c, k); }));
  CHECK(j["steering_error_M"].get<double>() <= 1e-6);
  std::vector<sg_complex> h(2 * 401);
  CHECK(sg_hum_result_controls(r, h.data(), h.size()) == SG_OK);
  CHECK(sg_hum_result_controls(r, h.data(), 5) == SG_ERR_INVALID_ARGUMENT);
  sg_hum_result_destroy(r);

  // Replaying the controls lands on the target.
  sg_trajectory* t = nullptr;
  CHECK(sg_simulate_controlled(f.m, u0.data(), n, h.data(), 7, 5.0, 400, 100, &t) == SG_ERR_INVALID_ARGUMENT);
  REQUIRE(sg_simulate_controlled(f.m, u0.data(), n, h.data(), h.size(), 5.0, 400, 100, &t) == SG_OK);
  std::vector<sg_complex> vT(n), diff(n);
  REQUIRE(sg_trajectory_final(t, vT.data(), n) == SG_OK);
  for (size_t i = 0; i < n; ++i) diff[i] = {vT[i].re - uT[i].re, vT[i].im - uT[i].im};
  double e2 = 0.0, t2 = 0.0;
  REQUIRE(sg_model_mass_norm2(f.m, diff.data(), n, &e2) == SG_OK);
  REQUIRE(sg_model_mass_norm2(f.m, uT.data(), n, &t2) == SG_OK);
  CHECK(std::sqrt(e2 / t2) <= 1e-6);
  const auto out = std::filesystem::temp_directory_path() / "sghum_capi_echo.csv";
  CHECK(sg_trajectory_write_controls_csv(t, out.string().c_str()) == SG_OK);
  std::filesystem::remove(out);
  sg_trajectory_destroy(t);

  REQUIRE(sg_hum_solve(f.m, u0.data(), nullptr, n, 5.0, 400, 1e-8, &r) == SG_OK);
  sg_hum_result_destroy(r);

  const auto d = nlohmann::json::parse(
      fetch([&](char* b, size_t c, size_t* k) { return sg_observe_json(f.m, 5.0, 100, 0.0, 1e-8, 7, b, c, k); }));
  CHECK(d["epsilon"].get<double>() == 0.25);
  CHECK(d["lambda_max"].get<double>() >= d["lambda_min"].get<double>());

  char small[4];
  size_t need = 0;
  CHECK(sg_observe_json(f.m, 5.0, 100, 0.0, 1e-8, 7, small, sizeof small, &need) == SG_ERR_BUFFER_TOO_SMALL);
  CHECK(need > sizeof small);
}
