#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>

#include "sghum/hum.hpp"
#include "sghum/profiles.hpp"

using namespace sghum;

namespace {

const double kSqrt2 = std::sqrt(2.0);
StarGraphConfig unit3() { return {{1, 1, 1}, {kSqrt2, kSqrt2}}; }

CVector modes(const Discretization& d, int n_modes, std::uint64_t seed) {
  Profile pr;
  pr.kind = Profile::Kind::random_modes;
  pr.n_modes = n_modes;
  pr.seed = seed;
  return build_state(d, {pr});
}

double m_norm(const Propagator& p, const CVector& u) {
  return std::sqrt(u.dot(p.matrices().M.cast<cplx>() * u).real());
}

}  // namespace

TEST_CASE("free evolution") {
  const auto d = discretize(unit3(), 4, true);
  const Propagator p(d);
  CHECK(free_final_state(p, {CVector::Zero(p.n_dof()), 0.0}, 1.0, 50).coeffs.norm() == 0.0);
  const CVector u0 = modes(*d, 5, 1);
  const auto uT = free_final_state(p, {u0, 0.0}, 3.0, 300);
  CHECK(uT.time == doctest::Approx(3.0));
  CHECK(std::abs(m_norm(p, uT.coeffs) - m_norm(p, u0)) <= 1e-10 * m_norm(p, u0));

  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(d->matrices.K),
                                                               Eigen::MatrixXd(d->matrices.M));
  const CVector e0 = es.eigenvectors().col(0).cast<cplx>();
  const double lam = es.eigenvalues()(0), tau = 3.0 / 3000;
  const double theta = 2 * std::atan(0.5 * tau * lam) * 3000;  // exact Cayley phase
  const CVector rotated = free_final_state(p, {e0, 0.0}, 3.0, 3000).coeffs;
  CHECK((rotated - std::exp(cplx(0, -theta)) * e0).norm() <= 1e-9);
}

TEST_CASE("zero data needs no control") {
  const Propagator p(discretize(unit3(), 4, true));
  const CVector z = CVector::Zero(p.n_dof());
  const auto r = hum_solve(p, {z, 0.0}, {z, 5.0}, 5.0, 100);
  CHECK(r.cg_iterations == 0);
  CHECK(r.controls.samples.norm() == 0.0);
  CHECK(r.steering_error_M == 0.0);
  CHECK(null_control(p, {z, 0.0}, 5.0, 100).controls.samples.norm() == 0.0);
}

TEST_CASE("steering to the free final state needs no control") {
  const auto d = discretize(unit3(), 4, true);
  const Propagator p(d);
  const CVector u0 = modes(*d, 4, 2);
  const auto uT = free_final_state(p, {u0, 0.0}, 5.0, 200);
  const auto r = hum_solve(p, {u0, 0.0}, uT, 5.0, 200);
  CHECK(r.controls.samples.norm() == 0.0);
  CHECK(r.steering_error_M <= 1e-12);
}

TEST_CASE("small instance steers exactly") {
  const auto d = discretize(unit3(), 2, true);
  const Propagator p(d);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  CVector u0(p.n_dof()), uT(p.n_dof());
  for (int k = 0; k < p.n_dof(); ++k) {
    u0[k] = cplx(g(rng), g(rng));
    uT[k] = cplx(g(rng), g(rng));
  }
  HumOptions o;
  o.cg_tol = 1e-10;
  const auto r = hum_solve(p, {u0, 0.0}, {uT, 5.0}, 5.0, 200, o);
  CHECK(r.cg_residual <= 1e-10);
  CHECK(r.steering_error_M <= 1e-8);
  CHECK(r.steering_error_dual <= 1e-8);
  CHECK((r.final_state - uT).norm() <= 1e-7 * uT.norm());

  // Craig accumulates the control energy term by term.
  const double total = std::accumulate(r.energy_decrements.begin(), r.energy_decrements.end(), 0.0);
  CHECK(total == doctest::Approx(r.control_energy).epsilon(1e-8));
  CHECK(r.control_energy == doctest::Approx(gramian_quadratic(p, r.vT.coeffs, r.vT.coeffs, 5.0, 200).real()).epsilon(1e-12));
  double partial = 0.0;
  for (double e : r.energy_decrements) {
    CHECK(e >= 0.0);
    partial += e;
    CHECK(partial <= r.control_energy * (1 + 1e-10));
  }
}

TEST_CASE("null control drives a low-mode state to rest") {
  const auto d = discretize(unit3(), 4, true);
  const Propagator p(d);
  const CVector u0 = modes(*d, 6, 3);
  const auto r = null_control(p, {u0, 0.0}, 5.0, 1000);
  CHECK(m_norm(p, r.final_state) <= 1e-6 * m_norm(p, u0));
}

TEST_CASE("steering error is measured by re-simulation, not by the recurrence") {
  // With 400 steps the sixth mode has tau * lambda ~ 30 and is barely steerable.
  const auto d = discretize(unit3(), 4, true);
  const Propagator p(d);
  const CVector u0 = modes(*d, 6, 3);
  const auto r = null_control(p, {u0, 0.0}, 5.0, 400);
  const double direct = m_norm(p, r.final_state) / m_norm(p, u0);
  CHECK(r.steering_error_M == doctest::Approx(direct).epsilon(1e-12));
  const auto tr = solve_forward(p, {u0, 0.0}, &r.controls, 5.0, 400, 400);
  CHECK((p.projected(tr.back().coeffs, tr.slots.back()) - r.final_state).norm() == 0.0);
}

TEST_CASE("a longer horizon needs less control energy") {
  const auto d = discretize(unit3(), 4, true);
  const Propagator p(d);
  const CVector u0 = modes(*d, 6, 4);
  const double e1 = null_control(p, {u0, 0.0}, 5.0, 400).control_energy;
  const double e2 = null_control(p, {u0, 0.0}, 10.0, 800).control_energy;
  MESSAGE("control energy T=5: " << e1 << ", T=10: " << e2);
  CHECK(e2 < e1);
}

TEST_CASE("an unreachable target within a tiny horizon reports non-convergence") {
  const auto d = discretize(unit3(), 4, true);
  const Propagator p(d);
  HumOptions o;
  o.max_iter = 5;
  CHECK_THROWS_AS(null_control(p, {modes(*d, 6, 5), 0.0}, 0.05, 20, o), NotConverged);
}

TEST_CASE("controls csv export") {
  const Propagator p(discretize(unit3(), 2, true));
  ControlSignal h = ControlSignal::zero(2, 1.0, 3);
  h.samples(1, 2) = cplx(0.5, -0.25);
  const auto path = std::filesystem::temp_directory_path() / "sghum_controls.csv";
  write_controls_csv(h, path.string());
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "time,edge,real,imag");
  std::vector<std::string> rows;
  while (std::getline(in, line)) rows.push_back(line);
  REQUIRE(rows.size() == 8);
  CHECK(rows[0].rfind("0,2,", 0) == 0);
  CHECK(rows[5].find(",3,0.5,-0.25") != std::string::npos);
  std::filesystem::remove(path);
}
