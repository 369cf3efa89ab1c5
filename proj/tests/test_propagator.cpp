#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <thread>

#include <Eigen/Eigenvalues>

#include "sghum/propagator.hpp"

using namespace sghum;

namespace {

const double kSqrt2 = std::sqrt(2.0);
StarGraphConfig unit3() { return {{1, 1, 1}, {kSqrt2, kSqrt2}}; }

CVector random_state(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVector u(n);
  for (int k = 0; k < n; ++k) u[k] = cplx(g(rng), g(rng));
  return u;
}

double m_norm2(const Propagator& p, const CVector& u) {
  return u.dot(p.matrices().M.cast<cplx>() * u).real();
}

}  // namespace

TEST_CASE("zero in, zero out") {
  const Propagator p(discretize(unit3(), 4, true));
  const CVector z = CVector::Zero(p.n_dof());
  CHECK(p.step(z, 0.01).norm() == 0.0);
  const CVector zs = CVector::Zero(2);
  CHECK(p.step(z, 0.01, zs, zs).norm() == 0.0);
  const auto tr = solve_forward(p, {z, 0.0}, nullptr, 1.0, 20);
  for (const auto& s : tr.states) CHECK(s.coeffs.norm() == 0.0);
  const auto zc = ControlSignal::zero(2, 1.0, 20);
  const auto tc = solve_forward(p, {z, 0.0}, &zc, 1.0, 20);
  for (const auto& s : tc.states) CHECK(s.coeffs.norm() == 0.0);
  const auto ta = solve_adjoint(p, {z, 1.0}, 1.0, 20);
  for (const auto& s : ta.states) CHECK(s.coeffs.norm() == 0.0);
}

TEST_CASE("one step matches the dense Cayley map on a six-dof space") {
  const auto d = discretize({{1, 1}, {1}}, 2, false);
  const Propagator p(d);
  REQUIRE(p.n_dof() == 6);
  const Eigen::MatrixXcd M = Eigen::MatrixXd(d->matrices.M).cast<cplx>();
  const Eigen::MatrixXcd K = Eigen::MatrixXd(d->matrices.K).cast<cplx>();
  const double tau = 0.013;
  const cplx half(0.0, 0.5 * tau);
  std::mt19937_64 rng(1);
  const CVector u = random_state(6, rng);
  const CVector dense = (M + half * K).lu().solve((M - half * K) * u);
  const CVector v = p.step(u, tau);
  CHECK((v - dense).norm() <= 1e-12 * u.norm());
  CHECK(std::abs(m_norm2(p, v) - m_norm2(p, u)) <= 1e-12 * m_norm2(p, u));
}

TEST_CASE("backward step inverts the forward step") {
  const Propagator p(discretize(unit3(), 8, false));
  std::mt19937_64 rng(2);
  const CVector u = random_state(p.n_dof(), rng);
  CHECK((p.step(p.step(u, 0.002), -0.002) - u).norm() <= 1e-12 * u.norm());
  CHECK(p.cached_factorizations() == 2);
}

TEST_CASE("eigenvector evolves by a phase with second-order error") {
  const auto d = discretize(unit3(), 8, false);
  const Propagator p(d);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(d->matrices.K),
                                                               Eigen::MatrixXd(d->matrices.M));
  const double lam = es.eigenvalues()(0);
  const CVector u0 = es.eigenvectors().col(0).cast<cplx>();
  const double T = 0.5;
  double prev = 0.0;
  for (int n : {200, 400, 800}) {
    const double tau = T / n;
    const auto tr = solve_forward(p, {u0, 0.0}, nullptr, T, n, n);
    const CVector exact = std::exp(cplx(0.0, -lam * T)) * u0;
    const double err = std::sqrt(m_norm2(p, tr.back().coeffs - exact));
    CHECK(err <= 1.01 * T * tau * tau * lam * lam * lam / 12.0);
    if (prev > 0.0) CHECK(prev / err == doctest::Approx(4.0).epsilon(0.01));
    prev = err;
  }
}

TEST_CASE("homogeneous runs conserve the three quadratic forms") {
  const auto d = discretize(unit3(), 8, false);
  const Propagator p(d);
  std::mt19937_64 rng(4);
  const CVector u0 = random_state(p.n_dof(), rng);
  const auto tr = solve_forward(p, {u0, 0.0}, nullptr, 2.0, 1000);
  REQUIRE(tr.states.size() == 1001);
  const CSparseMatrix K = d->matrices.K.cast<cplx>(), G = d->matrices.G.cast<cplx>();
  const double m0 = m_norm2(p, u0), k0 = u0.dot(K * u0).real(), g0 = u0.dot(G * u0).real();
  for (const auto& s : tr.states) {
    CHECK(std::abs(m_norm2(p, s.coeffs) - m0) <= 1e-10 * m0);
    CHECK(std::abs(s.coeffs.dot(K * s.coeffs).real() - k0) <= 1e-10 * k0);
    CHECK(std::abs(s.coeffs.dot(G * s.coeffs).real() - g0) <= 1e-10 * g0);
  }
}

TEST_CASE("time stamps, thinning and reversal") {
  const Propagator p(discretize(unit3(), 8, false));
  std::mt19937_64 rng(6);
  const CVector u0 = random_state(p.n_dof(), rng);
  const auto tr = solve_forward(p, {u0, 0.0}, nullptr, 1.0, 400, 40);
  REQUIRE(tr.states.size() == 11);
  CHECK(tr.stride == 40);
  for (size_t k = 1; k < tr.states.size(); ++k) CHECK(tr.states[k].time > tr.states[k - 1].time);
  CHECK(tr.back().time == doctest::Approx(1.0));
  const auto back = solve_adjoint(p, tr.back(), 1.0, 400, 400);
  CHECK((back.front().coeffs - u0).norm() <= 1e-9 * u0.norm());
}

TEST_CASE("adjoint solve ends at the final data and is reversible") {
  const Propagator p(discretize(unit3(), 8, false));
  std::mt19937_64 rng(7);
  const CVector vT = random_state(p.n_dof(), rng);
  const auto adj = solve_adjoint(p, {vT, 0.0}, 1.5, 300);
  CHECK(adj.back().coeffs == vT);
  CHECK(adj.front().time == 0.0);
  const auto fwd = solve_forward(p, adj.front(), nullptr, 1.5, 300, 300);
  CHECK((fwd.back().coeffs - vT).norm() <= 1e-10 * vT.norm());
}

TEST_CASE("homogeneous duality pairing is time independent") {
  const auto d = discretize(unit3(), 8, false);
  const Propagator p(d);
  const CSparseMatrix M = d->matrices.M.cast<cplx>();
  std::mt19937_64 rng(8);
  const CVector u0 = random_state(p.n_dof(), rng), vT = random_state(p.n_dof(), rng);
  const auto u = solve_forward(p, {u0, 0.0}, nullptr, 1.0, 500, 500);
  const auto v = solve_adjoint(p, {vT, 0.0}, 1.0, 500, 500);
  const cplx end = v.back().coeffs.dot(M * u.back().coeffs);
  const cplx start = v.front().coeffs.dot(M * u.front().coeffs);
  CHECK(std::abs(cplx(0, 1) * (end - start)) <= 1e-10 * std::abs(start));
}

TEST_CASE("controlled runs impose the tip slopes at every node") {
  const Propagator p(discretize(unit3(), 6, true));
  const int n = 50;
  ControlSignal h = ControlSignal::zero(2, 1.0, n);
  for (int k = 0; k <= n; ++k) {
    h.samples(0, k) = cplx(std::sin(0.3 * k), 0.1 * k);
    h.samples(1, k) = cplx(1.0, -std::cos(0.2 * k));
  }
  std::mt19937_64 rng(9);
  const CVector u0 = random_state(p.n_dof(), rng);
  const auto tr = solve_forward(p, {u0, 0.0}, &h, 1.0, n);
  REQUIRE(tr.forced());
  REQUIRE(tr.slots.size() == tr.states.size());
  for (int k = 0; k <= n; ++k) CHECK(tr.slots[static_cast<size_t>(k)] == h.at(k));
  CHECK((p.projected(tr.front().coeffs, tr.slots.front()) - u0).norm() <= 1e-12 * u0.norm());

  ControlSignal wrong = ControlSignal::zero(2, 1.0, n + 1);
  CHECK_THROWS_AS(solve_forward(p, {u0, 0.0}, &wrong, 1.0, n), std::invalid_argument);
  const Propagator clamped(discretize(unit3(), 6, false));
  CHECK_THROWS_AS(solve_forward(clamped, {CVector::Zero(clamped.n_dof()), 0.0}, &h, 1.0, n), std::invalid_argument);
}

TEST_CASE("bad arguments are rejected") {
  const Propagator p(discretize(unit3(), 4, false));
  const CVector u = CVector::Zero(p.n_dof());
  CHECK_THROWS_AS(p.step(u, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(p.step(CVector::Zero(3), 0.1), std::invalid_argument);
  CHECK_THROWS_AS(solve_forward(p, {u, 0.0}, nullptr, -1.0, 10), std::invalid_argument);
  CHECK_THROWS_AS(solve_forward(p, {u, 0.0}, nullptr, 1.0, 0), std::invalid_argument);
}

TEST_CASE("concurrent solves on one propagator agree with a serial solve") {
  const Propagator p(discretize(unit3(), 8, false));
  std::mt19937_64 rng(10);
  const CVector u0 = random_state(p.n_dof(), rng);
  const CVector serial = solve_forward(p, {u0, 0.0}, nullptr, 1.0, 300, 300).back().coeffs;
  const Propagator fresh(discretize(unit3(), 8, false));
  std::vector<CVector> out(4);
  std::vector<std::thread> pool;
  for (size_t t = 0; t < out.size(); ++t) {
    pool.emplace_back([&, t] { out[t] = solve_forward(fresh, {u0, 0.0}, nullptr, 1.0, 300, 300).back().coeffs; });
  }
  for (auto& th : pool) th.join();
  for (const auto& o : out) CHECK(o == serial);
}

TEST_CASE("trajectory csv export") {
  const Propagator p(discretize(unit3(), 2, false));
  std::mt19937_64 rng(12);
  const auto tr = solve_forward(p, {random_state(p.n_dof(), rng), 0.0}, nullptr, 1.0, 4);
  const auto path = std::filesystem::temp_directory_path() / "sghum_traj.csv";
  write_trajectory_csv(tr, path.string());
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "time,dof,real,imag");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 5 * p.n_dof());
  std::filesystem::remove(path);
}
