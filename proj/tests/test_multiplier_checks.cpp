#include <doctest.h>

#include <cmath>
#include <random>

#include "sghum/multiplier_checks.hpp"
#include "sghum/profiles.hpp"

using namespace sghum;

namespace {

const double kSqrt2 = std::sqrt(2.0);
StarGraphConfig unit3() { return {{1, 1, 1}, {kSqrt2, kSqrt2}}; }

CVector low_modes(const Discretization& d, std::initializer_list<int> idx) {
  std::vector<Profile> parts;
  int k = 0;
  for (int i : idx) {
    Profile p;
    p.kind = Profile::Kind::eigenmode;
    p.index = i;
    p.amplitude = cplx(1.0 / (1 + k), 0.4 * k);
    parts.push_back(p);
    ++k;
  }
  return build_state(d, parts);
}

}  // namespace

TEST_CASE("quadratic forms scale quadratically") {
  const auto d = discretize(unit3(), 4, false);
  const auto z = quadratic_forms(d->matrices, CVector::Zero(d->space.n_dof()));
  CHECK(z.mass == 0.0);
  CHECK(z.h1 == 0.0);
  CHECK(z.h2 == 0.0);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  CVector u(d->space.n_dof());
  for (auto& x : u) x = cplx(g(rng), g(rng));
  const cplx c(2.0, -1.0);
  const auto a = quadratic_forms(d->matrices, u), b = quadratic_forms(d->matrices, c * u);
  CHECK(b.mass == doctest::Approx(5.0 * a.mass).epsilon(1e-13));
  CHECK(b.h1 == doctest::Approx(5.0 * a.h1).epsilon(1e-13));
  CHECK(b.h2 == doctest::Approx(5.0 * a.h2).epsilon(1e-13));
}

TEST_CASE("conservation report on homogeneous runs") {
  const auto d = discretize(unit3(), 8, false);
  const Propagator p(d);
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  CVector u(p.n_dof());
  for (auto& x : u) x = cplx(g(rng), g(rng));
  const auto rep = conservation_report(d->matrices, solve_forward(p, {u, 0.0}, nullptr, 1.0, 1000));
  CHECK(rep.n_states == 1001);
  CHECK(rep.mass_drift <= 1e-10);
  CHECK(rep.energy_drift <= 1e-10);
  CHECK(rep.gram_drift <= 1e-10);
  const auto one = conservation_report(d->matrices, solve_forward(p, {u, 0.0}, nullptr, 0.001, 1));
  CHECK(one.mass_drift <= 1e-14);

  const Propagator pf(discretize(unit3(), 4, true));
  auto h = ControlSignal::zero(2, 1.0, 10);
  h.samples.setConstant(1.0);
  const auto forced = solve_forward(pf, {CVector::Zero(pf.n_dof()), 0.0}, &h, 1.0, 10);
  CHECK_THROWS_AS(conservation_report(pf.matrices(), forced), std::invalid_argument);
}

TEST_CASE("multiplier derivatives") {
  const auto q = MultiplierFunction::polynomial({1.0, -2.0, 0.5, 3.0, -1.0});
  const double x = 0.7;
  CHECK(q.derivative(0, x) == doctest::Approx(1 - 2 * x + 0.5 * x * x + 3 * x * x * x - x * x * x * x));
  CHECK(q.derivative(1, x) == doctest::Approx(-2 + x + 9 * x * x - 4 * x * x * x));
  CHECK(q.derivative(2, x) == doctest::Approx(1 + 18 * x - 12 * x * x));
  CHECK(q.derivative(3, x) == doctest::Approx(18 - 24 * x));
  CHECK(q.derivative(4, x) == doctest::Approx(-24));
  CHECK(MultiplierFunction::x().derivative(1, -0.3) == 1.0);
  CHECK(MultiplierFunction::one().derivative(1, 0.2) == 0.0);
  CHECK(MultiplierFunction::one().name() == "1");
  CHECK(MultiplierFunction::x().name() == "x");
  CHECK_THROWS_AS(MultiplierFunction::polynomial({1, 1, 1, 1, 1, 1}), std::invalid_argument);
}

TEST_CASE("zero trajectory gives a zero identity") {
  const auto d = discretize(unit3(), 4, false);
  const Propagator p(d);
  const auto tr = solve_forward(p, {CVector::Zero(p.n_dof()), 0.0}, nullptr, 1.0, 10);
  const auto r = morawetz_residual(p, tr, MultiplierFunction::x());
  CHECK(r.terms.size() == 17);
  for (const auto& [name, v] : r.terms) CHECK(v == 0.0);
  CHECK(r.residual == 0.0);
  CHECK(r.relative() == 0.0);
}

TEST_CASE("identity residual shrinks under refinement") {
  for (const auto& q : {MultiplierFunction::one(), MultiplierFunction::x()}) {
    std::vector<double> rel;
    for (int level = 0; level < 2; ++level) {
      const auto d = discretize(unit3(), 8 << level, false);
      const Propagator p(d);
      const auto tr = solve_forward(p, {low_modes(*d, {0, 1, 2}), 0.0}, nullptr, 1.0, 500 << level);
      rel.push_back(morawetz_residual(p, tr, q).relative());
    }
    MESSAGE("q = " << q.name() << ": " << rel[0] << " -> " << rel[1]);
    CHECK(rel[1] < rel[0]);
  }
}

TEST_CASE("constant multiplier keeps only boundary and time terms") {
  const auto d = discretize(unit3(), 8, false);
  const Propagator p(d);
  const auto tr = solve_forward(p, {low_modes(*d, {0, 1}), 0.0}, nullptr, 1.0, 200);
  const auto r = morawetz_residual(p, tr, MultiplierFunction::one());
  for (const auto& [name, v] : r.terms) {
    if (name.rfind("int_", 0) == 0) CHECK(v == 0.0);
  }
  CHECK(r.terms.front().first == "int_im_u_ux_qt");
  CHECK(r.terms.back().first == "bd_re_uxxx_u_qx");
}

TEST_CASE("vertex balances") {
  const auto d = discretize(unit3(), 16, false);
  const Propagator p(d);
  const auto tr = solve_forward(p, {low_modes(*d, {0, 1, 3, 6}), 0.0}, nullptr, 1.0, 1000);
  const auto vb = vertex_balance(p, tr);
  CHECK(vb.slope_balance <= 1e-12 * vb.tip_observation);
  CHECK(std::abs(vb.second_balance) <= 1e-2 * vb.tip_observation);
  CHECK(vb.tip_inequality);
  CHECK(vb.left_tip <= vb.time_bracket + vb.tip_observation + 1e-2 * vb.tip_observation);
}
