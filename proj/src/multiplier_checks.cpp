#include "sghum/multiplier_checks.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "sghum/hermite.hpp"

namespace sghum {

namespace {

double rel_dev(double v, double v0) {
  const double d = std::abs(v - v0);
  return v0 != 0.0 ? d / std::abs(v0) : d;
}

double re(cplx a, cplx b) { return (a * std::conj(b)).real(); }
double im(cplx a, cplx b) { return (a * std::conj(b)).imag(); }

void require_homogeneous(const Trajectory& traj, const char* who) {
  if (traj.forced()) throw std::invalid_argument(std::string(who) + ": trajectory must be homogeneous");
  if (traj.states.empty()) throw std::invalid_argument(std::string(who) + ": empty trajectory");
}

double trapezoid(const std::vector<double>& f, double dt) {
  if (f.size() < 2) return 0.0;
  double s = 0.5 * (f.front() + f.back());
  for (size_t n = 1; n + 1 < f.size(); ++n) s += f[n];
  return s * dt;
}

// Edge endpoints in the edge's own coordinate.
std::pair<double, double> edge_range(const StarGraphConfig& cfg, int edge) {
  return edge == 1 ? std::pair{-cfg.length(1), 0.0} : std::pair{0.0, cfg.length(edge)};
}

}  // namespace

QuadraticForms quadratic_forms(const GraphMatrices& m, const CVector& u) {
  auto form = [&](const SparseMatrix& A) { return u.dot(A.cast<cplx>() * u).real(); };
  return {form(m.M), form(m.K1), form(m.K2)};
}

ConservationReport conservation_report(const GraphMatrices& m, const Trajectory& traj) {
  require_homogeneous(traj, "conservation_report");
  ConservationReport rep;
  rep.initial = quadratic_forms(m, traj.front().coeffs);
  rep.n_states = static_cast<int>(traj.states.size());
  const double e0 = rep.initial.h1 + rep.initial.h2;
  const double g0 = rep.initial.mass + e0;
  for (const auto& s : traj.states) {
    const auto f = quadratic_forms(m, s.coeffs);
    rep.mass_drift = std::max(rep.mass_drift, rel_dev(f.mass, rep.initial.mass));
    rep.energy_drift = std::max(rep.energy_drift, rel_dev(f.h1 + f.h2, e0));
    rep.gram_drift = std::max(rep.gram_drift, rel_dev(f.mass + f.h1 + f.h2, g0));
  }
  return rep;
}

MultiplierFunction MultiplierFunction::polynomial(std::vector<double> coeffs) {
  if (coeffs.empty()) coeffs.push_back(0.0);
  if (coeffs.size() > 5) throw std::invalid_argument("multiplier polynomial degree must be <= 4");
  for (double c : coeffs) {
    if (!std::isfinite(c)) throw std::invalid_argument("multiplier coefficients must be finite");
  }
  return MultiplierFunction(Kind::polynomial, std::move(coeffs));
}

double MultiplierFunction::derivative(int k, double x) const {
  double v = 0.0;
  double xp = 1.0;
  for (int p = k; p < static_cast<int>(coeffs_.size()); ++p) {
    double f = 1.0;
    for (int r = 0; r < k; ++r) f *= p - r;
    v += f * coeffs_[static_cast<size_t>(p)] * xp;
    xp *= x;
  }
  return v;
}

std::string MultiplierFunction::name() const {
  switch (kind_) {
    case Kind::constant_one: return "1";
    case Kind::coordinate_x: return "x";
    case Kind::polynomial: break;
  }
  std::string s = "poly(";
  for (size_t i = 0; i < coeffs_.size(); ++i) {
    if (i) s += ",";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", coeffs_[i]);
    s += buf;
  }
  return s + ")";
}

IdentityReport morawetz_residual(const Propagator& prop, const Trajectory& traj, const MultiplierFunction& q) {
  require_homogeneous(traj, "morawetz_residual");
  const auto& space = prop.space();
  const auto& cfg = space.config();
  const int N = space.n_edges();
  const int ne = space.elements_per_edge();
  const auto& rule = hermite::gauss6();
  const CSparseMatrix K = prop.matrices().K.cast<cplx>();
  const double dt = traj.tau * traj.stride;
  const size_t nt = traj.states.size();

  // Per time node: 5 interior integrals, the Im(u conj u_x) q integral, 10 boundary brackets.
  std::vector<std::array<double, 16>> per(nt);
  for (size_t n = 0; n < nt; ++n) {
    const CVector& c = traj.states[n].coeffs;
    const CVector nodal = space.nodal_values(c);
    const CVector nodal_t = space.nodal_values(cplx(0.0, -1.0) * prop.solve_mass(K * c));
    auto& a = per[n];
    a.fill(0.0);
    for (int e = 1; e <= N; ++e) {
      const double h = space.element_size(e);
      for (int k = 0; k < ne; ++k) {
        const double x0 = space.node_x(e, k);
        for (size_t g = 0; g < rule.nodes.size(); ++g) {
          const double s = rule.nodes[g];
          const double w = rule.weights[g] * h;
          const double x = x0 + s * h;
          const auto d = evaluate(space, nodal, e, k, s);
          const double ux2 = std::norm(d[1]);
          const double uxx2 = std::norm(d[2]);
          const double rxu = re(d[1], d[0]);
          a[0] += w * ux2 * q.derivative(1, x);
          a[1] += w * uxx2 * q.derivative(1, x);
          a[2] += w * rxu * q.derivative(2, x);
          a[3] += w * ux2 * q.derivative(3, x);
          a[4] += w * rxu * q.derivative(4, x);
          a[5] += w * im(d[0], d[1]) * q.derivative(0, x);
        }
      }
      const auto [xl, xr] = edge_range(cfg, e);
      for (int side = 0; side < 2; ++side) {
        const double sign = side == 0 ? -1.0 : 1.0;
        const double x = side == 0 ? xl : xr;
        const EdgeEnd end = side == 0 ? EdgeEnd::left : EdgeEnd::right;
        const auto d = evaluate_end(space, nodal, e, end);
        const auto dtu = evaluate_end(space, nodal_t, e, end);
        const double q0 = q.derivative(0, x), q1 = q.derivative(1, x), q2 = q.derivative(2, x),
                     q3 = q.derivative(3, x);
        a[6] += sign * std::norm(d[2]) * q0;
        a[7] += sign * im(d[0], dtu[0]) * q0;
        a[8] += sign * std::norm(d[1]) * q0;
        a[9] += sign * re(d[1], d[0]) * q1;
        a[10] += sign * std::norm(d[1]) * q2;
        a[11] += sign * re(d[2], d[1]) * q1;
        a[12] += sign * re(d[3], d[1]) * q0;
        a[13] += sign * re(d[1], d[0]) * q3;
        a[14] += sign * re(d[2], d[0]) * q2;
        a[15] += sign * re(d[3], d[0]) * q1;
      }
    }
  }
  auto tint = [&](int idx) {
    std::vector<double> f(nt);
    for (size_t n = 0; n < nt; ++n) f[n] = per[n][static_cast<size_t>(idx)];
    return trapezoid(f, dt);
  };

  IdentityReport rep;
  rep.multiplier = q.name();
  rep.terms = {
      {"int_im_u_ux_qt", 0.0},
      {"int_ux2_qx", -tint(0)},
      {"int_uxx2_qx", -2.0 * tint(1)},
      {"int_re_ux_u_qxx", -0.5 * tint(2)},
      {"int_ux2_qxxx", 1.5 * tint(3)},
      {"int_re_ux_u_qxxxx", 0.5 * tint(4)},
      {"time_im_u_ux_q", -0.5 * (per.back()[5] - per.front()[5])},
      {"bd_uxx2_q", 0.5 * tint(6)},
      {"bd_im_u_ut_q", 0.5 * tint(7)},
      {"bd_ux2_q", 0.5 * tint(8)},
      {"bd_re_ux_u_qx", 0.5 * tint(9)},
      {"bd_ux2_qxx", -tint(10)},
      {"bd_re_uxx_ux_qx", 1.5 * tint(11)},
      {"bd_re_uxxx_ux_q", -tint(12)},
      {"bd_re_ux_u_qxxx", -0.5 * tint(13)},
      {"bd_re_uxx_u_qxx", 0.5 * tint(14)},
      {"bd_re_uxxx_u_qx", -0.5 * tint(15)},
  };
  double sum = 0.0;
  for (const auto& [name, v] : rep.terms) {
    sum += v;
    rep.scale = std::max(rep.scale, std::abs(v));
  }
  rep.residual = std::abs(sum);
  return rep;
}

VertexBalance vertex_balance(const Propagator& prop, const Trajectory& traj) {
  require_homogeneous(traj, "vertex_balance");
  const auto& space = prop.space();
  const int N = space.n_edges();
  const int ne = space.elements_per_edge();
  const auto& rule = hermite::gauss6();
  const double dt = traj.tau * traj.stride;
  const size_t nt = traj.states.size();
  std::vector<double> slope(nt), second(nt), third(nt), left(nt), tips(nt);
  std::vector<double> bracket(nt, 0.0);
  for (size_t n = 0; n < nt; ++n) {
    const CVector nodal = space.nodal_values(traj.states[n].coeffs);
    const auto v1 = evaluate_end(space, nodal, 1, EdgeEnd::right);
    slope[n] = std::norm(v1[1]);
    second[n] = std::norm(v1[2]);
    third[n] = -re(v1[3], v1[1]);
    left[n] = std::norm(evaluate_end(space, nodal, 1, EdgeEnd::left)[2]);
    tips[n] = 0.0;
    for (int j = 2; j <= N; ++j) {
      const auto vj = evaluate_end(space, nodal, j, EdgeEnd::left);
      slope[n] -= std::norm(vj[1]);
      second[n] -= std::norm(vj[2]);
      third[n] += re(vj[3], vj[1]);
      tips[n] += std::norm(evaluate_end(space, nodal, j, EdgeEnd::right)[2]);
    }
    if (n == 0 || n + 1 == nt) {
      for (int e = 1; e <= N; ++e) {
        const double h = space.element_size(e);
        for (int k = 0; k < ne; ++k) {
          for (size_t g = 0; g < rule.nodes.size(); ++g) {
            const auto d = evaluate(space, nodal, e, k, rule.nodes[g]);
            bracket[n] += rule.weights[g] * h * im(d[0], d[1]);
          }
        }
      }
    }
  }
  VertexBalance vb;
  vb.slope_balance = trapezoid(slope, dt);
  vb.second_balance = trapezoid(second, dt);
  vb.third_cross = trapezoid(third, dt);
  vb.left_tip = trapezoid(left, dt);
  vb.tip_observation = trapezoid(tips, dt);
  vb.time_bracket = bracket.back() - bracket.front();
  vb.tip_inequality = vb.left_tip <= vb.time_bracket + vb.tip_observation;
  return vb;
}

}  // namespace sghum
