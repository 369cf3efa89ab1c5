#include "sghum/hum.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include "sghum/errors.hpp"

namespace sghum {

namespace {

constexpr cplx I{0.0, 1.0};

double m_norm(const Propagator& prop, const CVector& u) {
  return std::sqrt(std::max(u.dot(prop.matrices().M.cast<cplx>() * u).real(), 0.0));
}

// sqrt(r^* A^{-1} r) for the dual representation r.
double dual_norm_mass(const Propagator& prop, const CVector& r) {
  return std::sqrt(std::max(r.dot(prop.solve_mass(r)).real(), 0.0));
}
double dual_norm_gram(const Propagator& prop, const CVector& r) {
  return std::sqrt(std::max(r.dot(prop.solve_gram(r)).real(), 0.0));
}

}  // namespace

GraphState free_final_state(const Propagator& prop, const GraphState& u0, double T, int n_steps) {
  auto traj = solve_forward(prop, u0, nullptr, T, n_steps, n_steps);
  return traj.back();
}

HUMResult hum_solve(const Propagator& prop, const GraphState& u0, const GraphState& uT, double T, int n_steps,
                    const HumOptions& opts) {
  if (!prop.space().control_tips_free()) {
    throw std::invalid_argument("hum_solve: needs a space built with control_tips_free = true");
  }
  if (u0.coeffs.size() != prop.n_dof() || uT.coeffs.size() != prop.n_dof()) {
    throw std::invalid_argument("hum_solve: state dimension mismatch");
  }
  if (!(opts.cg_tol > 0.0)) throw std::invalid_argument("hum_solve: cg_tol must be positive");
  const int n = prop.n_dof();
  const int max_iter = opts.max_iter > 0 ? opts.max_iter : n;
  const CSparseMatrix M = prop.matrices().M.cast<cplx>();

  const CVector free_T = free_final_state(prop, u0, T, n_steps).coeffs;
  const CVector rhs = M * (uT.coeffs - free_T);
  const double rhs_m = dual_norm_mass(prop, rhs);
  const double rhs_g = dual_norm_gram(prop, rhs);

  double denom_m = std::max(m_norm(prop, uT.coeffs), m_norm(prop, u0.coeffs));
  double denom_g = std::max(dual_norm_gram(prop, M * uT.coeffs), dual_norm_gram(prop, M * u0.coeffs));
  if (denom_m == 0.0) denom_m = 1.0;
  if (denom_g == 0.0) denom_g = 1.0;

  HUMResult res;
  CVector x = CVector::Zero(n);
  // A defect already below tolerance relative to the data needs no control.
  if (rhs_m > opts.cg_tol * denom_m || rhs_g > opts.cg_tol * denom_g) {
    // Craig's form of CG on Gamma: x = i sum_j zeta_j t_j, residual -beta_{k+1} zeta_k u_{k+1}.
    GolubKahan gk(prop, T, n_steps, rhs);
    double zeta = gk.beta(0) / gk.alpha(0);
    CVector y = zeta * gk.adjoint_data(0);
    bool converged = false;
    while (true) {
      res.energy_decrements.push_back(zeta * zeta);
      const auto status = gk.extend();
      const int k = gk.size();
      ++res.cg_iterations;
      const double r_coef = std::abs(gk.beta(res.cg_iterations) * zeta);
      double rel = r_coef / rhs_g;
      if (status != GolubKahan::Status::states_exhausted) {
        rel = std::max(rel, r_coef * dual_norm_mass(prop, gk.last_state()) / rhs_m);
      }
      res.residual_history.push_back(rel);
      res.cg_residual = rel;
      if (rel <= opts.cg_tol || status == GolubKahan::Status::states_exhausted) {
        converged = rel <= opts.cg_tol;
        break;
      }
      if (status == GolubKahan::Status::adjoint_vanished || res.cg_iterations >= max_iter) break;
      zeta = -gk.beta(k - 1) * zeta / gk.alpha(k - 1);
      y += zeta * gk.adjoint_data(k - 1);
    }
    if (!converged) {
      throw NotConverged("hum_solve: CG did not reach tolerance " + std::to_string(opts.cg_tol) + " in " +
                             std::to_string(res.cg_iterations) + " iterations (Gramian near singular?)",
                         res.cg_iterations, res.cg_residual);
    }
    x = I * y;
  }

  const auto obs = observe_adjoint(prop, x, T, n_steps);
  res.controls = obs.as_control();
  res.vT = {x, T};
  res.control_energy = trapezoid_pairing(obs.values, obs.values, obs.tau()).real();

  const auto traj = solve_forward(prop, u0, &res.controls, T, n_steps, n_steps);
  res.final_state = prop.projected(traj.back().coeffs, traj.slots.back());
  const CVector err = res.final_state - uT.coeffs;
  res.steering_error_M = m_norm(prop, err) / denom_m;
  res.steering_error_dual = dual_norm_gram(prop, M * err) / denom_g;
  return res;
}

HUMResult null_control(const Propagator& prop, const GraphState& u0, double T, int n_steps, const HumOptions& opts) {
  return hum_solve(prop, u0, {CVector::Zero(prop.n_dof()), T}, T, n_steps, opts);
}

void write_controls_csv(const ControlSignal& controls, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "time,edge,real,imag\n" << std::setprecision(17);
  const double tau = controls.tau();
  for (Eigen::Index n = 0; n < controls.samples.cols(); ++n) {
    for (Eigen::Index j = 0; j < controls.samples.rows(); ++j) {
      const cplx v = controls.samples(j, n);
      os << controls.t0 + static_cast<double>(n) * tau << ',' << j + 2 << ',' << v.real() << ',' << v.imag() << '\n';
    }
  }
  if (!os) throw std::runtime_error("failed writing " + path);
}

}  // namespace sghum
