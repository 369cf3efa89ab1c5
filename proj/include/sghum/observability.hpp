#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "sghum/errors.hpp"
#include "sghum/propagator.hpp"

namespace sghum {

/// Boundary observation d_x^2 v_j(l_j, t_n) of an adjoint trajectory, one row per controlled edge.
///
/// The value is the variationally consistent flux. With phi_j the tip-slope basis function of
/// edge j, an exact solution satisfies d_x^2 v_j(l_j) = a(v, phi_j) - i (v_t, phi_j). Evaluated on
/// Crank-Nicolson half steps,
///   psi^{n+1/2} = K_s^T (v^n + v^{n+1})/2 - i M_s^T (v^{n+1} - v^n)/tau,
/// and mapped to nodes by o^0 = psi^{1/2}, o^N = psi^{N-1/2}, o^n = (psi^{n-1/2} + psi^{n+1/2})/2.
/// With trapezoidal weights this makes the discrete duality identity exact.
struct ObservationTrace {
  double T = 0.0;
  int n_steps = 0;
  Eigen::MatrixXcd values;

  [[nodiscard]] double tau() const { return T / n_steps; }
  [[nodiscard]] ControlSignal as_control() const { return {0.0, T, n_steps, values}; }
};

/// Requires an unthinned homogeneous trajectory.
ObservationTrace observe(const Propagator& prop, const Trajectory& adjoint);

/// Same as observe(solve_adjoint(vT)), without storing the trajectory.
ObservationTrace observe_adjoint(const Propagator& prop, const CVector& vT, double T, int n_steps);

/// Pointwise one-sided second derivative of the Hermite reconstruction at x = l_j.
Eigen::MatrixXcd tip_second_derivative(const DiscreteGraphSpace& space, const Trajectory& traj);

/// Trapezoidal sum_j int a_j(t) conj(b_j(t)) dt over uniform nodes.
cplx trapezoid_pairing(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double tau);

/// Q(v, w) = sum_j int obs_j(v) conj(obs_j(w)) dt.
cplx gramian_quadratic(const Propagator& prop, const CVector& vT, const CVector& wT, double T, int n_steps);

/// Controlled forward solve from a zero (projected) initial state; returns the final state in
/// dual form z = M P u(T), i.e. the functional u(T) tested against the free basis.
CVector control_to_final_dual(const Propagator& prop, const ControlSignal& controls);

/// Gramian operator: Gamma vT = i z(obs(vT)), so that w^* Gamma v = Q(v, w).
/// Needs a space with control_tips_free = true.
CVector apply_gramian(const Propagator& prop, const CVector& vT, double T, int n_steps);

/// Golub-Kahan bidiagonalization of the control-to-state map L h = control_to_final_dual(h).
/// States carry the G^{-1} inner product (dual of the energy space), controls the trapezoidal
/// L^2 product. Then L^* d = i obs(G^{-1} d) and L L^* = Gamma G^{-1}, so the singular values
/// of L are the square roots of the eigenvalues of the pencil (Gamma, G). Working with L
/// instead of Gamma keeps small eigenvalues resolvable down to eps^2 * lambda_max.
/// Both sides are fully reorthogonalized.
///
///   L V_k = U_{k+1} B_k,   L^* U_k = V_k Bt_k^T,
/// with B_k lower bidiagonal (alpha on the diagonal, beta below) and Bt_k its leading k x k block.
class GolubKahan {
 public:
  enum class Status { extended, states_exhausted, adjoint_vanished };

  /// `start` is a state in dual form; it must be nonzero.
  GolubKahan(const Propagator& prop, double T, int n_steps, const CVector& start);

  /// Computes beta_{k+1}, u_{k+1} and, unless that exhausts the state side, alpha_{k+1}, v_{k+1}.
  Status extend();

  [[nodiscard]] int size() const { return static_cast<int>(alpha_.size()); }
  [[nodiscard]] double alpha(int j) const { return alpha_[static_cast<size_t>(j)]; }
  /// beta(0) is the norm of the start vector; beta(k) couples u_{k+1} to v_k.
  [[nodiscard]] double beta(int j) const { return beta_[static_cast<size_t>(j)]; }
  [[nodiscard]] int n_beta() const { return static_cast<int>(beta_.size()); }
  /// Latest state direction u (dual form), G^{-1}-normalized.
  [[nodiscard]] const CVector& last_state() const { return u_.back(); }
  /// Adjoint final data t_j with v_j = i obs(t_j).
  [[nodiscard]] const CVector& adjoint_data(int j) const { return t_[static_cast<size_t>(j)]; }
  /// Leading k x k bidiagonal block.
  [[nodiscard]] Eigen::MatrixXd bidiagonal() const;

 private:
  [[nodiscard]] CVector apply_adjoint(const CVector& g_state) const;
  [[nodiscard]] cplx control_dot(const CVector& a, const CVector& b) const;

  const Propagator& prop_;
  double T_;
  int n_steps_;
  std::vector<CVector> u_, gu_, v_, t_;
  std::vector<double> alpha_, beta_;
  Eigen::VectorXd weights_;
};

/// Dense Gamma, one application per unit vector. Intended for n_dof <= 200.
Eigen::MatrixXcd dense_gramian(const Propagator& prop, double T, int n_steps);

struct GramianDiagnostics {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  std::optional<double> c_theory;
  int iterations = 0;
  double T = 0.0;
  std::optional<double> T_min;
  double epsilon = 0.0;
  /// lambda_min < 1/(2 c_theory); informational only.
  bool below_half_theory = false;
};

struct LambdaOptions {
  double tol = 1e-8;
  int max_iter = 0;  // 0: n_dof
  std::uint64_t seed = 20240601;
};

/// Extreme generalized eigenvalues of the pencil (Gamma, G), as squared extreme singular values
/// of GolubKahan from a seeded random start. Also fills c_theory when T > t_min(eps).
/// Runs until the state space is exhausted (n_dof steps) unless max_iter is smaller; in that case
/// throws NotConverged if the extreme Ritz pairs are not resolved to tol.
GramianDiagnostics lambda_min(const Propagator& prop, double T, int n_steps, double epsilon,
                              const LambdaOptions& opts = {});

}  // namespace sghum
