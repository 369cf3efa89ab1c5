#pragma once

#include <string>
#include <utility>
#include <vector>

#include "sghum/propagator.hpp"

namespace sghum {

/// (u^* M u, u^* K1 u, u^* K2 u).
struct QuadraticForms {
  double mass = 0.0;
  double h1 = 0.0;
  double h2 = 0.0;
};

QuadraticForms quadratic_forms(const GraphMatrices& m, const CVector& u);

/// Largest relative deviation from the initial value over a trajectory.
struct ConservationReport {
  double mass_drift = 0.0;    // u^* M u
  double energy_drift = 0.0;  // u^* (K1 + K2) u
  double gram_drift = 0.0;    // u^* G u
  QuadraticForms initial;
  int n_states = 0;
};

ConservationReport conservation_report(const GraphMatrices& m, const Trajectory& traj);

/// Time-independent real polynomial multiplier q(x) = sum_k c_k x^k, in each edge's own coordinate.
class MultiplierFunction {
 public:
  enum class Kind { constant_one, coordinate_x, polynomial };

  static MultiplierFunction one() { return MultiplierFunction(Kind::constant_one, {1.0}); }
  static MultiplierFunction x() { return MultiplierFunction(Kind::coordinate_x, {0.0, 1.0}); }
  /// Throws std::invalid_argument for degree > 4.
  static MultiplierFunction polynomial(std::vector<double> coeffs);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const std::vector<double>& coeffs() const { return coeffs_; }
  /// d^k q / dx^k at x, k = 0..4.
  [[nodiscard]] double derivative(int k, double x) const;
  [[nodiscard]] std::string name() const;

 private:
  MultiplierFunction(Kind kind, std::vector<double> coeffs) : kind_(kind), coeffs_(std::move(coeffs)) {}
  Kind kind_;
  std::vector<double> coeffs_;
};

/// Terms of the multiplier identity for i u_t + u_xx - u_xxxx = 0, in summation order.
/// int_* are space-time integrals over the graph, bd_* are int_0^T of the boundary bracket
/// (right end minus left end on every edge), time_* is the bracket between t = 0 and t = T.
///   int_im_u_ux_qt      (1/2) Im int u conj(u_x) q_t            (zero for q = q(x))
///   int_ux2_qx          -    int |u_x|^2 q_x
///   int_uxx2_qx         -2   int |u_xx|^2 q_x
///   int_re_ux_u_qxx     -1/2 int Re(u_x conj u) q_xx
///   int_ux2_qxxx        +3/2 int |u_x|^2 q_xxx
///   int_re_ux_u_qxxxx   +1/2 int Re(u_x conj u) q_xxxx
///   time_im_u_ux_q      -1/2 [int Im(u conj u_x) q]_0^T
///   bd_uxx2_q           +1/2 [|u_xx|^2 q]
///   bd_im_u_ut_q        +1/2 [Im(u conj u_t) q]
///   bd_ux2_q            +1/2 [|u_x|^2 q]
///   bd_re_ux_u_qx       +1/2 [Re(u_x conj u) q_x]
///   bd_ux2_qxx          -    [|u_x|^2 q_xx]
///   bd_re_uxx_ux_qx     +3/2 [Re(u_xx conj u_x) q_x]
///   bd_re_uxxx_ux_q     -    [Re(u_xxx conj u_x) q]
///   bd_re_ux_u_qxxx     -1/2 [Re(u_x conj u) q_xxx]
///   bd_re_uxx_u_qxx     +1/2 [Re(u_xx conj u) q_xx]
///   bd_re_uxxx_u_qx     -1/2 [Re(u_xxx conj u) q_x]
/// For an exact solution the sum vanishes.
struct IdentityReport {
  std::string multiplier;
  std::vector<std::pair<std::string, double>> terms;
  double residual = 0.0;  // |sum of terms|
  double scale = 0.0;     // max |term|

  [[nodiscard]] double relative() const { return scale > 0.0 ? residual / scale : 0.0; }
};

/// Evaluates the identity on a homogeneous trajectory. Space integrals are exact Gauss
/// quadrature per element, time integrals trapezoidal over the stored states, boundary
/// derivatives one-sided from the adjacent element. u_t at the boundary comes from the
/// semi-discrete equation u_t = -i M^{-1} K u.
IdentityReport morawetz_residual(const Propagator& prop, const Trajectory& traj, const MultiplierFunction& q);

/// Vertex and tip quantities used after the q = 1 multiplier step.
struct VertexBalance {
  double slope_balance = 0.0;        // int (|u_1'(0)|^2 - sum_j |u_j'(0)|^2) dt, <= 0
  double second_balance = 0.0;       // int (|u_1''(0)|^2 - sum_j |u_j''(0)|^2) dt, -> 0 under refinement
  double third_cross = 0.0;          // -Re int (u_1'''(0) conj u_1'(0) - sum_j u_j'''(0) conj u_j'(0)) dt
  double left_tip = 0.0;             // int |u_1''(-l_1)|^2 dt
  double tip_observation = 0.0;      // int sum_j |u_j''(l_j)|^2 dt
  double time_bracket = 0.0;         // Im [int u conj u_x]_0^T
  /// left_tip <= time_bracket + tip_observation.
  bool tip_inequality = false;
};

VertexBalance vertex_balance(const Propagator& prop, const Trajectory& traj);

}  // namespace sghum
