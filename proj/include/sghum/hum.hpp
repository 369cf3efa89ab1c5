#pragma once

#include <string>
#include <vector>

#include "sghum/errors.hpp"
#include "sghum/observability.hpp"

namespace sghum {

struct HumOptions {
  double cg_tol = 1e-8;
  int max_iter = 0;  // 0: n_dof
};

struct HUMResult {
  ControlSignal controls;
  GraphState vT;  // minimizer of the HUM functional
  int cg_iterations = 0;
  double cg_residual = 0.0;         // final relative defect, max of M and G^{-1} norms
  double steering_error_M = 0.0;    // ||P u(T) - uT||_M / max(||uT||_M, ||u0||_M)
  double steering_error_dual = 0.0; // same in the G^{-1} dual norm of M (P u(T) - uT)
  double control_energy = 0.0;      // sum_j int |h_j|^2 dt (trapezoid)
  CVector final_state;              // P u(T), the L^2 projection of the controlled final function
  std::vector<double> residual_history;
  /// ||e_k||^2_Gamma - ||e_{k+1}||^2_Gamma for each CG step.
  std::vector<double> energy_decrements;
};

/// S(T) u0, the uncontrolled evolution.
GraphState free_final_state(const Propagator& prop, const GraphState& u0, double T, int n_steps);

/// Steers u0 to uT in time T. Solves Gamma vT = i M (uT - S(T) u0) by conjugate gradients in the
/// G inner product, run as Craig's method on the bidiagonalized control-to-state map (same
/// iterates, squared-root conditioning). Sets h_j = obs_j(vT), re-simulates from u0 with these
/// controls and reports the steering errors. cg_residual is the larger of the relative defect
/// in the M^{-1} and G^{-1} norms.
/// Throws NotConverged when CG stalls (near-singular Gramian, typically T too small).
HUMResult hum_solve(const Propagator& prop, const GraphState& u0, const GraphState& uT, double T, int n_steps,
                    const HumOptions& opts = {});

/// hum_solve with uT = 0.
HUMResult null_control(const Propagator& prop, const GraphState& u0, double T, int n_steps,
                       const HumOptions& opts = {});

/// Controls CSV: columns time, edge, real, imag (edges numbered 2..N).
void write_controls_csv(const ControlSignal& controls, const std::string& path);

}  // namespace sghum
