#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <vector>

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include "sghum/fem_assembly.hpp"

namespace sghum {

/// Uniformly sampled tip-slope controls h_j(t_n), one row per controlled edge
/// (row j-2 is edge j), n_steps+1 columns. Piecewise linear between nodes.
struct ControlSignal {
  double t0 = 0.0;
  double t1 = 0.0;
  int n_steps = 0;
  Eigen::MatrixXcd samples;

  [[nodiscard]] double tau() const { return (t1 - t0) / n_steps; }
  [[nodiscard]] CVector at(int node) const { return samples.col(node); }
  static ControlSignal zero(int n_controlled, double T, int n_steps);
};

/// States at uniform time nodes. For forced runs `slots` holds the tip-slope values at
/// the same nodes; it is empty for homogeneous runs.
struct Trajectory {
  std::vector<GraphState> states;
  std::vector<CVector> slots;
  double tau = 0.0;
  int stride = 1;  // time nodes between stored states

  [[nodiscard]] bool forced() const { return !slots.empty(); }
  [[nodiscard]] const GraphState& front() const { return states.front(); }
  [[nodiscard]] const GraphState& back() const { return states.back(); }
};

/// One-step Crank-Nicolson (Cayley) map for i M u_t = K u on a fixed discretization:
///   (M + i tau K/2) u^{n+1} = (M - i tau K/2) u^n  - M_s (h^{n+1} - h^n) - i tau K_s (h^n + h^{n+1})/2
/// where h are the tip-slope slots. Negative tau steps backward and is the exact inverse.
///
/// Factorizations are cached per tau behind a mutex; a Propagator may be shared between threads.
class Propagator {
 public:
  explicit Propagator(std::shared_ptr<const Discretization> disc);

  [[nodiscard]] const Discretization& discretization() const { return *disc_; }
  [[nodiscard]] const DiscreteGraphSpace& space() const { return disc_->space; }
  [[nodiscard]] const GraphMatrices& matrices() const { return disc_->matrices; }
  [[nodiscard]] int n_dof() const { return disc_->space.n_dof(); }

  [[nodiscard]] CVector step(const CVector& u, double tau) const;
  [[nodiscard]] CVector step(const CVector& u, double tau, const CVector& slots_now, const CVector& slots_next) const;

  [[nodiscard]] CVector solve_mass(const CVector& rhs) const;
  [[nodiscard]] CVector solve_gram(const CVector& rhs) const;

  /// L^2 projection onto the homogeneous space of the full function (coeffs + slot lifting).
  [[nodiscard]] CVector projected(const CVector& coeffs, const CVector& slots) const;

  /// Number of distinct step sizes factorized so far.
  [[nodiscard]] size_t cached_factorizations() const;

 private:
  struct Cayley {
    Eigen::SparseLU<CSparseMatrix> lhs;
    CSparseMatrix rhs;
  };
  const Cayley& cayley(double tau) const;

  std::shared_ptr<const Discretization> disc_;
  Eigen::SimplicialLDLT<SparseMatrix> mass_;
  Eigen::SimplicialLDLT<SparseMatrix> gram_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::unique_ptr<Cayley>> cache_;
};

/// Forward solve on [0, T]. Without controls this is the homogeneous problem.
/// With controls the tip-slope slots equal h_j(t_n) at every node, and the initial free
/// coefficients are shifted so that the L^2 projection of the full initial function equals u0.
Trajectory solve_forward(const Propagator& prop, const GraphState& u0, const ControlSignal* controls, double T,
                         int n_steps, int thin = 1);

/// Backward solve of the homogeneous (adjoint) problem from final data vT at time T.
/// States are returned in increasing time order with stamps n*tau (vT.time is ignored).
Trajectory solve_adjoint(const Propagator& prop, const GraphState& vT, double T, int n_steps, int thin = 1);

/// Trajectory export: columns time, dof, real, imag.
void write_trajectory_csv(const Trajectory& traj, const std::string& path);

}  // namespace sghum
