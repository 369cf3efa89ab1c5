#pragma once

#include <array>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sghum/star_graph.hpp"
#include "sghum/types.hpp"

namespace sghum {

/// Which nodal quantity a per-edge degree of freedom carries.
enum class NodalKind { value = 0, slope = 1 };

/// H^2-conforming cubic Hermite space on a star graph with the essential conditions
/// eliminated:
///   - u_1(-l_1) = d_x u_1(-l_1) = 0 and u_j(l_j) = 0 for j >= 2;
///   - d_x u_j(l_j) is an inhomogeneous slot (control) or zero;
///   - one free vertex value a = u_1(0), with u_j(0) = a / alpha_j;
///   - one free vertex slope s_j = d_x u_j(0) per edge j >= 2, with d_x u_1(0) = sum_j s_j / alpha_j.
/// The second and third derivative vertex couplings are natural conditions of the bilinear form.
///
/// Global free dof order: edge-1 interior nodes, vertex value, vertex slopes of edges 2..N,
/// then interior nodes of edges 2..N. Each interior node carries (value, slope).
class DiscreteGraphSpace {
 public:
  /// Throws std::invalid_argument for an invalid config or elements_per_edge < 1.
  DiscreteGraphSpace(StarGraphConfig cfg, int elements_per_edge, bool control_tips_free);

  [[nodiscard]] const StarGraphConfig& config() const { return cfg_; }
  [[nodiscard]] int n_edges() const { return cfg_.n_edges(); }
  [[nodiscard]] int elements_per_edge() const { return n_e_; }
  [[nodiscard]] bool control_tips_free() const { return tips_free_; }
  [[nodiscard]] int n_dof() const { return n_dof_; }
  /// Tip-slope slots, one per controlled edge (slot j-2 belongs to edge j).
  [[nodiscard]] int n_slots() const { return cfg_.n_controlled(); }

  [[nodiscard]] int vertex_value_dof() const { return vertex_value_; }
  [[nodiscard]] int vertex_slope_dof(int edge) const { return vertex_value_ + (edge - 1); }

  [[nodiscard]] double element_size(int edge) const { return cfg_.length(edge) / n_e_; }
  /// Coordinate of node k (0..n_e) in the edge's own parametrization.
  [[nodiscard]] double node_x(int edge, int k) const;

  /// Index into the per-edge nodal vector: ((edge-1)(n_e+1) + node) * 2 + kind.
  [[nodiscard]] int local_index(int edge, int node, NodalKind kind) const {
    return ((edge - 1) * (n_e_ + 1) + node) * 2 + static_cast<int>(kind);
  }
  [[nodiscard]] int n_local() const { return n_edges() * (n_e_ + 1) * 2; }

  /// Maps free coefficients to per-edge nodal values (n_local x n_dof).
  [[nodiscard]] const SparseMatrix& embedding() const { return embed_; }
  /// Maps tip-slope slots to per-edge nodal values (n_local x n_slots).
  [[nodiscard]] const SparseMatrix& slot_embedding() const { return slot_embed_; }

  /// Per-edge nodal values of a state with optional tip-slope data.
  [[nodiscard]] CVector nodal_values(const CVector& coeffs, const CVector* slots = nullptr) const;

  /// Counts of free dofs, for diagnostics.
  struct DofSummary {
    int interior = 0;
    int vertex_value = 0;
    int vertex_slopes = 0;
    int constrained_slots = 0;
  };
  [[nodiscard]] DofSummary summary() const;

 private:
  StarGraphConfig cfg_;
  int n_e_;
  bool tips_free_;
  int n_dof_ = 0;
  int vertex_value_ = 0;
  SparseMatrix embed_;
  SparseMatrix slot_embed_;
};

/// Hermitian matrices of the three quadratic forms on the free space, plus the
/// coupling blocks to the tip-slope slots used for boundary forcing and flux observation.
struct GraphMatrices {
  SparseMatrix M;   // int u conj(v)
  SparseMatrix K1;  // int u' conj(v')
  SparseMatrix K2;  // int u'' conj(v'')
  SparseMatrix K;   // K1 + K2, the generator i M u_t = K u
  SparseMatrix G;   // M + K1 + K2, discrete H^2_0 Gram matrix
  SparseMatrix M_slot;  // n_dof x n_slots
  SparseMatrix K_slot;  // n_dof x n_slots
};

GraphMatrices assemble(const DiscreteGraphSpace& space);

/// Space and matrices bundled; shared read-only between solvers.
struct Discretization {
  DiscreteGraphSpace space;
  GraphMatrices matrices;
};

std::shared_ptr<const Discretization> discretize(const StarGraphConfig& cfg, int elements_per_edge,
                                                 bool control_tips_free);

/// Single interval (0, length) clamped at both ends: free dofs are the interior nodes.
/// Used as a clamped-beam benchmark for the element matrices.
GraphMatrices assemble_clamped_interval(double length, int n_elements);

struct VertexTrace {
  cplx value;                      // u_1(0)
  cplx slope;                      // d_x u_1(0)
  std::vector<cplx> edge_values;   // u_j(0), j = 1..N (index j-1)
  std::vector<cplx> edge_slopes;   // d_x u_j(0), j = 1..N
};

VertexTrace vertex_trace(const DiscreteGraphSpace& space, const CVector& coeffs);

/// Largest generalized eigenvalue of (M, K1): the discrete best constant c_h in
/// ||f||^2 <= c_h ||f'||^2.
double poincare_constant(const DiscreteGraphSpace& space, const GraphMatrices& matrices);

/// Derivatives d^k u / dx^k, k = 0..3, of the Hermite reconstruction.
using PointDerivatives = std::array<cplx, 4>;

/// Evaluates the reconstruction on `element` (0..n_e-1) of `edge` at local coordinate s in [0,1].
/// `nodal` is the output of DiscreteGraphSpace::nodal_values.
PointDerivatives evaluate(const DiscreteGraphSpace& space, const CVector& nodal, int edge, int element, double s);

/// Edge ends. For edge 1 `left` is -l_1 and `right` the vertex; for j >= 2 `left` is the vertex.
enum class EdgeEnd { left, right };
PointDerivatives evaluate_end(const DiscreteGraphSpace& space, const CVector& nodal, int edge, EdgeEnd end);

/// A function given per edge as (value, slope) at a point of the edge's own coordinate.
struct ProfileValue {
  cplx value;
  cplx slope;
};
using ProfileFunction = std::function<ProfileValue(int edge, double x)>;

/// Hermite interpolant onto the free dofs (constrained dofs are dropped; the vertex value
/// is taken from edge 1 and the vertex slopes from edges 2..N).
CVector interpolate(const DiscreteGraphSpace& space, const ProfileFunction& f);

/// Matrix Market coordinate (real general) dump.
void write_matrix_market(const SparseMatrix& A, const std::string& path);

}  // namespace sghum
