#include "sghum/fem_assembly.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "sghum/hermite.hpp"

namespace sghum {

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix symmetrized(const SparseMatrix& A) {
  SparseMatrix At = A.transpose();
  SparseMatrix S = 0.5 * (A + At);
  S.prune(0.0);
  return S;
}

// Block-diagonal per-edge matrices in the local nodal numbering.
struct LocalMatrices {
  SparseMatrix mass, stiff1, stiff2;
};

LocalMatrices local_matrices(const DiscreteGraphSpace& space) {
  std::vector<Triplet> m, k1, k2;
  const int ne = space.elements_per_edge();
  for (int edge = 1; edge <= space.n_edges(); ++edge) {
    const auto em = hermite::element_matrices(space.element_size(edge));
    for (int el = 0; el < ne; ++el) {
      const std::array<int, 4> idx = {
          space.local_index(edge, el, NodalKind::value), space.local_index(edge, el, NodalKind::slope),
          space.local_index(edge, el + 1, NodalKind::value), space.local_index(edge, el + 1, NodalKind::slope)};
      for (int a = 0; a < 4; ++a) {
        for (int b = 0; b < 4; ++b) {
          m.emplace_back(idx[a], idx[b], em.mass[a][b]);
          k1.emplace_back(idx[a], idx[b], em.stiff1[a][b]);
          k2.emplace_back(idx[a], idx[b], em.stiff2[a][b]);
        }
      }
    }
  }
  const int n = space.n_local();
  LocalMatrices out{SparseMatrix(n, n), SparseMatrix(n, n), SparseMatrix(n, n)};
  out.mass.setFromTriplets(m.begin(), m.end());
  out.stiff1.setFromTriplets(k1.begin(), k1.end());
  out.stiff2.setFromTriplets(k2.begin(), k2.end());
  return out;
}

}  // namespace

DiscreteGraphSpace::DiscreteGraphSpace(StarGraphConfig cfg, int elements_per_edge, bool control_tips_free)
    : cfg_(std::move(cfg)), n_e_(elements_per_edge), tips_free_(control_tips_free) {
  require_valid(cfg_);
  if (n_e_ < 1) throw std::invalid_argument("elements_per_edge must be >= 1");

  const int N = cfg_.n_edges();
  const int interior = n_e_ - 1;
  std::vector<Triplet> trip;
  std::vector<Triplet> slot_trip;

  int next = 0;
  // Edge 1 interior nodes.
  for (int k = 1; k <= interior; ++k) {
    trip.emplace_back(local_index(1, k, NodalKind::value), next++, 1.0);
    trip.emplace_back(local_index(1, k, NodalKind::slope), next++, 1.0);
  }
  vertex_value_ = next++;
  next += N - 1;  // vertex slopes of edges 2..N

  trip.emplace_back(local_index(1, n_e_, NodalKind::value), vertex_value_, 1.0);
  for (int j = 2; j <= N; ++j) {
    const double a = cfg_.alpha(j);
    trip.emplace_back(local_index(1, n_e_, NodalKind::slope), vertex_slope_dof(j), 1.0 / a);
    trip.emplace_back(local_index(j, 0, NodalKind::value), vertex_value_, 1.0 / a);
    trip.emplace_back(local_index(j, 0, NodalKind::slope), vertex_slope_dof(j), 1.0);
  }
  for (int j = 2; j <= N; ++j) {
    for (int k = 1; k <= interior; ++k) {
      trip.emplace_back(local_index(j, k, NodalKind::value), next++, 1.0);
      trip.emplace_back(local_index(j, k, NodalKind::slope), next++, 1.0);
    }
    slot_trip.emplace_back(local_index(j, n_e_, NodalKind::slope), j - 2, 1.0);
  }
  n_dof_ = next;

  embed_.resize(n_local(), n_dof_);
  embed_.setFromTriplets(trip.begin(), trip.end());
  slot_embed_.resize(n_local(), n_slots());
  slot_embed_.setFromTriplets(slot_trip.begin(), slot_trip.end());
}

double DiscreteGraphSpace::node_x(int edge, int k) const {
  const double h = element_size(edge);
  return edge == 1 ? -cfg_.length(1) + k * h : k * h;
}

CVector DiscreteGraphSpace::nodal_values(const CVector& coeffs, const CVector* slots) const {
  if (coeffs.size() != n_dof_) throw std::invalid_argument("nodal_values: state has wrong dimension");
  CVector out = embed_.cast<cplx>() * coeffs;
  if (slots != nullptr) {
    if (slots->size() != n_slots()) throw std::invalid_argument("nodal_values: slot vector has wrong dimension");
    out += slot_embed_.cast<cplx>() * (*slots);
  }
  return out;
}

DiscreteGraphSpace::DofSummary DiscreteGraphSpace::summary() const {
  return {n_edges() * (n_e_ - 1) * 2, 1, n_edges() - 1, tips_free_ ? n_slots() : 0};
}

GraphMatrices assemble(const DiscreteGraphSpace& space) {
  const auto loc = local_matrices(space);
  const SparseMatrix& B = space.embedding();
  const SparseMatrix& S = space.slot_embedding();
  const SparseMatrix Bt = B.transpose();

  GraphMatrices g;
  g.M = symmetrized(Bt * loc.mass * B);
  g.K1 = symmetrized(Bt * loc.stiff1 * B);
  g.K2 = symmetrized(Bt * loc.stiff2 * B);
  g.K = symmetrized(g.K1 + g.K2);
  g.G = symmetrized(g.M + g.K);
  g.M_slot = Bt * loc.mass * S;
  g.K_slot = Bt * (loc.stiff1 + loc.stiff2) * S;
  return g;
}

std::shared_ptr<const Discretization> discretize(const StarGraphConfig& cfg, int elements_per_edge,
                                                 bool control_tips_free) {
  DiscreteGraphSpace space(cfg, elements_per_edge, control_tips_free);
  GraphMatrices mats = assemble(space);
  return std::make_shared<const Discretization>(Discretization{std::move(space), std::move(mats)});
}

GraphMatrices assemble_clamped_interval(double length, int n_elements) {
  if (!(length > 0.0) || n_elements < 2) throw std::invalid_argument("assemble_clamped_interval: bad arguments");
  const auto em = hermite::element_matrices(length / n_elements);
  const int n = 2 * (n_elements - 1);
  // Local node k has dofs 2(k-1), 2(k-1)+1 for 1 <= k <= n_e-1; end nodes are clamped.
  auto dof = [&](int node, int kind) { return (node <= 0 || node >= n_elements) ? -1 : 2 * (node - 1) + kind; };
  std::vector<Triplet> m, k1, k2;
  for (int el = 0; el < n_elements; ++el) {
    const std::array<int, 4> idx = {dof(el, 0), dof(el, 1), dof(el + 1, 0), dof(el + 1, 1)};
    for (int a = 0; a < 4; ++a) {
      for (int b = 0; b < 4; ++b) {
        if (idx[a] < 0 || idx[b] < 0) continue;
        m.emplace_back(idx[a], idx[b], em.mass[a][b]);
        k1.emplace_back(idx[a], idx[b], em.stiff1[a][b]);
        k2.emplace_back(idx[a], idx[b], em.stiff2[a][b]);
      }
    }
  }
  GraphMatrices g;
  g.M.resize(n, n);
  g.K1.resize(n, n);
  g.K2.resize(n, n);
  g.M.setFromTriplets(m.begin(), m.end());
  g.K1.setFromTriplets(k1.begin(), k1.end());
  g.K2.setFromTriplets(k2.begin(), k2.end());
  g.M = symmetrized(g.M);
  g.K1 = symmetrized(g.K1);
  g.K2 = symmetrized(g.K2);
  g.K = symmetrized(g.K1 + g.K2);
  g.G = symmetrized(g.M + g.K);
  return g;
}

VertexTrace vertex_trace(const DiscreteGraphSpace& space, const CVector& coeffs) {
  if (coeffs.size() != space.n_dof()) throw std::invalid_argument("vertex_trace: wrong dimension");
  const auto& cfg = space.config();
  const int N = space.n_edges();
  VertexTrace t;
  t.value = coeffs[space.vertex_value_dof()];
  t.edge_values.assign(static_cast<size_t>(N), cplx{});
  t.edge_slopes.assign(static_cast<size_t>(N), cplx{});
  t.edge_values[0] = t.value;
  cplx slope1{};
  for (int j = 2; j <= N; ++j) {
    const cplx s = coeffs[space.vertex_slope_dof(j)];
    t.edge_values[static_cast<size_t>(j - 1)] = t.value / cfg.alpha(j);
    t.edge_slopes[static_cast<size_t>(j - 1)] = s;
    slope1 += s / cfg.alpha(j);
  }
  t.slope = slope1;
  t.edge_slopes[0] = slope1;
  return t;
}

double poincare_constant(const DiscreteGraphSpace& space, const GraphMatrices& matrices) {
  if (space.control_tips_free()) {
    throw std::invalid_argument("poincare_constant: requires a homogeneous space (control_tips_free = false)");
  }
  const Eigen::MatrixXd M = Eigen::MatrixXd(matrices.M);
  const Eigen::MatrixXd K1 = Eigen::MatrixXd(matrices.K1);
  // M x = c K1 x  <=>  K1 x = (1/c) M x; the largest c is the inverse of the smallest eigenvalue.
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(K1, M);
  if (es.info() != Eigen::Success) throw std::runtime_error("poincare_constant: eigensolver failed");
  return 1.0 / es.eigenvalues()(0);
}

PointDerivatives evaluate(const DiscreteGraphSpace& space, const CVector& nodal, int edge, int element, double s) {
  const double h = space.element_size(edge);
  const auto b = hermite::basis(s, h);
  const std::array<cplx, 4> c = {nodal[space.local_index(edge, element, NodalKind::value)],
                                 nodal[space.local_index(edge, element, NodalKind::slope)],
                                 nodal[space.local_index(edge, element + 1, NodalKind::value)],
                                 nodal[space.local_index(edge, element + 1, NodalKind::slope)]};
  PointDerivatives d{};
  for (int k = 0; k < 4; ++k) {
    for (int a = 0; a < 4; ++a) d[static_cast<size_t>(k)] += b[static_cast<size_t>(k)][static_cast<size_t>(a)] * c[static_cast<size_t>(a)];
  }
  return d;
}

PointDerivatives evaluate_end(const DiscreteGraphSpace& space, const CVector& nodal, int edge, EdgeEnd end) {
  return end == EdgeEnd::left ? evaluate(space, nodal, edge, 0, 0.0)
                              : evaluate(space, nodal, edge, space.elements_per_edge() - 1, 1.0);
}

CVector interpolate(const DiscreteGraphSpace& space, const ProfileFunction& f) {
  CVector out = CVector::Zero(space.n_dof());
  const int ne = space.elements_per_edge();
  const int N = space.n_edges();
  int next = 0;
  for (int k = 1; k < ne; ++k) {
    const auto p = f(1, space.node_x(1, k));
    out[next++] = p.value;
    out[next++] = p.slope;
  }
  out[space.vertex_value_dof()] = f(1, 0.0).value;
  for (int j = 2; j <= N; ++j) out[space.vertex_slope_dof(j)] = f(j, 0.0).slope;
  next = space.vertex_value_dof() + N;
  for (int j = 2; j <= N; ++j) {
    for (int k = 1; k < ne; ++k) {
      const auto p = f(j, space.node_x(j, k));
      out[next++] = p.value;
      out[next++] = p.slope;
    }
  }
  return out;
}

void write_matrix_market(const SparseMatrix& A, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "%%MatrixMarket matrix coordinate real general\n";
  os << A.rows() << ' ' << A.cols() << ' ' << A.nonZeros() << '\n';
  os << std::setprecision(17);
  for (int k = 0; k < A.outerSize(); ++k) {
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) {
      os << it.row() + 1 << ' ' << it.col() + 1 << ' ' << it.value() << '\n';
    }
  }
  if (!os) throw std::runtime_error("failed writing " + path);
}

}  // namespace sghum
