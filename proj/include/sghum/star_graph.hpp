#pragma once

#include <string>
#include <utility>
#include <vector>

namespace sghum {

/// Geometry and coupling weights of a compact star graph.
///
/// Edges are numbered 1..N. Edge 1 is the uncontrolled edge, parametrized on
/// (-l_1, 0); edges 2..N are parametrized on (0, l_j) and carry the Neumann
/// controls at x = l_j. `alphas[k]` is the coupling weight of edge k+2.
struct StarGraphConfig {
  std::vector<double> lengths;
  std::vector<double> alphas;
  double tolerance = 1e-12;

  [[nodiscard]] int n_edges() const { return static_cast<int>(lengths.size()); }
  [[nodiscard]] int n_controlled() const { return n_edges() - 1; }
  /// Weight of edge j (1-based, j >= 2).
  [[nodiscard]] double alpha(int edge) const { return alphas.at(static_cast<size_t>(edge - 2)); }
  [[nodiscard]] double length(int edge) const { return lengths.at(static_cast<size_t>(edge - 1)); }
};

struct Violation {
  std::string constraint;  // short machine-readable key
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  [[nodiscard]] bool ok() const { return violations.empty(); }
};

/// Checks positivity of lengths and weights and the two weight constraints
///   sum_{j>=2} 1/alpha_j^2 = 1  and  1/alpha_j^2 <= 1/(N-1).
/// Violations are returned, never thrown.
ValidationReport validate_config(const StarGraphConfig& cfg);

/// Throws std::invalid_argument listing every violation when the config is not valid.
void require_valid(const StarGraphConfig& cfg);

struct LengthConstants {
  double L;     // max_j l_j
  double Lbar;  // max{2 l_1, max_{j>=2} l_j + l_1}
};

LengthConstants length_constants(const StarGraphConfig& cfg);

/// Minimal control time for a given epsilon in (0, 1/Lbar).
/// Throws std::domain_error outside that interval.
double t_min(const StarGraphConfig& cfg, double epsilon);

struct OptimalHorizon {
  double epsilon;
  double T;
};

/// epsilon* = 1/(2 Lbar) maximizes eps (1 - Lbar eps) and hence minimizes t_min.
OptimalHorizon t_min_optimal(const StarGraphConfig& cfg);

/// Constant C of the observability inequality ||v(T)||^2_{H^2_0} <= C sum_j ||d_x^2 v_j(l_j,.)||^2,
/// as produced by the multiplier argument:
///   K = (1/Lbar - eps) T - (L^2/pi^2 + 1)/(eps T),   C = L (L^2/pi^2 + 1) / (2 Lbar K).
/// Throws std::domain_error when eps is inadmissible or K <= 0.
double c_theory(const StarGraphConfig& cfg, double epsilon, double T);

}  // namespace sghum
