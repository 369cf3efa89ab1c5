#include "sghum/star_graph.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace sghum {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

}  // namespace

ValidationReport validate_config(const StarGraphConfig& cfg) {
  ValidationReport report;
  auto add = [&](std::string key, std::string msg) {
    report.violations.push_back({std::move(key), std::move(msg)});
  };

  const int n = cfg.n_edges();
  if (n < 2) {
    add("n_edges", "need at least 2 edges, got " + std::to_string(n));
  }
  if (static_cast<int>(cfg.alphas.size()) != std::max(n - 1, 0)) {
    add("alphas_size", "expected " + std::to_string(std::max(n - 1, 0)) + " alphas (edges 2..N), got " +
                           std::to_string(cfg.alphas.size()));
  }
  for (size_t k = 0; k < cfg.lengths.size(); ++k) {
    if (!(cfg.lengths[k] > 0.0) || !std::isfinite(cfg.lengths[k])) {
      add("length_positive", "l_" + std::to_string(k + 1) + " = " + fmt(cfg.lengths[k]) + " is not positive");
    }
  }
  bool alphas_positive = true;
  for (size_t k = 0; k < cfg.alphas.size(); ++k) {
    if (!(cfg.alphas[k] > 0.0) || !std::isfinite(cfg.alphas[k])) {
      alphas_positive = false;
      add("alpha_positive", "alpha_" + std::to_string(k + 2) + " = " + fmt(cfg.alphas[k]) + " is not positive");
    }
  }
  if (!alphas_positive || cfg.alphas.empty() || static_cast<int>(cfg.alphas.size()) != n - 1) {
    return report;
  }

  double sum = 0.0;
  for (double a : cfg.alphas) sum += 1.0 / (a * a);
  if (std::abs(sum - 1.0) > cfg.tolerance) {
    add("alpha_sum", "sum of 1/alpha^2 = " + fmt(sum) + " != 1");
  }
  const double bound = 1.0 / static_cast<double>(n - 1);
  for (size_t k = 0; k < cfg.alphas.size(); ++k) {
    const double inv = 1.0 / (cfg.alphas[k] * cfg.alphas[k]);
    if (inv > bound + cfg.tolerance) {
      add("alpha_bound", "1/alpha_" + std::to_string(k + 2) + "^2 = " + fmt(inv) + " exceeds 1/(N-1) = " + fmt(bound));
    }
  }
  return report;
}

void require_valid(const StarGraphConfig& cfg) {
  const auto report = validate_config(cfg);
  if (report.ok()) return;
  std::string msg = "invalid star graph config:";
  for (const auto& v : report.violations) msg += " [" + v.constraint + "] " + v.message + ";";
  throw std::invalid_argument(msg);
}

LengthConstants length_constants(const StarGraphConfig& cfg) {
  if (cfg.lengths.size() < 2) throw std::invalid_argument("length_constants: need at least 2 edges");
  const double l1 = cfg.lengths.front();
  const double L = *std::max_element(cfg.lengths.begin(), cfg.lengths.end());
  const double tail = *std::max_element(cfg.lengths.begin() + 1, cfg.lengths.end());
  return {L, std::max(2.0 * l1, tail + l1)};
}

double t_min(const StarGraphConfig& cfg, double epsilon) {
  const auto [L, Lbar] = length_constants(cfg);
  if (!(epsilon > 0.0) || !(epsilon < 1.0 / Lbar)) {
    throw std::domain_error("t_min: epsilon = " + fmt(epsilon) + " outside (0, 1/Lbar) = (0, " + fmt(1.0 / Lbar) + ")");
  }
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  return std::sqrt(Lbar * (L * L + pi2) / (pi2 * epsilon * (1.0 - Lbar * epsilon)));
}

OptimalHorizon t_min_optimal(const StarGraphConfig& cfg) {
  const double eps = 1.0 / (2.0 * length_constants(cfg).Lbar);
  return {eps, t_min(cfg, eps)};
}

double c_theory(const StarGraphConfig& cfg, double epsilon, double T) {
  const auto [L, Lbar] = length_constants(cfg);
  if (!(epsilon > 0.0) || !(epsilon < 1.0 / Lbar)) {
    throw std::domain_error("c_theory: epsilon outside (0, 1/Lbar)");
  }
  if (!(T > 0.0)) throw std::domain_error("c_theory: T must be positive");
  constexpr double pi2 = std::numbers::pi * std::numbers::pi;
  const double poincare = L * L / pi2 + 1.0;
  const double K = (1.0 / Lbar - epsilon) * T - poincare / (epsilon * T);
  if (!(K > 0.0)) {
    throw std::domain_error("c_theory: K = " + fmt(K) + " <= 0 (T = " + fmt(T) + " not above t_min = " +
                            fmt(t_min(cfg, epsilon)) + ")");
  }
  return L * poincare / (2.0 * Lbar * K);
}

}  // namespace sghum
