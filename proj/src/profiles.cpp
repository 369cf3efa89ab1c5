#include "sghum/profiles.hpp"

#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace sghum {

ModeBasis mode_basis(const Discretization& disc) {
  const auto& m = disc.matrices;
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(m.K), Eigen::MatrixXd(m.M));
  if (es.info() != Eigen::Success) throw std::runtime_error("mode_basis: eigensolver failed");
  ModeBasis mb{es.eigenvalues(), es.eigenvectors()};

  const CVector ref = interpolate(disc.space, [](int edge, double x) {
    return ProfileValue{cplx(edge + x + x * x), cplx(1.0 + 2.0 * x)};
  });
  const RVector w = m.M * ref.real();
  for (Eigen::Index k = 0; k < mb.vectors.cols(); ++k) {
    double s = w.dot(mb.vectors.col(k));
    if (std::abs(s) < 1e-12) {
      Eigen::Index i = 0;
      mb.vectors.col(k).cwiseAbs().maxCoeff(&i);
      s = mb.vectors(i, k);
    }
    if (s < 0.0) mb.vectors.col(k) *= -1.0;
  }
  return mb;
}

namespace {

void check_edge_profile(const Discretization& disc, const Profile& p) {
  if (p.edge < 1 || p.edge > disc.space.n_edges()) throw std::invalid_argument("profile: edge out of range");
  if (!(p.width > 0.0) || !std::isfinite(p.center)) throw std::invalid_argument("profile: width must be positive");
}

CVector edge_profile(const Discretization& disc, const Profile& p) {
  check_edge_profile(disc, p);
  const double c = p.center;
  const double w = p.width;
  const cplx a = p.amplitude;
  const int target = p.edge;
  if (p.kind == Profile::Kind::gaussian) {
    return interpolate(disc.space, [=](int edge, double x) {
      if (edge != target) return ProfileValue{};
      const double r = (x - c) / w;
      const double g = std::exp(-r * r);
      return ProfileValue{a * g, a * (-2.0 * r / w * g)};
    });
  }
  return interpolate(disc.space, [=](int edge, double x) {
    const double r = (x - c) / w;
    if (edge != target || std::abs(r) >= 1.0) return ProfileValue{};
    const double k = std::numbers::pi / (2.0 * w);
    const double cs = std::cos(k * (x - c));
    const double sn = std::sin(k * (x - c));
    return ProfileValue{a * std::pow(cs, 4), a * (-4.0 * k * cs * cs * cs * sn)};
  });
}

}  // namespace

CVector build_state(const Discretization& disc, const std::vector<Profile>& parts) {
  const int n = disc.space.n_dof();
  CVector u = CVector::Zero(n);
  std::optional<ModeBasis> modes;
  auto basis = [&]() -> const ModeBasis& {
    if (!modes) modes = mode_basis(disc);
    return *modes;
  };
  for (const auto& p : parts) {
    switch (p.kind) {
      case Profile::Kind::zero: break;
      case Profile::Kind::gaussian:
      case Profile::Kind::bump: u += edge_profile(disc, p); break;
      case Profile::Kind::eigenmode: {
        if (p.index < 0 || p.index >= n) throw std::invalid_argument("profile: eigenmode index out of range");
        u += p.amplitude * basis().vectors.col(p.index).cast<cplx>();
        break;
      }
      case Profile::Kind::random_modes: {
        if (p.n_modes < 1 || p.n_modes > n) throw std::invalid_argument("profile: n_modes out of range");
        std::mt19937_64 rng(p.seed);
        std::normal_distribution<double> normal;
        CVector c(p.n_modes);
        for (int k = 0; k < p.n_modes; ++k) c[k] = cplx(normal(rng), normal(rng));
        c *= std::abs(p.amplitude) / c.norm();
        u += basis().vectors.leftCols(p.n_modes).cast<cplx>() * c;
        break;
      }
    }
  }
  return u;
}

}  // namespace sghum
