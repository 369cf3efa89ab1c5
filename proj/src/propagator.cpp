#include "sghum/propagator.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace sghum {

namespace {

constexpr cplx I{0.0, 1.0};

void check_grid(double T, int n_steps) {
  if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("horizon T must be positive and finite");
  if (n_steps < 1) throw std::invalid_argument("n_steps must be >= 1");
}

}  // namespace

ControlSignal ControlSignal::zero(int n_controlled, double T, int n_steps) {
  return {0.0, T, n_steps, Eigen::MatrixXcd::Zero(n_controlled, n_steps + 1)};
}

Propagator::Propagator(std::shared_ptr<const Discretization> disc) : disc_(std::move(disc)) {
  if (!disc_) throw std::invalid_argument("Propagator: null discretization");
  mass_.compute(disc_->matrices.M);
  gram_.compute(disc_->matrices.G);
  if (mass_.info() != Eigen::Success || gram_.info() != Eigen::Success) {
    throw std::runtime_error("Propagator: mass or Gram matrix is not positive definite");
  }
}

const Propagator::Cayley& Propagator::cayley(double tau) const {
  std::lock_guard<std::mutex> lock(mutex_);
  auto it = cache_.find(tau);
  if (it != cache_.end()) return *it->second;

  const CSparseMatrix M = disc_->matrices.M.cast<cplx>();
  const CSparseMatrix K = disc_->matrices.K.cast<cplx>();
  auto c = std::make_unique<Cayley>();
  CSparseMatrix lhs = M + (0.5 * tau * I) * K;
  c->rhs = M - (0.5 * tau * I) * K;
  lhs.makeCompressed();
  c->lhs.analyzePattern(lhs);
  c->lhs.factorize(lhs);
  if (c->lhs.info() != Eigen::Success) throw std::runtime_error("Propagator: singular Cayley system");
  return *cache_.emplace(tau, std::move(c)).first->second;
}

size_t Propagator::cached_factorizations() const {
  std::lock_guard<std::mutex> lock(mutex_);
  return cache_.size();
}

CVector Propagator::step(const CVector& u, double tau) const {
  if (u.size() != n_dof()) throw std::invalid_argument("step: state has wrong dimension");
  if (tau == 0.0 || !std::isfinite(tau)) throw std::invalid_argument("step: tau must be nonzero and finite");
  const auto& c = cayley(tau);
  CVector out = c.lhs.solve(c.rhs * u);
  return out;
}

CVector Propagator::step(const CVector& u, double tau, const CVector& slots_now, const CVector& slots_next) const {
  if (u.size() != n_dof()) throw std::invalid_argument("step: state has wrong dimension");
  const int ns = space().n_slots();
  if (slots_now.size() != ns || slots_next.size() != ns) throw std::invalid_argument("step: slot data has wrong dimension");
  if (tau == 0.0 || !std::isfinite(tau)) throw std::invalid_argument("step: tau must be nonzero and finite");
  const auto& c = cayley(tau);
  const auto& m = matrices();
  CVector rhs = c.rhs * u;
  rhs -= m.M_slot.cast<cplx>() * (slots_next - slots_now);
  rhs -= (0.5 * tau * I) * (m.K_slot.cast<cplx>() * (slots_now + slots_next));
  return c.lhs.solve(rhs);
}

CVector Propagator::solve_mass(const CVector& rhs) const {
  CVector out(rhs.size());
  out.real() = mass_.solve(RVector(rhs.real()));
  out.imag() = mass_.solve(RVector(rhs.imag()));
  return out;
}

CVector Propagator::solve_gram(const CVector& rhs) const {
  CVector out(rhs.size());
  out.real() = gram_.solve(RVector(rhs.real()));
  out.imag() = gram_.solve(RVector(rhs.imag()));
  return out;
}

CVector Propagator::projected(const CVector& coeffs, const CVector& slots) const {
  return coeffs + solve_mass(matrices().M_slot.cast<cplx>() * slots);
}

Trajectory solve_forward(const Propagator& prop, const GraphState& u0, const ControlSignal* controls, double T,
                         int n_steps, int thin) {
  check_grid(T, n_steps);
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (u0.coeffs.size() != prop.n_dof()) throw std::invalid_argument("solve_forward: initial state has wrong dimension");
  const double tau = T / n_steps;

  Trajectory traj;
  traj.tau = tau;
  traj.stride = thin;
  traj.states.reserve(static_cast<size_t>(n_steps / thin + 2));

  if (controls == nullptr) {
    CVector u = u0.coeffs;
    traj.states.push_back({u, u0.time});
    for (int n = 1; n <= n_steps; ++n) {
      u = prop.step(u, tau);
      if (n % thin == 0 || n == n_steps) traj.states.push_back({u, u0.time + n * tau});
    }
    return traj;
  }

  if (!prop.space().control_tips_free()) {
    throw std::invalid_argument("solve_forward: controls require a space built with control_tips_free = true");
  }
  if (controls->n_steps != n_steps || std::abs(controls->t1 - controls->t0 - T) > 1e-12 * std::max(1.0, T) ||
      controls->samples.rows() != prop.space().n_slots() || controls->samples.cols() != n_steps + 1) {
    throw std::invalid_argument("solve_forward: control grid does not match (T, n_steps)");
  }
  if (!controls->samples.allFinite()) throw std::invalid_argument("solve_forward: non-finite control samples");

  CVector h = controls->at(0);
  CVector u = u0.coeffs - prop.solve_mass(prop.matrices().M_slot.cast<cplx>() * h);
  traj.states.push_back({u, u0.time});
  traj.slots.push_back(h);
  for (int n = 1; n <= n_steps; ++n) {
    CVector h_next = controls->at(n);
    u = prop.step(u, tau, h, h_next);
    h = std::move(h_next);
    if (n % thin == 0 || n == n_steps) {
      traj.states.push_back({u, u0.time + n * tau});
      traj.slots.push_back(h);
    }
  }
  return traj;
}

Trajectory solve_adjoint(const Propagator& prop, const GraphState& vT, double T, int n_steps, int thin) {
  check_grid(T, n_steps);
  if (thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (vT.coeffs.size() != prop.n_dof()) throw std::invalid_argument("solve_adjoint: final state has wrong dimension");
  const double tau = T / n_steps;
  std::vector<CVector> all(static_cast<size_t>(n_steps + 1));
  all[static_cast<size_t>(n_steps)] = vT.coeffs;
  for (int n = n_steps - 1; n >= 0; --n) all[static_cast<size_t>(n)] = prop.step(all[static_cast<size_t>(n + 1)], -tau);

  Trajectory traj;
  traj.tau = tau;
  traj.stride = thin;
  const double t0 = 0.0;
  for (int n = 0; n <= n_steps; ++n) {
    if (n % thin == 0 || n == n_steps) traj.states.push_back({std::move(all[static_cast<size_t>(n)]), t0 + n * tau});
  }
  return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "time,dof,real,imag\n" << std::setprecision(17);
  for (const auto& s : traj.states) {
    for (Eigen::Index k = 0; k < s.coeffs.size(); ++k) {
      os << s.time << ',' << k << ',' << s.coeffs[k].real() << ',' << s.coeffs[k].imag() << '\n';
    }
  }
  if (!os) throw std::runtime_error("failed writing " + path);
}

}  // namespace sghum
