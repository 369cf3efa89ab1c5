#include "sghum/observability.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/SVD>

#include "sghum/errors.hpp"

namespace sghum {

namespace {

constexpr cplx I{0.0, 1.0};

// Half-step flux psi^{n+1/2} for one CN interval.
CVector half_step_flux(const GraphMatrices& m, const CVector& v0, const CVector& v1, double tau) {
  CVector avg = 0.5 * (v0 + v1);
  CVector diff = (v1 - v0) / tau;
  return m.K_slot.transpose().cast<cplx>() * avg - I * (m.M_slot.transpose().cast<cplx>() * diff);
}

void require_tips_free(const Propagator& prop, const char* who) {
  if (!prop.space().control_tips_free()) {
    throw std::invalid_argument(std::string(who) + ": needs a space built with control_tips_free = true");
  }
}

// Node values from half-step values, see ObservationTrace.
void half_to_nodes(const std::vector<CVector>& half, Eigen::MatrixXcd& out) {
  const int n = static_cast<int>(half.size());
  out.col(0) = half.front();
  out.col(n) = half.back();
  for (int k = 1; k < n; ++k) out.col(k) = 0.5 * (half[static_cast<size_t>(k - 1)] + half[static_cast<size_t>(k)]);
}

}  // namespace

ObservationTrace observe(const Propagator& prop, const Trajectory& adjoint) {
  if (adjoint.stride != 1) throw std::invalid_argument("observe: trajectory must not be thinned");
  if (adjoint.forced()) throw std::invalid_argument("observe: trajectory must be homogeneous");
  if (adjoint.states.size() < 2) throw std::invalid_argument("observe: trajectory needs at least two nodes");
  const int n_steps = static_cast<int>(adjoint.states.size()) - 1;
  std::vector<CVector> half;
  half.reserve(static_cast<size_t>(n_steps));
  for (int n = 0; n < n_steps; ++n) {
    half.push_back(half_step_flux(prop.matrices(), adjoint.states[static_cast<size_t>(n)].coeffs,
                                  adjoint.states[static_cast<size_t>(n + 1)].coeffs, adjoint.tau));
  }
  ObservationTrace obs{adjoint.tau * n_steps, n_steps, Eigen::MatrixXcd(prop.space().n_slots(), n_steps + 1)};
  half_to_nodes(half, obs.values);
  return obs;
}

ObservationTrace observe_adjoint(const Propagator& prop, const CVector& vT, double T, int n_steps) {
  if (!(T > 0.0) || n_steps < 1) throw std::invalid_argument("observe_adjoint: bad time grid");
  if (vT.size() != prop.n_dof()) throw std::invalid_argument("observe_adjoint: wrong dimension");
  const double tau = T / n_steps;
  std::vector<CVector> half(static_cast<size_t>(n_steps));
  CVector next = vT;
  for (int n = n_steps - 1; n >= 0; --n) {
    CVector cur = prop.step(next, -tau);
    half[static_cast<size_t>(n)] = half_step_flux(prop.matrices(), cur, next, tau);
    next = std::move(cur);
  }
  ObservationTrace obs{T, n_steps, Eigen::MatrixXcd(prop.space().n_slots(), n_steps + 1)};
  half_to_nodes(half, obs.values);
  return obs;
}

Eigen::MatrixXcd tip_second_derivative(const DiscreteGraphSpace& space, const Trajectory& traj) {
  Eigen::MatrixXcd out(space.n_slots(), static_cast<Eigen::Index>(traj.states.size()));
  for (size_t n = 0; n < traj.states.size(); ++n) {
    const CVector* slots = traj.forced() ? &traj.slots[n] : nullptr;
    const CVector nodal = space.nodal_values(traj.states[n].coeffs, slots);
    for (int j = 2; j <= space.n_edges(); ++j) {
      out(j - 2, static_cast<Eigen::Index>(n)) = evaluate_end(space, nodal, j, EdgeEnd::right)[2];
    }
  }
  return out;
}

cplx trapezoid_pairing(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b, double tau) {
  if (a.rows() != b.rows() || a.cols() != b.cols() || a.cols() < 2) {
    throw std::invalid_argument("trapezoid_pairing: grid mismatch");
  }
  cplx s{};
  const Eigen::Index last = a.cols() - 1;
  for (Eigen::Index n = 0; n <= last; ++n) {
    const double w = (n == 0 || n == last) ? 0.5 * tau : tau;
    s += w * (a.col(n).transpose() * b.col(n).conjugate())(0);
  }
  return s;
}

cplx gramian_quadratic(const Propagator& prop, const CVector& vT, const CVector& wT, double T, int n_steps) {
  const auto ov = observe_adjoint(prop, vT, T, n_steps);
  const auto ow = observe_adjoint(prop, wT, T, n_steps);
  return trapezoid_pairing(ov.values, ow.values, ov.tau());
}

CVector control_to_final_dual(const Propagator& prop, const ControlSignal& controls) {
  require_tips_free(prop, "control_to_final_dual");
  const int n_steps = controls.n_steps;
  if (n_steps < 1 || controls.samples.rows() != prop.space().n_slots() || controls.samples.cols() != n_steps + 1) {
    throw std::invalid_argument("control_to_final_dual: malformed control signal");
  }
  const auto& m = prop.matrices();
  const CSparseMatrix Ms = m.M_slot.cast<cplx>();
  const double tau = controls.tau();
  CVector h = controls.at(0);
  CVector u = -prop.solve_mass(Ms * h);
  for (int n = 1; n <= n_steps; ++n) {
    CVector h_next = controls.at(n);
    u = prop.step(u, tau, h, h_next);
    h = std::move(h_next);
  }
  return m.M.cast<cplx>() * u + Ms * h;
}

CVector apply_gramian(const Propagator& prop, const CVector& vT, double T, int n_steps) {
  const auto obs = observe_adjoint(prop, vT, T, n_steps);
  return I * control_to_final_dual(prop, obs.as_control());
}

Eigen::MatrixXcd dense_gramian(const Propagator& prop, double T, int n_steps) {
  const int n = prop.n_dof();
  Eigen::MatrixXcd gam(n, n);
  for (int k = 0; k < n; ++k) gam.col(k) = apply_gramian(prop, CVector::Unit(n, k), T, n_steps);
  return gam;
}

namespace {

CVector flatten(const Eigen::MatrixXcd& m) { return Eigen::Map<const CVector>(m.data(), m.size()); }

}  // namespace

GolubKahan::GolubKahan(const Propagator& prop, double T, int n_steps, const CVector& start)
    : prop_(prop), T_(T), n_steps_(n_steps) {
  require_tips_free(prop, "GolubKahan");
  if (!(T > 0.0) || n_steps < 1) throw std::invalid_argument("GolubKahan: bad time grid");
  if (start.size() != prop.n_dof()) throw std::invalid_argument("GolubKahan: wrong dimension");
  const double tau = T / n_steps;
  weights_ = Eigen::VectorXd::Constant(n_steps + 1, tau);
  weights_(0) = weights_(n_steps) = 0.5 * tau;

  CVector g = prop.solve_gram(start);
  const double b = std::sqrt(std::max(start.dot(g).real(), 0.0));
  if (!(b > 0.0)) throw std::invalid_argument("GolubKahan: zero start vector");
  beta_.push_back(b);
  u_.push_back(start / b);
  gu_.push_back(g / b);

  CVector q = apply_adjoint(gu_[0]);
  const double a = std::sqrt(std::max(control_dot(q, q).real(), 0.0));
  if (!(a > 0.0)) throw std::runtime_error("GolubKahan: start vector is unobservable");
  alpha_.push_back(a);
  v_.push_back(q / a);
  t_.push_back(gu_[0] / a);
}

cplx GolubKahan::control_dot(const CVector& a, const CVector& b) const {
  // a^* W b over the (slot, node) column-major layout.
  const Eigen::Index rows = prop_.space().n_slots();
  cplx s{};
  for (int n = 0; n <= n_steps_; ++n) {
    s += weights_(n) * a.segment(n * rows, rows).dot(b.segment(n * rows, rows));
  }
  return s;
}

CVector GolubKahan::apply_adjoint(const CVector& g_state) const {
  return I * flatten(observe_adjoint(prop_, g_state, T_, n_steps_).values);
}

GolubKahan::Status GolubKahan::extend() {
  const int k = size();
  const int n = prop_.n_dof();
  const int rows = prop_.space().n_slots();
  if (k >= n) {
    beta_.push_back(0.0);
    return Status::states_exhausted;
  }
  ControlSignal h{0.0, T_, n_steps_, Eigen::Map<const Eigen::MatrixXcd>(v_.back().data(), rows, n_steps_ + 1)};
  CVector p = control_to_final_dual(prop_, h);
  const double lv = std::sqrt(std::max(p.dot(prop_.solve_gram(p)).real(), 0.0));
  p -= alpha_.back() * u_.back();
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t j = 0; j < u_.size(); ++j) p -= gu_[j].dot(p) * u_[j];
  }
  CVector gp = prop_.solve_gram(p);
  const double b = std::sqrt(std::max(p.dot(gp).real(), 0.0));
  beta_.push_back(b);
  if (!(b > 1e-14 * lv)) return Status::states_exhausted;
  u_.push_back(p / b);
  gu_.push_back(gp / b);

  CVector q = apply_adjoint(gu_.back()) - b * v_.back();
  CVector t = gu_.back() - b * t_.back();
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t j = 0; j < v_.size(); ++j) {
      const cplx c = control_dot(v_[j], q);
      q -= c * v_[j];
      t -= c * t_[j];
    }
  }
  const double a = std::sqrt(std::max(control_dot(q, q).real(), 0.0));
  const double scale = std::max(alpha_.front(), b);
  if (!(a > 1e-14 * scale)) return Status::adjoint_vanished;
  alpha_.push_back(a);
  v_.push_back(q / a);
  t_.push_back(t / a);
  return Status::extended;
}

Eigen::MatrixXd GolubKahan::bidiagonal() const {
  const int k = size();
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(k, k);
  for (int j = 0; j < k; ++j) {
    B(j, j) = alpha_[static_cast<size_t>(j)];
    if (j + 1 < k) B(j + 1, j) = beta_[static_cast<size_t>(j + 1)];
  }
  return B;
}

GramianDiagnostics lambda_min(const Propagator& prop, double T, int n_steps, double epsilon, const LambdaOptions& opts) {
  require_tips_free(prop, "lambda_min");
  if (!(T > 0.0)) throw std::invalid_argument("lambda_min: T must be positive");
  const int n = prop.n_dof();
  const int max_iter = opts.max_iter > 0 ? std::min(opts.max_iter, n) : n;

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  CVector start(n);
  for (int k = 0; k < n; ++k) start[k] = cplx(normal(rng), normal(rng));

  GolubKahan gk(prop, T, n_steps, start);
  GramianDiagnostics diag;
  diag.T = T;
  diag.epsilon = epsilon;

  bool converged = false;
  double last_residual = 0.0;
  while (true) {
    const auto status = gk.extend();
    const int k = gk.size();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(gk.bidiagonal(), Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double s_max = sv(0);
    const double s_min = sv(k - 1);
    const double b_next = gk.beta(k);
    const double res_max = b_next * std::abs(svd.matrixV()(k - 1, 0));
    const double res_min = b_next * std::abs(svd.matrixV()(k - 1, k - 1));
    diag.lambda_max = s_max * s_max;
    diag.lambda_min = s_min * s_min;
    diag.iterations = k;
    last_residual = std::max(res_min / s_min, res_max / s_max);
    if (status == GolubKahan::Status::states_exhausted) {
      converged = true;
      break;
    }
    if (status == GolubKahan::Status::adjoint_vanished) {
      diag.lambda_min = 0.0;
      converged = true;
      break;
    }
    if (max_iter < n && k >= max_iter) {
      converged = res_min <= opts.tol * s_min && res_max <= opts.tol * s_max;
      break;
    }
  }
  if (!converged) {
    throw NotConverged("lambda_min: extreme Ritz values not resolved within " + std::to_string(max_iter) +
                           " iterations",
                       diag.iterations, last_residual);
  }

  const auto& cfg = prop.space().config();
  const double Lbar = length_constants(cfg).Lbar;
  if (epsilon > 0.0 && epsilon < 1.0 / Lbar) {
    diag.T_min = t_min(cfg, epsilon);
    if (T > *diag.T_min) {
      diag.c_theory = c_theory(cfg, epsilon, T);
      diag.below_half_theory = diag.lambda_min < 0.5 / *diag.c_theory;
    }
  }
  return diag;
}

}  // namespace sghum
