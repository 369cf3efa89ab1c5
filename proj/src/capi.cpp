#include "sghum/sghum.h"

#include <cstring>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>

#include "sghum/json_io.hpp"

struct sg_graph {
  sghum::StarGraphConfig cfg;
};

struct sg_model {
  std::shared_ptr<const sghum::Discretization> disc;
  std::unique_ptr<sghum::Propagator> prop;
};

struct sg_trajectory {
  const sg_model* model;
  sghum::Trajectory traj;
  std::optional<sghum::ControlSignal> controls;
};

struct sg_hum_result {
  sghum::HUMResult res;
};

namespace {

thread_local std::string g_last_error;

sg_status fail(sg_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

template <class F>
sg_status guarded(F&& f) {
  try {
    g_last_error.clear();
    return f();
  } catch (const sghum::NotConverged& e) {
    return fail(SG_ERR_NOT_CONVERGED, e.what());
  } catch (const std::domain_error& e) {
    return fail(SG_ERR_DOMAIN, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(SG_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::ios_base::failure& e) {
    return fail(SG_ERR_IO, e.what());
  } catch (const std::exception& e) {
    const std::string what = e.what();
    if (what.rfind("cannot open", 0) == 0 || what.rfind("failed writing", 0) == 0) return fail(SG_ERR_IO, what);
    return fail(SG_ERR_INTERNAL, what);
  } catch (...) {
    return fail(SG_ERR_INTERNAL, "unknown exception");
  }
}

sg_status write_out(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || cap < s.size() + 1) return fail(SG_ERR_BUFFER_TOO_SMALL, "output buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return SG_OK;
}

sghum::CVector read_state(const sg_complex* u, size_t n, int n_dof) {
  if (!u) throw std::invalid_argument("null state");
  if (n != static_cast<size_t>(n_dof)) throw std::invalid_argument("state length does not match n_dof");
  sghum::CVector v(n_dof);
  for (int i = 0; i < n_dof; ++i) v[i] = {u[i].re, u[i].im};
  return v;
}

void copy_out(const sghum::CVector& v, sg_complex* out, size_t n) {
  if (!out) throw std::invalid_argument("null output array");
  if (n != static_cast<size_t>(v.size())) throw std::invalid_argument("output length mismatch");
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = {v[i].real(), v[i].imag()};
}

template <class T>
void require(const T* p, const char* what) {
  if (!p) throw std::invalid_argument(std::string("null ") + what);
}

}  // namespace

extern "C" {

const char* sg_version(void) { return "1.0.0"; }

const char* sg_last_error(void) { return g_last_error.c_str(); }

const char* sg_status_name(sg_status s) {
  switch (s) {
    case SG_OK: return "ok";
    case SG_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SG_ERR_INVALID_CONFIG: return "invalid_config";
    case SG_ERR_DOMAIN: return "domain_error";
    case SG_ERR_NOT_CONVERGED: return "not_converged";
    case SG_ERR_IO: return "io_error";
    case SG_ERR_BUFFER_TOO_SMALL: return "buffer_too_small";
    case SG_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

sg_status sg_graph_create(const double* lengths, size_t n_edges, const double* alphas, size_t n_alphas,
                          sg_graph** out) {
  return guarded([&] {
    require(out, "output handle");
    if (n_edges > 0) require(lengths, "lengths");
    if (n_alphas > 0) require(alphas, "alphas");
    auto g = std::make_unique<sg_graph>();
    g->cfg.lengths.assign(lengths, lengths + n_edges);
    g->cfg.alphas.assign(alphas, alphas + n_alphas);
    *out = g.release();
    return SG_OK;
  });
}

void sg_graph_destroy(sg_graph* g) { delete g; }

sg_status sg_graph_validate_json(const sg_graph* g, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(g, "graph");
    const auto rep = sghum::validate_config(g->cfg);
    auto j = sghum::to_json(rep);
    j["n_edges"] = g->cfg.lengths.size();
    if (rep.ok()) {
      const auto lc = sghum::length_constants(g->cfg);
      const auto opt = sghum::t_min_optimal(g->cfg);
      j["L"] = lc.L;
      j["Lbar"] = lc.Lbar;
      j["epsilon_opt"] = opt.epsilon;
      j["T_opt"] = opt.T;
    } else {
      for (const char* key : {"L", "Lbar", "epsilon_opt", "T_opt"}) j[key] = nullptr;
    }
    return write_out(j.dump(2), buf, cap, needed);
  });
}

sg_status sg_graph_length_constants(const sg_graph* g, double* L, double* Lbar) {
  return guarded([&] {
    require(g, "graph");
    sghum::require_valid(g->cfg);
    const auto lc = sghum::length_constants(g->cfg);
    if (L) *L = lc.L;
    if (Lbar) *Lbar = lc.Lbar;
    return SG_OK;
  });
}

sg_status sg_graph_optimal_horizon(const sg_graph* g, double* epsilon, double* T) {
  return guarded([&] {
    require(g, "graph");
    sghum::require_valid(g->cfg);
    const auto opt = sghum::t_min_optimal(g->cfg);
    if (epsilon) *epsilon = opt.epsilon;
    if (T) *T = opt.T;
    return SG_OK;
  });
}

sg_status sg_graph_t_min(const sg_graph* g, double epsilon, double* T) {
  return guarded([&] {
    require(g, "graph");
    require(T, "output");
    sghum::require_valid(g->cfg);
    *T = sghum::t_min(g->cfg, epsilon);
    return SG_OK;
  });
}

sg_status sg_graph_c_theory(const sg_graph* g, double epsilon, double T, double* C) {
  return guarded([&] {
    require(g, "graph");
    require(C, "output");
    sghum::require_valid(g->cfg);
    *C = sghum::c_theory(g->cfg, epsilon, T);
    return SG_OK;
  });
}

sg_status sg_model_create(const sg_graph* g, int elements_per_edge, sg_model** out) {
  return guarded([&] {
    require(g, "graph");
    require(out, "output handle");
    const auto rep = sghum::validate_config(g->cfg);
    if (!rep.ok()) return fail(SG_ERR_INVALID_CONFIG, rep.violations.front().message);
    auto m = std::make_unique<sg_model>();
    m->disc = sghum::discretize(g->cfg, elements_per_edge, true);
    m->prop = std::make_unique<sghum::Propagator>(m->disc);
    *out = m.release();
    return SG_OK;
  });
}

void sg_model_destroy(sg_model* m) { delete m; }

int sg_model_n_dof(const sg_model* m) { return m ? m->prop->n_dof() : 0; }

int sg_model_n_slots(const sg_model* m) { return m ? m->disc->space.n_slots() : 0; }

sg_status sg_model_state_from_json(const sg_model* m, const char* profile_json, sg_complex* out, size_t n) {
  return guarded([&] {
    require(m, "model");
    require(profile_json, "profile");
    sghum::json j;
    try {
      j = sghum::json::parse(profile_json);
    } catch (const sghum::json::exception& e) {
      throw std::invalid_argument(std::string("profile is not valid JSON: ") + e.what());
    }
    copy_out(sghum::build_state(*m->disc, sghum::profiles_from_json(j)), out, n);
    return SG_OK;
  });
}

sg_status sg_model_mass_norm2(const sg_model* m, const sg_complex* u, size_t n, double* out) {
  return guarded([&] {
    require(m, "model");
    require(out, "output");
    const auto v = read_state(u, n, m->prop->n_dof());
    *out = sghum::quadratic_forms(m->disc->matrices, v).mass;
    return SG_OK;
  });
}

sg_status sg_simulate(const sg_model* m, const sg_complex* u0, size_t n, double T, int n_steps, int thin,
                      sg_trajectory** out) {
  return guarded([&] {
    require(m, "model");
    require(out, "output handle");
    const auto v = read_state(u0, n, m->prop->n_dof());
    auto t = std::make_unique<sg_trajectory>();
    t->model = m;
    t->traj = sghum::solve_forward(*m->prop, {v, 0.0}, nullptr, T, n_steps, thin);
    *out = t.release();
    return SG_OK;
  });
}

sg_status sg_simulate_controlled(const sg_model* m, const sg_complex* u0, size_t n, const sg_complex* controls,
                                 size_t n_controls, double T, int n_steps, int thin, sg_trajectory** out) {
  return guarded([&] {
    require(m, "model");
    require(out, "output handle");
    require(controls, "controls");
    const auto v = read_state(u0, n, m->prop->n_dof());
    const int rows = m->disc->space.n_slots();
    if (n_steps < 1 || n_controls != static_cast<size_t>(rows) * static_cast<size_t>(n_steps + 1)) {
      throw std::invalid_argument("controls must hold n_slots x (n_steps + 1) samples");
    }
    sghum::ControlSignal h = sghum::ControlSignal::zero(rows, T, n_steps);
    size_t k = 0;
    for (int r = 0; r < rows; ++r) {
      for (int c = 0; c <= n_steps; ++c, ++k) h.samples(r, c) = {controls[k].re, controls[k].im};
    }
    auto t = std::make_unique<sg_trajectory>();
    t->model = m;
    t->traj = sghum::solve_forward(*m->prop, {v, 0.0}, &h, T, n_steps, thin);
    t->controls = std::move(h);
    *out = t.release();
    return SG_OK;
  });
}

void sg_trajectory_destroy(sg_trajectory* t) { delete t; }

int sg_trajectory_n_states(const sg_trajectory* t) { return t ? static_cast<int>(t->traj.states.size()) : 0; }

sg_status sg_trajectory_final(const sg_trajectory* t, sg_complex* out, size_t n) {
  return guarded([&] {
    require(t, "trajectory");
    const auto& last = t->traj.back().coeffs;
    copy_out(t->traj.forced() ? t->model->prop->projected(last, t->traj.slots.back()) : last, out, n);
    return SG_OK;
  });
}

sg_status sg_trajectory_write_csv(const sg_trajectory* t, const char* path) {
  return guarded([&] {
    require(t, "trajectory");
    require(path, "path");
    sghum::write_trajectory_csv(t->traj, path);
    return SG_OK;
  });
}

sg_status sg_trajectory_write_controls_csv(const sg_trajectory* t, const char* path) {
  return guarded([&] {
    require(t, "trajectory");
    require(path, "path");
    if (!t->controls) throw std::invalid_argument("trajectory has no controls");
    sghum::write_controls_csv(*t->controls, path);
    return SG_OK;
  });
}

sg_status sg_trajectory_conservation_json(const sg_trajectory* t, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(t, "trajectory");
    sghum::Trajectory projected;
    const sghum::Trajectory* traj = &t->traj;
    if (t->traj.forced()) {
      projected.tau = t->traj.tau;
      projected.stride = t->traj.stride;
      for (size_t k = 0; k < t->traj.states.size(); ++k) {
        projected.states.push_back(
            {t->model->prop->projected(t->traj.states[k].coeffs, t->traj.slots[k]), t->traj.states[k].time});
      }
      traj = &projected;
    }
    const auto rep = sghum::conservation_report(t->model->disc->matrices, *traj);
    return write_out(sghum::to_json(rep).dump(2), buf, cap, needed);
  });
}

sg_status sg_trajectory_identity_json(const sg_trajectory* t, const char* multiplier, char* buf, size_t cap,
                                      size_t* needed) {
  return guarded([&] {
    require(t, "trajectory");
    require(multiplier, "multiplier");
    const std::string name = multiplier;
    auto q = sghum::MultiplierFunction::one();
    if (name == "x") {
      q = sghum::MultiplierFunction::x();
    } else if (name != "1") {
      sghum::json j;
      try {
        j = sghum::json::parse(name);
      } catch (const sghum::json::exception&) {
        throw std::invalid_argument("multiplier must be \"1\", \"x\" or a JSON coefficient array");
      }
      if (!j.is_array()) throw std::invalid_argument("multiplier coefficients must be a JSON array");
      q = sghum::MultiplierFunction::polynomial(j.get<std::vector<double>>());
    }
    const auto& prop = *t->model->prop;
    sghum::json out;
    out["identity"] = sghum::to_json(sghum::morawetz_residual(prop, t->traj, q));
    out["vertex_balance"] = sghum::to_json(sghum::vertex_balance(prop, t->traj));
    return write_out(out.dump(2), buf, cap, needed);
  });
}

sg_status sg_observe_json(const sg_model* m, double T, int n_steps, double epsilon, double tol, uint64_t seed,
                          char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(m, "model");
    const auto& cfg = m->disc->space.config();
    const double eps = epsilon > 0.0 ? epsilon : sghum::t_min_optimal(cfg).epsilon;
    sghum::LambdaOptions opts;
    if (tol > 0.0) opts.tol = tol;
    opts.seed = seed;
    const auto d = sghum::lambda_min(*m->prop, T, n_steps, eps, opts);
    auto j = sghum::to_json(d);
    j["n_dof"] = m->prop->n_dof();
    j["n_steps"] = n_steps;
    return write_out(j.dump(2), buf, cap, needed);
  });
}

sg_status sg_hum_solve(const sg_model* m, const sg_complex* u0, const sg_complex* uT, size_t n, double T, int n_steps,
                       double cg_tol, sg_hum_result** out) {
  return guarded([&] {
    require(m, "model");
    require(out, "output handle");
    const int nd = m->prop->n_dof();
    const auto a = read_state(u0, n, nd);
    sghum::HumOptions opts;
    if (cg_tol > 0.0) opts.cg_tol = cg_tol;
    auto r = std::make_unique<sg_hum_result>();
    r->res = uT ? sghum::hum_solve(*m->prop, {a, 0.0}, {read_state(uT, n, nd), T}, T, n_steps, opts)
                : sghum::null_control(*m->prop, {a, 0.0}, T, n_steps, opts);
    *out = r.release();
    return SG_OK;
  });
}

void sg_hum_result_destroy(sg_hum_result* r) { delete r; }

sg_status sg_hum_result_json(const sg_hum_result* r, char* buf, size_t cap, size_t* needed) {
  return guarded([&] {
    require(r, "result");
    auto j = sghum::to_json(r->res);
    j["T"] = r->res.controls.t1;
    j["n_steps"] = r->res.controls.n_steps;
    return write_out(j.dump(2), buf, cap, needed);
  });
}

sg_status sg_hum_result_write_controls_csv(const sg_hum_result* r, const char* path) {
  return guarded([&] {
    require(r, "result");
    require(path, "path");
    sghum::write_controls_csv(r->res.controls, path);
    return SG_OK;
  });
}

sg_status sg_hum_result_controls(const sg_hum_result* r, sg_complex* out, size_t n) {
  return guarded([&] {
    require(r, "result");
    require(out, "output array");
    const auto& s = r->res.controls.samples;
    if (n != static_cast<size_t>(s.size())) throw std::invalid_argument("output length mismatch");
    size_t k = 0;
    for (Eigen::Index i = 0; i < s.rows(); ++i) {
      for (Eigen::Index c = 0; c < s.cols(); ++c) out[k++] = {s(i, c).real(), s(i, c).imag()};
    }
    return SG_OK;
  });
}

}  // extern "C"
