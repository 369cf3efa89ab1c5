// sghum: experiment driver for the star-graph control library.
//
//   sghum <validate|simulate|observe|control|identity> --config exp.json [--out dir] [--seed n]
//
// Exit codes: 0 success, 1 constraint violation or solver failure, 2 usage or config error.
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sghum/sghum.h"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct CliError {
  int code;
  std::string message;
};

void check(sg_status s, const char* what) {
  if (s == SG_OK) return;
  const int code = (s == SG_ERR_INVALID_ARGUMENT || s == SG_ERR_INVALID_CONFIG) ? 2 : 1;
  throw CliError{code, std::string(what) + ": " + sg_status_name(s) + ": " + sg_last_error()};
}

template <class F>
std::string fetch_json(F&& call) {
  size_t needed = 0;
  sg_status s = call(nullptr, 0, &needed);
  if (s != SG_ERR_BUFFER_TOO_SMALL) check(s, "query");
  std::string buf(needed, '\0');
  check(call(buf.data(), buf.size(), &needed), "query");
  buf.resize(needed - 1);
  return buf;
}

struct Experiment {
  json raw;
  fs::path dir;
  std::vector<double> lengths;
  std::vector<double> alphas;
  int elements_per_edge = 8;
  int n_steps = 1000;
  std::optional<double> T;
  double T_factor = 1.2;
  double epsilon = 0.0;  // <= 0: optimal
  double cg_tol = 1e-8;
  double tol = 1e-8;
  int thin = 1;
  std::uint64_t seed = 1;
};

Experiment load_experiment(const std::string& path, std::optional<std::uint64_t> seed_flag) {
  std::ifstream in(path);
  if (!in) throw CliError{2, "cannot open config " + path};
  Experiment e;
  e.dir = fs::path(path).parent_path();
  try {
    e.raw = json::parse(in);
    const json& j = e.raw;
    e.lengths = j.at("lengths").get<std::vector<double>>();
    e.alphas = j.value("alphas", std::vector<double>{});
    e.elements_per_edge = j.value("elements_per_edge", e.elements_per_edge);
    e.n_steps = j.value("n_steps", e.n_steps);
    if (j.contains("T")) e.T = j["T"].get<double>();
    e.T_factor = j.value("T_factor", e.T_factor);
    if (j.contains("epsilon") && !j["epsilon"].is_string()) e.epsilon = j["epsilon"].get<double>();
    else if (j.contains("epsilon") && j["epsilon"] != "optimal") throw CliError{2, "epsilon must be a number or \"optimal\""};
    e.cg_tol = j.value("cg_tol", e.cg_tol);
    e.tol = j.value("tol", e.tol);
    e.thin = j.value("thin", e.thin);
    e.seed = j.value("seed", e.seed);
  } catch (const json::exception& ex) {
    throw CliError{2, std::string("bad config: ") + ex.what()};
  }
  if (seed_flag) e.seed = *seed_flag;
  if (e.n_steps <= 0 || e.elements_per_edge <= 0 || e.thin <= 0) {
    throw CliError{2, "n_steps, elements_per_edge and thin must be positive"};
  }
  return e;
}

struct Graph {
  sg_graph* g = nullptr;
  ~Graph() { sg_graph_destroy(g); }
};
struct Model {
  sg_model* m = nullptr;
  ~Model() { sg_model_destroy(m); }
};

void make_graph(const Experiment& e, Graph& g) {
  check(sg_graph_create(e.lengths.data(), e.lengths.size(), e.alphas.data(), e.alphas.size(), &g.g), "graph");
}

double horizon(const Experiment& e, const sg_graph* g) {
  if (e.T) return *e.T;
  double eps = 0.0, T = 0.0;
  check(sg_graph_optimal_horizon(g, &eps, &T), "optimal horizon");
  return e.T_factor * T;
}

// Unseeded random_modes profiles take the experiment seed, offset per state.
json seeded(json profile, std::uint64_t seed) {
  auto fill = [&](json& p) {
    if (p.is_object() && p.value("type", "") == "random_modes" && !p.contains("seed")) p["seed"] = seed;
  };
  if (profile.is_array()) {
    for (auto& p : profile) fill(p);
  } else {
    fill(profile);
  }
  return profile;
}

std::vector<sg_complex> state(const Experiment& e, const sg_model* m, const char* key, std::uint64_t offset) {
  std::vector<sg_complex> u(static_cast<size_t>(sg_model_n_dof(m)));
  json p = e.raw.contains(key) ? e.raw[key] : json{{"type", "zero"}};
  const std::string text = seeded(p, e.seed + offset).dump();
  check(sg_model_state_from_json(m, text.c_str(), u.data(), u.size()), key);
  return u;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text << '\n';
  if (!out) throw CliError{1, "failed writing " + path.string()};
}

int cmd_validate(const Experiment& e, const fs::path& out) {
  Graph g;
  make_graph(e, g);
  const std::string text = fetch_json([&](char* b, size_t c, size_t* n) { return sg_graph_validate_json(g.g, b, c, n); });
  write_file(out / "validate.json", text);
  std::cout << text << '\n';
  return json::parse(text)["ok"].get<bool>() ? 0 : 1;
}

// Reads a controls CSV (time,edge,real,imag; node-major) into a row-major slots x nodes array.
std::vector<sg_complex> read_controls(const Experiment& e, const sg_model* m, double T) {
  fs::path path = e.raw["controls"].get<std::string>();
  if (path.is_relative()) path = e.dir / path;
  std::ifstream in(path);
  if (!in) throw CliError{2, "cannot open controls " + path.string()};
  const size_t rows = static_cast<size_t>(sg_model_n_slots(m));
  const size_t nodes = static_cast<size_t>(e.n_steps) + 1;
  std::vector<sg_complex> h(rows * nodes);
  std::string line;
  std::getline(in, line);
  size_t k = 0;
  double t_last = 0.0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    double t = 0.0, re = 0.0, im = 0.0;
    int edge = 0;
    char c1 = 0, c2 = 0, c3 = 0;
    if (!(ls >> t >> c1 >> edge >> c2 >> re >> c3 >> im) || edge < 2 || static_cast<size_t>(edge - 2) >= rows ||
        k >= rows * nodes || static_cast<size_t>(edge - 2) != k % rows) {
      throw CliError{2, "bad controls row: " + line};
    }
    h[static_cast<size_t>(edge - 2) * nodes + k / rows] = {re, im};
    t_last = t;
    ++k;
  }
  if (k != rows * nodes || std::abs(t_last - T) > 1e-9 * std::max(1.0, T)) {
    throw CliError{2, "controls do not match the time grid (n_steps + 1 nodes on [0, T])"};
  }
  return h;
}

int cmd_simulate(const Experiment& e, const fs::path& out) {
  Graph g;
  make_graph(e, g);
  Model m;
  check(sg_model_create(g.g, e.elements_per_edge, &m.m), "model");
  const double T = horizon(e, g.g);
  const auto u0 = state(e, m.m, "initial", 0);
  sg_trajectory* t = nullptr;
  if (e.raw.contains("controls")) {
    const auto h = read_controls(e, m.m, T);
    check(sg_simulate_controlled(m.m, u0.data(), u0.size(), h.data(), h.size(), T, e.n_steps, e.thin, &t),
          "simulate");
  } else {
    check(sg_simulate(m.m, u0.data(), u0.size(), T, e.n_steps, e.thin, &t), "simulate");
  }
  std::unique_ptr<sg_trajectory, void (*)(sg_trajectory*)> guard(t, sg_trajectory_destroy);
  check(sg_trajectory_write_csv(t, (out / "trajectory.csv").string().c_str()), "trajectory csv");
  if (e.raw.contains("controls")) {
    check(sg_trajectory_write_controls_csv(t, (out / "controls_echo.csv").string().c_str()), "controls csv");
  }
  const std::string text =
      fetch_json([&](char* b, size_t c, size_t* n) { return sg_trajectory_conservation_json(t, b, c, n); });
  write_file(out / "conservation.json", text);
  std::cout << text << '\n';
  return 0;
}

int cmd_observe(const Experiment& e, const fs::path& out) {
  Graph g;
  make_graph(e, g);
  Model m;
  check(sg_model_create(g.g, e.elements_per_edge, &m.m), "model");
  const double T = horizon(e, g.g);
  const std::string text = fetch_json([&](char* b, size_t c, size_t* n) {
    return sg_observe_json(m.m, T, e.n_steps, e.epsilon, e.tol, e.seed, b, c, n);
  });
  write_file(out / "diagnostics.json", text);
  std::cout << text << '\n';
  return 0;
}

int cmd_control(const Experiment& e, const fs::path& out) {
  Graph g;
  make_graph(e, g);
  Model m;
  check(sg_model_create(g.g, e.elements_per_edge, &m.m), "model");
  const double T = horizon(e, g.g);
  const auto u0 = state(e, m.m, "initial", 0);
  std::vector<sg_complex> uT;
  if (e.raw.contains("target")) uT = state(e, m.m, "target", 1);
  sg_hum_result* r = nullptr;
  check(sg_hum_solve(m.m, u0.data(), uT.empty() ? nullptr : uT.data(), u0.size(), T, e.n_steps, e.cg_tol, &r),
        "control");
  std::unique_ptr<sg_hum_result, void (*)(sg_hum_result*)> guard(r, sg_hum_result_destroy);
  check(sg_hum_result_write_controls_csv(r, (out / "controls.csv").string().c_str()), "controls csv");
  const std::string text = fetch_json([&](char* b, size_t c, size_t* n) { return sg_hum_result_json(r, b, c, n); });
  write_file(out / "hum.json", text);
  std::cout << text << '\n';
  return 0;
}

int cmd_identity(const Experiment& e, const fs::path& out) {
  Graph g;
  make_graph(e, g);
  Model m;
  check(sg_model_create(g.g, e.elements_per_edge, &m.m), "model");
  const double T = horizon(e, g.g);
  const auto u0 = state(e, m.m, "initial", 0);
  sg_trajectory* t = nullptr;
  check(sg_simulate(m.m, u0.data(), u0.size(), T, e.n_steps, e.thin, &t), "simulate");
  std::unique_ptr<sg_trajectory, void (*)(sg_trajectory*)> guard(t, sg_trajectory_destroy);

  std::vector<std::string> multipliers{"1", "x"};
  if (e.raw.contains("multiplier")) {
    multipliers.clear();
    const json& q = e.raw["multiplier"];
    const json list = (q.is_array() && !q.empty() && q[0].is_number()) || !q.is_array() ? json::array({q}) : q;
    for (const auto& item : list) multipliers.push_back(item.is_string() ? item.get<std::string>() : item.dump());
  }

  json report = json::array();
  for (const auto& q : multipliers) {
    report.push_back(json::parse(fetch_json(
        [&](char* b, size_t c, size_t* n) { return sg_trajectory_identity_json(t, q.c_str(), b, c, n); })));
  }
  const std::string text = report.dump(2);
  write_file(out / "identity.json", text);
  std::cout << text << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary control of the biharmonic Schrodinger equation on a star graph"};
  app.require_subcommand(1);
  std::string config;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;

  const std::vector<std::string> names{"validate", "simulate", "observe", "control", "identity"};
  const std::vector<std::string> help{"check the graph hypotheses and report the horizon constants",
                                      "run the problem, optionally forced by a controls CSV, and report conserved quantities",
                                      "estimate the observability Gramian spectrum",
                                      "synthesize tip-slope controls steering initial to target",
                                      "evaluate the multiplier identity on a homogeneous run"};
  app.add_option("--config", config, "experiment JSON")->required()->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "seed for random profiles and iterative starts");
  for (size_t i = 0; i < names.size(); ++i) app.add_subcommand(names[i], help[i])->fallthrough();
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const Experiment e = load_experiment(config, seed);
    const fs::path out(out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw CliError{1, "cannot create " + out_dir + ": " + ec.message()};

    const std::string cmd = app.get_subcommands().front()->get_name();
    if (cmd == "validate") return cmd_validate(e, out);
    if (cmd == "simulate") return cmd_simulate(e, out);
    if (cmd == "observe") return cmd_observe(e, out);
    if (cmd == "control") return cmd_control(e, out);
    return cmd_identity(e, out);
  } catch (const CliError& err) {
    std::cerr << "sghum: " << err.message << '\n';
    return err.code;
  }
}
