// graphexon — expander-graph mean field game toolbox.
//
// Subcommands: graph, spectrum, orbit, stability, simulate, converge.
// Every run is deterministic given its config file and seed; numeric output
// carries full double precision. Exit codes: 0 success, 1 certification or
// model-validity failure, 2 usage error, 3 numerical-convergence failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <Eigen/Core>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "graphexon/margulis.hpp"
#include "graphexon/mfg.hpp"
#include "graphexon/operators.hpp"
#include "graphexon/simulate.hpp"
#include "graphexon/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace graphexon;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCertification = 1;
constexpr int kExitUsage = 2;
constexpr int kExitConvergence = 3;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open output file " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

// ---------------------------------------------------------------------------
// named test functions

struct NamedTorusFunction {
  TorusFunction fn;
  // grid sampling for diagnostics; zero waves mean the name has no grid analog
  int wave1 = 0, wave2 = 0;
  bool cos1 = false, cos2 = false;
};

const std::map<std::string, NamedTorusFunction>& torus_registry() {
  static const std::map<std::string, NamedTorusFunction> reg = {
      {"sin_x1",
       {{[](double x1, double) { return std::sin(2 * M_PI * x1); }, 2 * M_PI},
        1, 0, false, false}},
      {"sin_x2",
       {{[](double, double x2) { return std::sin(2 * M_PI * x2); }, 2 * M_PI},
        0, 1, false, false}},
      {"cos_x1",
       {{[](double x1, double) { return std::cos(2 * M_PI * x1); }, 2 * M_PI},
        1, 0, true, false}},
      {"sin_x1_sin_x2",
       {{[](double x1, double x2) {
           return std::sin(2 * M_PI * x1) * std::sin(2 * M_PI * x2);
         },
         2 * M_PI * std::sqrt(2.0)},
        1, 1, false, false}},
      {"cos_x1_cos_x2",
       {{[](double x1, double x2) {
           return std::cos(2 * M_PI * x1) * std::cos(2 * M_PI * x2);
         },
         2 * M_PI * std::sqrt(2.0)},
        1, 1, true, true}},
      {"sin_x1_plus_sin_x2",
       {{[](double x1, double x2) {
           return std::sin(2 * M_PI * x1) + std::sin(2 * M_PI * x2);
         },
         2 * M_PI * std::sqrt(2.0)},
        0, 0, false, false}},
  };
  return reg;
}

const TorusFunction& lookup_torus(const std::string& name) {
  auto it = torus_registry().find(name);
  if (it == torus_registry().end())
    throw ConfigError("unknown torus function '" + name + "'");
  return it->second.fn;
}

GridField lookup_test_field(const std::string& name, std::int64_t n) {
  auto it = torus_registry().find(name);
  if (it == torus_registry().end() ||
      (it->second.wave1 == 0 && it->second.wave2 == 0))
    throw ConfigError("'" + name + "' is not usable as a grid test field");
  const auto& s = it->second;
  return fourier_test_field(n, s.wave1, s.wave2, s.cos1, s.cos2);
}

const std::map<std::string, EdgeFunction>& edge_registry() {
  static const std::map<std::string, EdgeFunction> reg = {
      {"mass", [](TorusPoint, TorusPoint) { return 1.0; }},
      {"t1_resonant",
       [](TorusPoint x, TorusPoint y) {
         return std::cos(2 * M_PI * (y.x1 - x.x1 - 2 * x.x2));
       }},
      {"t1_inv_resonant",
       [](TorusPoint x, TorusPoint y) {
         return std::cos(2 * M_PI * (y.x1 - x.x1 + 2 * x.x2));
       }},
      {"t2_resonant",
       [](TorusPoint x, TorusPoint y) {
         return std::cos(2 * M_PI * (y.x2 - 2 * x.x1 - x.x2));
       }},
      {"t2_inv_resonant",
       [](TorusPoint x, TorusPoint y) {
         return std::cos(2 * M_PI * (y.x2 + 2 * x.x1 - x.x2));
       }},
      {"mixed",
       [](TorusPoint x, TorusPoint y) {
         return std::sin(2 * M_PI * (y.x1 - x.x1 - 2 * x.x2)) +
                0.5 * std::cos(2 * M_PI * (y.x2 - 2 * x.x1 - x.x2)) +
                0.25 * std::cos(2 * M_PI * x.x1) * std::cos(2 * M_PI * y.x2);
       }},
      {"cos_x1_cos_y2",
       [](TorusPoint x, TorusPoint y) {
         return std::cos(2 * M_PI * x.x1) * std::cos(2 * M_PI * y.x2);
       }},
  };
  return reg;
}

const EdgeFunction& lookup_edge(const std::string& name) {
  auto it = edge_registry().find(name);
  if (it == edge_registry().end())
    throw ConfigError("unknown edge test function '" + name + "'");
  return it->second;
}

// ---------------------------------------------------------------------------
// run configuration: defaults < config file < explicit CLI flags

struct RunConfig {
  std::string out = "out";
  std::uint64_t seed = 20240801;
  std::vector<std::int64_t> n_list;  // subcommand-specific meaning
  MfgParameters params{-1.0, 1.0, -1.0, 0.1, 2.0, 1.0, 0.5, 2.0};
  double rho = kTreeRadius;
  double t_end = 3.0;
  double dt = 1e-3;
  std::string mode = "meanfield";
  int field_stride = 10;
  InitialCondition init;
  std::vector<std::int64_t> m0{1, 0};
  std::vector<std::int64_t> radius_list{10, 20, 40};
  double c_min = -8.0, c_max = 8.0;
  int c_steps = 161;
  std::string kind = "operator";
  std::string f_name = "sin_x1_plus_sin_x2";
  std::string psi_name = "t1_resonant";
  int quad = 0;  // 0 = per-command default
  int sub = 4;
  std::vector<double> snapshot_times;
  bool pgm = false;
  std::vector<std::string> test_functions{"sin_x1_sin_x2", "sin_x1", "cos_x1"};

  json to_json() const {
    return json{
        {"out", out},
        {"seed", seed},
        {"n", n_list},
        {"params",
         {{"a", params.a},
          {"b", params.b},
          {"c", params.c},
          {"sigma", params.sigma},
          {"q", params.q},
          {"r", params.r},
          {"gamma", params.gamma},
          {"eta", params.eta}}},
        {"rho", rho},
        {"t_end", t_end},
        {"dt", dt},
        {"mode", mode},
        {"field_stride", field_stride},
        {"init",
         {{"wave", {init.wave1, init.wave2}},
          {"amplitude", init.amplitude},
          {"noise_std", init.noise_std}}},
        {"m0", m0},
        {"radius_list", radius_list},
        {"c_min", c_min},
        {"c_max", c_max},
        {"c_steps", c_steps},
        {"kind", kind},
        {"f", f_name},
        {"psi", psi_name},
        {"quad", quad},
        {"sub", sub},
        {"snapshot_times", snapshot_times},
        {"pgm", pgm},
        {"test_functions", test_functions},
    };
  }
};

template <typename T>
void from_config(const json& j, const char* key, T& value) {
  if (j.contains(key)) value = j.at(key).get<T>();
}

void apply_config_file(RunConfig& cfg, const std::string& path,
                       const std::map<std::string, bool>& cli_given) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json j = json::parse(in);

  auto absent = [&](const char* flag) {
    auto it = cli_given.find(flag);
    return it == cli_given.end() || !it->second;
  };

  if (absent("out")) from_config(j, "out", cfg.out);
  if (absent("seed")) from_config(j, "seed", cfg.seed);
  if (absent("n")) from_config(j, "n", cfg.n_list);
  if (j.contains("params")) {
    const json& p = j["params"];
    if (absent("a")) from_config(p, "a", cfg.params.a);
    if (absent("b")) from_config(p, "b", cfg.params.b);
    if (absent("c")) from_config(p, "c", cfg.params.c);
    if (absent("sigma")) from_config(p, "sigma", cfg.params.sigma);
    if (absent("q")) from_config(p, "q", cfg.params.q);
    if (absent("r")) from_config(p, "r", cfg.params.r);
    if (absent("gamma")) from_config(p, "gamma", cfg.params.gamma);
    if (absent("eta")) from_config(p, "eta", cfg.params.eta);
  }
  if (absent("rho")) from_config(j, "rho", cfg.rho);
  if (absent("t-end")) from_config(j, "t_end", cfg.t_end);
  if (absent("dt")) from_config(j, "dt", cfg.dt);
  if (absent("mode")) from_config(j, "mode", cfg.mode);
  if (absent("field-stride")) from_config(j, "field_stride", cfg.field_stride);
  if (j.contains("init")) {
    const json& i = j["init"];
    if (i.contains("wave")) {
      cfg.init.wave1 = i["wave"].at(0).get<int>();
      cfg.init.wave2 = i["wave"].at(1).get<int>();
    }
    from_config(i, "amplitude", cfg.init.amplitude);
    from_config(i, "noise_std", cfg.init.noise_std);
  }
  if (absent("m0")) from_config(j, "m0", cfg.m0);
  if (absent("radius")) from_config(j, "radius_list", cfg.radius_list);
  if (absent("c-min")) from_config(j, "c_min", cfg.c_min);
  if (absent("c-max")) from_config(j, "c_max", cfg.c_max);
  if (absent("c-steps")) from_config(j, "c_steps", cfg.c_steps);
  if (absent("kind")) from_config(j, "kind", cfg.kind);
  if (absent("f")) from_config(j, "f", cfg.f_name);
  if (absent("psi")) from_config(j, "psi", cfg.psi_name);
  if (absent("quad")) from_config(j, "quad", cfg.quad);
  if (absent("sub")) from_config(j, "sub", cfg.sub);
  if (absent("snapshot-times")) from_config(j, "snapshot_times", cfg.snapshot_times);
  if (absent("pgm")) from_config(j, "pgm", cfg.pgm);
  if (absent("test-functions")) from_config(j, "test_functions", cfg.test_functions);
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_graph(const RunConfig& cfg) {
  if (cfg.n_list.size() != 1)
    throw ConfigError("graph: exactly one resolution via --n");
  const std::int64_t n = cfg.n_list[0];
  if (n < 2) throw ConfigError("graph: N must be >= 2");

  MargulisGraph g(n);
  fs::create_directories(cfg.out);
  {
    auto out = open_out(fs::path(cfg.out) / "edges.csv");
    g.write_edge_csv(out);
  }
  // regularity: each generator table is a bijection, so 8 out- and 8
  // in-edges per vertex; symmetry follows from inverse closure
  bool regular = true;
  for (int k = 0; k < MargulisGraph::kDegree && regular; ++k) {
    std::vector<bool> hit(g.vertex_count(), false);
    for (std::int64_t v = 0; v < g.vertex_count(); ++v) hit[g.image(k, v)] = true;
    for (std::int64_t v = 0; v < g.vertex_count(); ++v) regular = regular && hit[v];
  }
  bool symmetric = true;
  for (int k = 0; k < 4 && symmetric; ++k)
    for (std::int64_t v = 0; v < g.vertex_count(); ++v)
      symmetric = symmetric && g.image(k + 4, g.image(k, v)) == v;

  write_json(fs::path(cfg.out) / "graph_summary.json",
             json{{"N", n},
                  {"M_N", g.vertex_count()},
                  {"K", MargulisGraph::kDegree},
                  {"regular", regular},
                  {"symmetric", symmetric}});
  std::cout << "graph: N=" << n << " M_N=" << g.vertex_count() << " -> "
            << cfg.out << "\n";
  return regular && symmetric ? kExitOk : kExitCertification;
}

int cmd_spectrum(const RunConfig& cfg) {
  if (cfg.n_list.empty()) throw ConfigError("spectrum: need --n N[,N...]");
  fs::create_directories(cfg.out);
  auto csv = open_out(fs::path(cfg.out) / "spectrum.csv");
  csv << "N,lambda2,lambda_min,zero_mean_norm,gap\n";
  bool certified = true;
  for (std::int64_t n : cfg.n_list) {
    SpectralReport rep = dense_spectrum(MargulisGraph(n));
    write_json(fs::path(cfg.out) / ("spectrum_N" + std::to_string(n) + ".json"),
               rep.to_json());
    csv << n << ',' << fmt(rep.lambda2) << ',' << fmt(rep.lambda_min) << ','
        << fmt(rep.zero_mean_norm) << ',' << fmt(rep.gap) << '\n';
    const bool ok = rep.zero_mean_norm <= kMargulisBound + 1e-9;
    certified = certified && ok;
    std::cout << "spectrum: N=" << n << " zero_mean_norm=" << fmt(rep.zero_mean_norm)
              << " gap=" << fmt(rep.gap) << (ok ? "" : "  ** bound violated") << "\n";
  }
  return certified ? kExitOk : kExitCertification;
}

int cmd_orbit(const RunConfig& cfg) {
  if (cfg.m0.size() != 2 || (cfg.m0[0] == 0 && cfg.m0[1] == 0))
    throw ConfigError("orbit: --m0 must be a nonzero lattice point");
  if (cfg.radius_list.empty()) throw ConfigError("orbit: need --radius R[,R...]");
  fs::create_directories(cfg.out);
  auto csv = open_out(fs::path(cfg.out) / "orbit.csv");
  csv << "R,vertices,radius_estimate\n";
  bool certified = true;
  double prev = 0.0;
  for (std::int64_t r : cfg.radius_list) {
    OrbitGraph og = build_orbit_graph({cfg.m0[0], cfg.m0[1]}, r);
    const double est = orbit_spectral_radius(og);
    csv << r << ',' << og.vertices.size() << ',' << fmt(est) << '\n';
    std::cout << "orbit: R=" << r << " vertices=" << og.vertices.size()
              << " estimate=" << fmt(est) << "\n";
    certified = certified && est <= kTreeRadius + 1e-3 && est >= prev - 1e-9;
    prev = est;
  }
  return certified ? kExitOk : kExitCertification;
}

int cmd_stability(const RunConfig& cfg) {
  RiccatiData rd = solve_riccati(cfg.params);
  StabilityAtlas atlas = stability_atlas(rd, cfg.rho);
  fs::create_directories(cfg.out);
  write_json(fs::path(cfg.out) / "atlas.json", atlas.to_json());

  if (cfg.c_steps < 2) throw ConfigError("stability: c_steps must be >= 2");
  auto csv = open_out(fs::path(cfg.out) / "stability_sweep.csv");
  csv << "c,label,Acl_rho,Acl_neg_rho,Acl_one\n";
  auto rate_or_nan = [&](double c, double lam) {
    return sare_discriminant(rd, c, lam) < 0.0
               ? std::numeric_limits<double>::quiet_NaN()
               : closed_loop_rate(rd, c, lam);
  };
  for (int i = 0; i < cfg.c_steps; ++i) {
    const double c =
        cfg.c_min + (cfg.c_max - cfg.c_min) * i / (cfg.c_steps - 1);
    csv << fmt(c) << ',' << to_string(classify_coupling(rd, c, cfg.rho)) << ','
        << fmt(rate_or_nan(c, cfg.rho)) << ',' << fmt(rate_or_nan(c, -cfg.rho))
        << ',' << fmt(rate_or_nan(c, 1.0)) << '\n';
  }
  std::cout << "stability: theta=" << fmt(atlas.theta)
            << " c_plus=" << fmt(atlas.c_plus) << " c_minus=" << fmt(atlas.c_minus)
            << " c_star=" << fmt(atlas.c_star) << " -> " << cfg.out << "\n";
  return kExitOk;
}

void write_deviation_csv(const fs::path& path, const DeviationTable& table) {
  auto out = open_out(path);
  out << "t,mean_bar,deviation_norm";
  for (const auto& label : table.labels) out << ",ip_" << label;
  out << '\n';
  for (std::size_t i = 0; i < table.times.size(); ++i) {
    out << fmt(table.times[i]) << ',' << fmt(table.mean_bar[i]) << ','
        << fmt(table.deviation_norm[i]);
    for (double ip : table.inner_products[i]) {
      out << ',';
      if (!std::isnan(ip)) out << fmt(ip);
    }
    out << '\n';
  }
}

int cmd_simulate(const RunConfig& cfg) {
  if (cfg.n_list.size() != 1)
    throw ConfigError("simulate: exactly one resolution via --n");
  const std::int64_t n = cfg.n_list[0];

  SimulationConfig sim;
  sim.resolution = n;
  sim.params = cfg.params;
  sim.t_end = cfg.t_end;
  sim.dt = cfg.dt;
  sim.seed = cfg.seed;
  sim.init = cfg.init;
  sim.field_stride = cfg.field_stride;
  sim.mode = cfg.mode == "agents" ? SimMode::FullAgents : SimMode::MeanFieldOnly;
  if (cfg.mode != "agents" && cfg.mode != "meanfield")
    throw ConfigError("simulate: --mode must be meanfield or agents");

  const double c = cfg.params.c;
  RiccatiData rd = solve_riccati(cfg.params);
  sim.validate(rd.a_c, c);

  MargulisGraph g(n);
  ModalDecomposition md = decompose(g);

  Trajectory traj;
  if (sim.mode == SimMode::FullAgents) {
    AgentSimResult res = simulate_agents(g, rd, c, sim, &md);
    traj = std::move(res.trajectory);
  } else {
    GridField m0 = initial_field(g, sim.init, sim.seed);
    traj = evolve_mean_field(md, rd, c, m0, uniform_time_grid(sim.t_end, sim.dt),
                             sim.field_stride);
  }

  std::vector<GridField> tests;
  for (const auto& name : cfg.test_functions)
    tests.push_back(lookup_test_field(name, n));
  DeviationTable table = deviation_diagnostics(traj, tests, cfg.test_functions);

  fs::create_directories(cfg.out);
  {
    auto out = open_out(fs::path(cfg.out) / "trajectory.csv");
    write_trajectory_csv(out, traj, &table);
  }
  write_deviation_csv(fs::path(cfg.out) / "diagnostics.csv", table);

  std::vector<double> snap_times = cfg.snapshot_times;
  if (snap_times.empty()) snap_times = {0.0, sim.t_end};
  for (double t : snap_times) {
    const std::size_t j = traj.field_index_at(t);
    const double actual = traj.field_time(j);
    std::string stem = "snapshot_t" + fmt(actual);
    {
      auto out = open_out(fs::path(cfg.out) / (stem + ".csv"));
      write_snapshot_csv(out, traj.fields[j], n);
    }
    if (cfg.pgm) {
      auto out = open_out(fs::path(cfg.out) / (stem + ".pgm"));
      write_snapshot_pgm(out, traj.fields[j], n);
      write_json(fs::path(cfg.out) / (stem + ".json"),
                 snapshot_sidecar(traj.fields[j], n, actual));
    }
  }

  // finite-spectrum classification next to the limit atlas
  StabilityAtlas atlas = stability_atlas(rd, cfg.rho);
  double max_rate = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < md.eigenvalues.size(); ++i)
    if (i != md.constant_mode)
      max_rate = std::max(max_rate, closed_loop_rate(rd, c, md.eigenvalues[i]));
  json manifest{
      {"config", cfg.to_json()},
      {"seed", cfg.seed},
      {"atlas", atlas.to_json()},
      {"label_limit_rho", to_string(classify_coupling(rd, c, cfg.rho))},
      {"finite_spectrum",
       {{"max_nonconstant_rate", max_rate},
        {"turing_unstable", max_rate > 0.0},
        {"mean_rate", closed_loop_rate(rd, c, md.eigenvalues[md.constant_mode])}}},
  };
  write_json(fs::path(cfg.out) / "manifest.json", manifest);

  std::cout << "simulate: N=" << n << " c=" << fmt(c) << " mode=" << cfg.mode
            << " dev(0)=" << fmt(traj.deviation_norm.front())
            << " dev(t_end)=" << fmt(traj.deviation_norm.back()) << " -> "
            << cfg.out << "\n";
  return kExitOk;
}

int cmd_converge(const RunConfig& cfg) {
  if (cfg.n_list.size() < 2)
    throw ConfigError("converge: need an increasing --n list with >= 2 entries");
  for (std::size_t i = 1; i < cfg.n_list.size(); ++i)
    if (cfg.n_list[i] <= cfg.n_list[i - 1])
      throw ConfigError("converge: --n list must be strictly increasing");

  std::vector<double> gaps;
  if (cfg.kind == "operator") {
    QuadratureGrid quad{cfg.quad > 0 ? cfg.quad : 240};
    gaps = strong_convergence_gap(lookup_torus(cfg.f_name), cfg.n_list, quad,
                                  cfg.sub);
  } else if (cfg.kind == "measure") {
    QuadratureGrid quad{cfg.quad > 0 ? cfg.quad : 200};
    gaps = weak_convergence_gap(lookup_edge(cfg.psi_name), cfg.n_list, quad);
  } else {
    throw ConfigError("converge: --kind must be operator or measure");
  }

  fs::create_directories(cfg.out);
  auto csv = open_out(fs::path(cfg.out) / "converge.csv");
  csv << "N,gap\n";
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    csv << cfg.n_list[i] << ',' << fmt(gaps[i]) << '\n';
    std::cout << "converge: N=" << cfg.n_list[i] << " gap=" << fmt(gaps[i]) << "\n";
  }
  return gaps.back() < gaps.front() ? kExitOk : kExitConvergence;
}

}  // namespace

int main(int argc, char** argv) {
  if (const char* threads = std::getenv("GRAPHEXON_THREADS")) {
    const int t = std::atoi(threads);
    if (t > 0) Eigen::setNbThreads(t);
  }

  CLI::App app{"Margulis expander graphs, graphexon operator limits, and the "
               "associated linear-quadratic mean field game"};
  app.require_subcommand(1);

  RunConfig cfg;
  std::string config_path;

  std::map<std::string, CLI::App*> subs;
  for (const char* name : {"graph", "spectrum", "orbit", "stability", "simulate",
                           "converge"})
    subs[name] = app.add_subcommand(name);
  subs["graph"]->description("export the edge list and summary of G_N");
  subs["spectrum"]->description("dense spectra and expander certification");
  subs["orbit"]->description("Fourier-dual orbit graphs and walk-norm bounds");
  subs["stability"]->description("stability atlas and coupling sweep");
  subs["simulate"]->description("closed-loop mean-field / agent simulation");
  subs["converge"]->description("operator and measure convergence diagnostics");

  for (auto& [name, sub] : subs) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--seed", cfg.seed, "64-bit RNG seed");
    sub->add_option("--n", cfg.n_list, "resolution(s)")->delimiter(',');
    sub->add_option("--a", cfg.params.a, "drift");
    sub->add_option("--b", cfg.params.b, "control gain");
    sub->add_option("--c", cfg.params.c, "network coupling");
    sub->add_option("--sigma", cfg.params.sigma, "noise amplitude");
    sub->add_option("--q", cfg.params.q, "state weight");
    sub->add_option("--r", cfg.params.r, "control weight");
    sub->add_option("--gamma", cfg.params.gamma, "discount rate");
    sub->add_option("--eta", cfg.params.eta, "target coupling weight");
    sub->add_option("--rho", cfg.rho, "spectral radius of the deviation modes");
  }
  subs["orbit"]->add_option("--m0", cfg.m0, "dual seed point")->delimiter(',');
  subs["orbit"]->add_option("--radius", cfg.radius_list, "truncation radii")
      ->delimiter(',');
  subs["stability"]->add_option("--c-min", cfg.c_min, "sweep start");
  subs["stability"]->add_option("--c-max", cfg.c_max, "sweep end");
  subs["stability"]->add_option("--c-steps", cfg.c_steps, "sweep points");
  subs["simulate"]->add_option("--t-end", cfg.t_end, "horizon");
  subs["simulate"]->add_option("--dt", cfg.dt, "time step");
  subs["simulate"]->add_option("--mode", cfg.mode, "meanfield|agents");
  subs["simulate"]->add_option("--field-stride", cfg.field_stride,
                               "store fields every k steps");
  subs["simulate"]
      ->add_option("--snapshot-times", cfg.snapshot_times, "snapshot times")
      ->delimiter(',');
  subs["simulate"]->add_flag("--pgm", cfg.pgm, "also write PGM snapshots");
  subs["simulate"]
      ->add_option("--test-functions", cfg.test_functions, "diagnostic modes")
      ->delimiter(',');
  subs["converge"]->add_option("--kind", cfg.kind, "operator|measure");
  subs["converge"]->add_option("--f", cfg.f_name, "torus function name");
  subs["converge"]->add_option("--psi", cfg.psi_name, "edge function name");
  subs["converge"]->add_option("--quad", cfg.quad, "quadrature resolution");
  subs["converge"]->add_option("--sub", cfg.sub, "projection oversampling");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  CLI::App* active = app.get_subcommands().front();
  try {
    if (!config_path.empty()) {
      std::map<std::string, bool> flags;
      for (const auto* opt : active->get_options())
        if (opt->count() > 0) {
          std::string key = opt->get_name(false, true);
          while (!key.empty() && key.front() == '-') key.erase(key.begin());
          flags[key] = true;
        }
      apply_config_file(cfg, config_path, flags);
    }

    const std::string name = active->get_name();
    if (name == "graph") return cmd_graph(cfg);
    if (name == "spectrum") return cmd_spectrum(cfg);
    if (name == "orbit") return cmd_orbit(cfg);
    if (name == "stability") return cmd_stability(cfg);
    if (name == "simulate") return cmd_simulate(cfg);
    if (name == "converge") return cmd_converge(cfg);
    return kExitUsage;
  } catch (const ConfigError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const SizeError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DimensionError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CertificationError& e) {
    std::cerr << "certification failure: " << e.what() << "\n";
    return kExitCertification;
  } catch (const NoRealSolutionError& e) {
    std::cerr << "model failure: " << e.what() << "\n";
    return kExitCertification;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence failure: " << e.what() << " (last estimate "
              << e.last_estimate << ")\n";
    return kExitConvergence;
  } catch (const json::exception& e) {
    std::cerr << "usage error: bad config file: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConvergence;
  }
}
