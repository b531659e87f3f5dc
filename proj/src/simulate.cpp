#include "graphexon/simulate.hpp"

#include <algorithm>
#include <cmath>

#include "graphexon/spectral.hpp"

namespace graphexon {

namespace {

// init-noise stream tag; agent noise uses step counters 0..n_steps-1
constexpr std::uint64_t kInitNoiseStep = 0x696e6974ULL;

void record_step(Trajectory& traj, double t, const GridField& field) {
  const double mbar = field.mean();
  traj.times.push_back(t);
  traj.mean_bar.push_back(mbar);
  traj.deviation_norm.push_back(field_norm(GridField(field.array() - mbar)));
}

}  // namespace

void SimulationConfig::validate(double a_c, double c) const {
  if (resolution < 1) throw ConfigError("SimulationConfig: resolution must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("SimulationConfig: dt must be > 0");
  if (t_end < dt) throw ConfigError("SimulationConfig: t_end must be >= dt");
  if (field_stride < 1) throw ConfigError("SimulationConfig: field_stride must be >= 1");
  const double denom = std::abs(a_c + std::abs(c));
  const double guard =
      1e-2 * std::max(1.0, denom > 0.0 ? 1.0 / denom
                                       : std::numeric_limits<double>::infinity());
  if (dt > guard)
    throw ConfigError("SimulationConfig: dt = " + std::to_string(dt) +
                      " violates the stability guard " + std::to_string(guard));
}

GridField initial_field(const MargulisGraph& g, const InitialCondition& init,
                        std::uint64_t seed) {
  const std::int64_t n = g.resolution();
  GridField wave = fourier_test_field(n, init.wave1, init.wave2);
  GridField out(n * n);
  for (std::int64_t v = 0; v < n * n; ++v)
    out[v] = init.amplitude * wave[v] +
             init.noise_std * counter_normal(seed, static_cast<std::uint64_t>(v),
                                             kInitNoiseStep);
  return out;
}

Eigen::VectorXd ModalDecomposition::coefficients(const GridField& f) const {
  if (f.size() != modes.rows())
    throw DimensionError("ModalDecomposition: field length mismatch");
  return modes.transpose() * f / static_cast<double>(modes.rows());
}

GridField ModalDecomposition::reconstruct(const Eigen::VectorXd& coeffs) const {
  if (coeffs.size() != modes.cols())
    throw DimensionError("ModalDecomposition: coefficient length mismatch");
  return modes * coeffs;
}

ModalDecomposition decompose(const MargulisGraph& g) {
  const std::int64_t m = g.vertex_count();
  if (m > kDenseVertexCap)
    throw SizeError("decompose: M_N = " + std::to_string(m) +
                    " exceeds the dense cap " + std::to_string(kDenseVertexCap));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.dense_adjacency(),
                                                        Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("decompose: eigensolver failed", 0.0);
  ModalDecomposition md;
  md.eigenvalues = solver.eigenvalues();
  md.modes = solver.eigenvectors() * std::sqrt(static_cast<double>(m));
  (md.eigenvalues.array() - 1.0).abs().minCoeff(&md.constant_mode);
  return md;
}

std::size_t Trajectory::field_index_at(double t) const {
  if (field_steps.empty()) throw ConfigError("Trajectory: no stored fields");
  std::size_t best = 0;
  double best_d = std::abs(field_time(0) - t);
  for (std::size_t j = 1; j < field_steps.size(); ++j) {
    double d = std::abs(field_time(j) - t);
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

std::vector<double> uniform_time_grid(double t_end, double dt) {
  if (!(dt > 0.0) || t_end < dt) throw ConfigError("uniform_time_grid: bad grid");
  const auto n = static_cast<std::size_t>(std::llround(t_end / dt));
  std::vector<double> grid(n + 1);
  for (std::size_t i = 0; i <= n; ++i) grid[i] = static_cast<double>(i) * dt;
  return grid;
}

namespace {

Eigen::VectorXd mode_rates(const ModalDecomposition& md, const RiccatiData& rd,
                           double c) {
  Eigen::VectorXd rates(md.eigenvalues.size());
  for (Eigen::Index i = 0; i < md.eigenvalues.size(); ++i) {
    const double lam = md.eigenvalues[i];
    if (rd.k != 0.0 && sare_discriminant(rd, c, lam) < 0.0)
      throw NoRealSolutionError(
          "evolve_mean_field: negative discriminant at mode " + std::to_string(i) +
          " (lambda = " + std::to_string(lam) + ")");
    rates[i] = closed_loop_rate(rd, c, lam);
  }
  return rates;
}

}  // namespace

Trajectory evolve_mean_field(const ModalDecomposition& md, const RiccatiData& rd,
                             double c, const GridField& m0,
                             const std::vector<double>& t_grid, int field_stride) {
  if (field_stride < 1) throw ConfigError("evolve_mean_field: bad field stride");
  const Eigen::VectorXd rates = mode_rates(md, rd, c);
  const Eigen::VectorXd coef0 = md.coefficients(m0);

  Trajectory traj;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    const double t = t_grid[i];
    GridField m = md.reconstruct((rates.array() * t).exp() * coef0.array());
    record_step(traj, t, m);
    if (i % static_cast<std::size_t>(field_stride) == 0 || i + 1 == t_grid.size()) {
      traj.field_steps.push_back(i);
      traj.fields.push_back(std::move(m));
    }
  }
  return traj;
}

GridField adjoint_field(const ModalDecomposition& md, const RiccatiData& rd,
                        double c, const GridField& m0, double t) {
  const Eigen::VectorXd rates = mode_rates(md, rd, c);
  const Eigen::VectorXd coef0 = md.coefficients(m0);
  Eigen::VectorXd weighted(coef0.size());
  for (Eigen::Index i = 0; i < coef0.size(); ++i)
    weighted[i] = sare_solution(rd, c, md.eigenvalues[i]) *
                  std::exp(rates[i] * t) * coef0[i];
  return md.reconstruct(weighted);
}

AgentSimResult simulate_agents(const MargulisGraph& g, const RiccatiData& rd,
                               double c, const SimulationConfig& config,
                               const ModalDecomposition* md_in) {
  config.validate(rd.a_c, c);
  const std::int64_t m = g.vertex_count();

  ModalDecomposition md_local;
  if (!md_in) {
    md_local = decompose(g);
    md_in = &md_local;
  }
  const ModalDecomposition& md = *md_in;
  if (md.modes.rows() != m)
    throw DimensionError("simulate_agents: decomposition does not match the graph");
  const Eigen::VectorXd rates = mode_rates(md, rd, c);
  const GridField m0 = initial_field(g, config.init, config.seed);
  const Eigen::VectorXd coef0 = md.coefficients(m0);
  Eigen::VectorXd branch(coef0.size());
  for (Eigen::Index i = 0; i < coef0.size(); ++i)
    branch[i] = sare_solution(rd, c, md.eigenvalues[i]);

  const std::size_t n_steps = static_cast<std::size_t>(
      std::llround(config.t_end / config.dt));
  const double sqrt_dt = std::sqrt(config.dt);

  GridField x = m0;  // agents start from the initial mean field
  AgentSimResult result;
  Trajectory& traj = result.trajectory;
  auto store = [&](std::size_t step, const GridField& field) {
    if (step % static_cast<std::size_t>(config.field_stride) == 0 ||
        step == n_steps) {
      traj.field_steps.push_back(step);
      traj.fields.push_back(field);
    }
  };

  record_step(traj, 0.0, x);
  store(0, x);
  for (std::size_t n = 0; n < n_steps; ++n) {
    const double t = static_cast<double>(n) * config.dt;
    const Eigen::VectorXd coef_t = (rates.array() * t).exp() * coef0.array();
    const GridField m_t = md.reconstruct(coef_t);
    const GridField s_t = md.reconstruct(branch.cwiseProduct(coef_t));
    const GridField coupling = g.adjacency_apply(m_t);
    for (std::int64_t v = 0; v < m; ++v) {
      double drift = rd.a_c * x[v] - rd.k * s_t[v] + c * coupling[v];
      double noise = config.params.sigma > 0.0
                         ? config.params.sigma * sqrt_dt *
                               counter_normal(config.seed,
                                              static_cast<std::uint64_t>(v), n)
                         : 0.0;
      x[v] += config.dt * drift + noise;
    }
    record_step(traj, static_cast<double>(n + 1) * config.dt, x);
    store(n + 1, x);
  }
  result.final_states = x;
  return result;
}

DeviationTable deviation_diagnostics(const Trajectory& traj,
                                     const std::vector<GridField>& test_fields,
                                     const std::vector<std::string>& labels) {
  if (labels.size() != test_fields.size())
    throw ConfigError("deviation_diagnostics: one label per test field");
  DeviationTable table;
  table.labels = labels;
  for (std::size_t j = 0; j < traj.field_steps.size(); ++j) {
    const GridField& m = traj.fields[j];
    const double mbar = m.mean();
    const GridField e = m.array() - mbar;
    const double dev = field_norm(e);
    table.times.push_back(traj.field_time(j));
    table.mean_bar.push_back(mbar);
    table.deviation_norm.push_back(dev);
    std::vector<double> row;
    row.reserve(test_fields.size());
    for (const auto& phi : test_fields) {
      if (dev <= 1e-14)
        row.push_back(std::numeric_limits<double>::quiet_NaN());
      else
        row.push_back(normalized_inner(e, phi) / dev);
    }
    table.inner_products.push_back(std::move(row));
  }
  return table;
}

GridField fourier_test_field(std::int64_t n, int wave1, int wave2, bool cosine1,
                             bool cosine2) {
  GridField out(n * n);
  for (std::int64_t v1 = 0; v1 < n; ++v1) {
    const double a1 = 2.0 * M_PI * wave1 * static_cast<double>(v1) / n;
    const double f1 = wave1 == 0 ? 1.0 : (cosine1 ? std::cos(a1) : std::sin(a1));
    for (std::int64_t v2 = 0; v2 < n; ++v2) {
      const double a2 = 2.0 * M_PI * wave2 * static_cast<double>(v2) / n;
      const double f2 = wave2 == 0 ? 1.0 : (cosine2 ? std::cos(a2) : std::sin(a2));
      out[v1 * n + v2] = f1 * f2;
    }
  }
  return out;
}

namespace {

void write_full(std::ostream& out, double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  out << buf;
}

}  // namespace

void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const DeviationTable* table) {
  out << "t,mean_bar,deviation_norm";
  if (table)
    for (std::size_t k = 1; k <= table->labels.size(); ++k) out << ",ip_" << k;
  out << '\n';
  std::size_t next_field = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    write_full(out, traj.times[i]);
    out << ',';
    write_full(out, traj.mean_bar[i]);
    out << ',';
    write_full(out, traj.deviation_norm[i]);
    if (table) {
      bool here = next_field < traj.field_steps.size() &&
                  traj.field_steps[next_field] == i;
      for (std::size_t k = 0; k < table->labels.size(); ++k) {
        out << ',';
        if (here && !std::isnan(table->inner_products[next_field][k]))
          write_full(out, table->inner_products[next_field][k]);
      }
      if (here) ++next_field;
    }
    out << '\n';
  }
}

void write_snapshot_csv(std::ostream& out, const GridField& field, std::int64_t n) {
  if (field.size() != n * n) throw DimensionError("write_snapshot_csv: bad field");
  for (std::int64_t v1 = 0; v1 < n; ++v1) {
    for (std::int64_t v2 = 0; v2 < n; ++v2) {
      if (v2) out << ',';
      write_full(out, field[v1 * n + v2]);
    }
    out << '\n';
  }
}

void write_snapshot_pgm(std::ostream& out, const GridField& field, std::int64_t n) {
  if (field.size() != n * n) throw DimensionError("write_snapshot_pgm: bad field");
  const double lo = field.minCoeff();
  const double hi = field.maxCoeff();
  const double scale = hi > lo ? 255.0 / (hi - lo) : 0.0;
  out << "P5\n" << n << ' ' << n << "\n255\n";
  for (std::int64_t v = 0; v < n * n; ++v) {
    const auto byte = static_cast<unsigned char>(
        std::lround((field[v] - lo) * scale));
    out.put(static_cast<char>(byte));
  }
}

nlohmann::json snapshot_sidecar(const GridField& field, std::int64_t n, double t) {
  return nlohmann::json{{"t", t},
                        {"N", n},
                        {"min", field.minCoeff()},
                        {"max", field.maxCoeff()}};
}

}  // namespace graphexon
