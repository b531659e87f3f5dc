#pragma once

/*
 * simulate.hpp — closed-loop mean-field dynamics on a finite Margulis graph
 * and the corresponding N^2-agent stochastic system.
 *
 * The mean field is evolved exactly: decompose O_N, then each modal
 * coefficient follows m_i(t) = exp(Acl(lambda_i) t) m_i(0) with the
 * closed-loop rate of mfg.hpp, so stability classification carries no time
 * stepping error. The adjoint field S_t = sum_i p(lambda_i) m_i(t) phi_i is
 * available for the feedback law u = -r^-1 b (Pi x + S_t(alpha)), under
 * which each agent integrates
 *
 *   dx = (a_c x - k S_t(alpha) + c [O_N m_t](alpha)) dt + sigma dW^alpha
 *
 * by Euler-Maruyama with per-agent counter-based noise streams.
 */

#include <cstdint>
#include <string>
#include <vector>

#include "graphexon/common.hpp"
#include "graphexon/margulis.hpp"
#include "graphexon/mfg.hpp"

namespace graphexon {

enum class SimMode { MeanFieldOnly, FullAgents };

struct InitialCondition {
  int wave1 = 1;           // sine wave numbers along each axis
  int wave2 = 1;
  double amplitude = 1.0;
  double noise_std = 0.1;  // i.i.d. Gaussian per vertex
};

struct SimulationConfig {
  std::int64_t resolution = 40;
  MfgParameters params;
  double t_end = 3.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  InitialCondition init;
  SimMode mode = SimMode::MeanFieldOnly;
  /// Store full fields every this many steps (scalars are kept every step).
  int field_stride = 1;

  /// dt > 0, t_end >= dt, and the guard dt <= 1e-2 * max(1, 1/|a_c + |c||).
  void validate(double a_c, double c) const;
};

/// m0(alpha) = amplitude * sin(2 pi w1 a1) sin(2 pi w2 a2) + noise.
GridField initial_field(const MargulisGraph& g, const InitialCondition& init,
                        std::uint64_t seed);

/// Eigendecomposition of O_N with eigenvectors orthonormal under the
/// normalized inner product. Same dense cap as dense_spectrum.
struct ModalDecomposition {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd modes;        // column i is the eigenfield of eigenvalues[i]
  Eigen::Index constant_mode = 0;  // index of the eigenvalue nearest 1

  Eigen::VectorXd coefficients(const GridField& f) const;
  GridField reconstruct(const Eigen::VectorXd& coeffs) const;
};

ModalDecomposition decompose(const MargulisGraph& g);

struct Trajectory {
  std::vector<double> times;            // every step
  std::vector<double> mean_bar;         // spatial average per step
  std::vector<double> deviation_norm;   // ||m_t - mean||_l2 per step
  std::vector<std::size_t> field_steps; // indices of steps with stored fields
  std::vector<GridField> fields;        // m_t (or agent states x_t)

  double field_time(std::size_t j) const { return times[field_steps[j]]; }
  /// Index of the stored field nearest to t.
  std::size_t field_index_at(double t) const;
};

/// Exact modal evolution of the mean field on the given time grid. Throws
/// NoRealSolutionError naming the first mode with negative discriminant.
Trajectory evolve_mean_field(const ModalDecomposition& md, const RiccatiData& rd,
                             double c, const GridField& m0,
                             const std::vector<double>& t_grid,
                             int field_stride = 1);

/// Adjoint field S_t = sum_i p(lambda_i) m_i(t) phi_i.
GridField adjoint_field(const ModalDecomposition& md, const RiccatiData& rd,
                        double c, const GridField& m0, double t);

/// Uniform grid {0, dt, ..., t_end} (t_end included, snapped to a multiple).
std::vector<double> uniform_time_grid(double t_end, double dt);

struct AgentSimResult {
  Trajectory trajectory;  // fields hold agent-state snapshots
  GridField final_states;
};

/// Euler-Maruyama for all N^2 agents under the decentralized feedback, the
/// mean field supplied by the exact modal solution on the same graph (pass
/// a decomposition to reuse one, otherwise it is computed here).
/// Noise stream of agent alpha at step n is counter_normal(seed, alpha, n);
/// trajectories are bit-identical for identical (seed, config).
AgentSimResult simulate_agents(const MargulisGraph& g, const RiccatiData& rd,
                               double c, const SimulationConfig& config,
                               const ModalDecomposition* md = nullptr);

/// Per stored step: ||e_t||, mean, and <e_t/||e_t||, phi> per test field;
/// inner products are NaN (reported missing) where ||e_t|| <= 1e-14.
struct DeviationTable {
  std::vector<std::string> labels;
  std::vector<double> times;
  std::vector<double> deviation_norm;
  std::vector<double> mean_bar;
  std::vector<std::vector<double>> inner_products;  // [row][test field]
};

DeviationTable deviation_diagnostics(const Trajectory& traj,
                                     const std::vector<GridField>& test_fields,
                                     const std::vector<std::string>& labels);

/// Sampled low-order Fourier field, e.g. sin(2 pi w1 a1) * sin(2 pi w2 a2);
/// a zero wave number makes that factor constant 1.
GridField fourier_test_field(std::int64_t n, int wave1, int wave2, bool cosine1 = false,
                             bool cosine2 = false);

/// Trajectory CSV: t,mean_bar,deviation_norm[,ip_<k>...]; the inner-product
/// columns are filled on rows with stored fields and empty elsewhere
/// (missing values stay missing, they are not written as zero).
void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                          const DeviationTable* table = nullptr);

/// Snapshot as an N x N CSV matrix, row v1, column v2.
void write_snapshot_csv(std::ostream& out, const GridField& field, std::int64_t n);

/// Snapshot as binary 8-bit PGM, values affinely mapped to [0,255]; the
/// sidecar JSON records the min/max used.
void write_snapshot_pgm(std::ostream& out, const GridField& field, std::int64_t n);
nlohmann::json snapshot_sidecar(const GridField& field, std::int64_t n, double t);

}  // namespace graphexon
