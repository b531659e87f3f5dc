#pragma once

/*
 * spectral.hpp — spectra of O_N and of the limit operator's Fourier dual.
 *
 * The finite graphs are certified two-sided expanders: on the zero-mean
 * subspace, ||O_N|| = max{lambda_2, |lambda_min|} <= 5*sqrt(2)/8 for every N.
 *
 * The limit operator acts on the Fourier side as the transition operator of
 * the simple random walk on the orbit graphs of Z^2 \ {0} under the
 * transposed maps {T1^T, T2^T, (T1^T)^-1, (T2^T)^-1}.  Truncating an orbit to
 * a sup-norm ball with Dirichlet boundary (outgoing edges dropped) gives
 * certified lower bounds on the walk norm that increase toward the 4-regular
 * tree value sqrt(3)/2.
 */

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphexon/common.hpp"
#include "graphexon/margulis.hpp"

namespace graphexon {

/// ||O_N|| bound on the zero-mean subspace for the Margulis family.
inline constexpr double kMargulisBound = 0.883883476483184405501;  // 5*sqrt(2)/8

/// Kesten norm of the simple random walk on the 4-regular tree.
inline constexpr double kTreeRadius = 0.866025403784438646763;  // sqrt(3)/2

/// Dense eigensolve cap: M_N <= 10^4 (N <= 100).
inline constexpr std::int64_t kDenseVertexCap = 10000;

struct SpectralReport {
  std::int64_t resolution = 0;
  Eigen::VectorXd eigenvalues;  // ascending
  double lambda2 = 0.0;         // second largest (one copy of the top removed)
  double lambda_min = 0.0;
  double zero_mean_norm = 0.0;  // max(lambda2, |lambda_min|)
  double gap = 0.0;             // 1 - lambda2
  int top_multiplicity = 1;     // eigenvalues within 1e-9 of the largest

  nlohmann::json to_json(int histogram_bins = 64) const;
};

/// Full symmetric eigendecomposition of O_N. Throws SizeError when
/// M_N > kDenseVertexCap (use iterative_norm instead) and
/// CertificationError if the Margulis bound is violated.
SpectralReport dense_spectrum(const MargulisGraph& g);

/// Power iteration on O_N^2 restricted to the zero-mean subspace; returns
/// an estimate of zero_mean_norm. The start field (internal pseudo-random
/// by default) is deflated to mean zero before iterating; a start that
/// deflates to nothing falls back to the internal one. Deterministic.
/// Throws ConvergenceError (carrying the last iterate) after max_iter.
double iterative_norm(const MargulisGraph& g, double tol = 1e-10,
                      int max_iter = 100000, const GridField* start = nullptr);

/// Generator-displacement energy ratio
///   sum_k ||f o sigma_k - f||^2 / ||f||^2
/// for mean-zero nonzero f; equals 2K(1-lambda) on an eigenvector.
/// Throws std::domain_error on a zero or non-mean-zero field.
double kazhdan_ratio(const MargulisGraph& g, const GridField& f);

/// Orbit of a dual lattice point under the transposed maps, truncated to the
/// sup-norm ball of the given radius. Edges leaving the ball are counted as
/// boundary stubs.
struct OrbitGraph {
  std::array<std::int64_t, 2> seed{};
  std::int64_t radius = 0;
  std::vector<std::array<std::int64_t, 2>> vertices;
  std::vector<std::pair<std::int32_t, std::int32_t>> edges;  // retained, directed
  std::int64_t boundary_stubs = 0;
};

/// Breadth-first closure of m0 under the four transposed maps within
/// ||m||_inf <= radius. Requires m0 != 0 and radius >= ||m0||_inf.
OrbitGraph build_orbit_graph(std::array<std::int64_t, 2> m0, std::int64_t radius);

/// Norm estimate of the Dirichlet-truncated transition operator (rows divided
/// by 4, stubs dropped) by power iteration on P^2. Increases with the
/// truncation radius toward kTreeRadius.
double orbit_spectral_radius(const OrbitGraph& og, double tol = 1e-10,
                             int max_iter = 100000);

}  // namespace graphexon
