#include "graphexon/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>

namespace graphexon {

nlohmann::json SpectralReport::to_json(int histogram_bins) const {
  std::vector<std::int64_t> counts(histogram_bins, 0);
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i) {
    double t = (eigenvalues[i] + 1.0) / 2.0;  // [-1,1] -> [0,1]
    int b = static_cast<int>(t * histogram_bins);
    b = std::clamp(b, 0, histogram_bins - 1);
    ++counts[b];
  }
  return nlohmann::json{
      {"N", resolution},
      {"lambda2", lambda2},
      {"lambda_min", lambda_min},
      {"zero_mean_norm", zero_mean_norm},
      {"gap", gap},
      {"top_multiplicity", top_multiplicity},
      {"eigenvalue_histogram",
       {{"lo", -1.0}, {"hi", 1.0}, {"bin_count", histogram_bins}, {"counts", counts}}},
  };
}

SpectralReport dense_spectrum(const MargulisGraph& g) {
  const std::int64_t m = g.vertex_count();
  if (m > kDenseVertexCap)
    throw SizeError("dense_spectrum: M_N = " + std::to_string(m) +
                    " exceeds the dense cap " + std::to_string(kDenseVertexCap) +
                    "; use iterative_norm");
  if (m < 2) throw SizeError("dense_spectrum: need at least 2 vertices");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.dense_adjacency(),
                                                        Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success)
    throw ConvergenceError("dense_spectrum: eigensolver failed", 0.0);

  SpectralReport rep;
  rep.resolution = g.resolution();
  rep.eigenvalues = solver.eigenvalues();
  const double top = rep.eigenvalues[m - 1];
  if (std::abs(top - 1.0) > 1e-10)
    throw CertificationError("dense_spectrum: principal eigenvalue " +
                             std::to_string(top) + " is not 1");
  rep.top_multiplicity = 0;
  for (Eigen::Index i = 0; i < m; ++i)
    if (std::abs(rep.eigenvalues[i] - top) <= 1e-9) ++rep.top_multiplicity;
  rep.lambda2 = rep.eigenvalues[m - 2];
  rep.lambda_min = rep.eigenvalues[0];
  rep.zero_mean_norm = std::max(rep.lambda2, std::abs(rep.lambda_min));
  rep.gap = 1.0 - rep.lambda2;
  if (rep.zero_mean_norm > kMargulisBound + 1e-9)
    throw CertificationError("dense_spectrum: zero-mean norm " +
                             std::to_string(rep.zero_mean_norm) +
                             " violates the 5*sqrt(2)/8 bound");
  return rep;
}

double iterative_norm(const MargulisGraph& g, double tol, int max_iter,
                      const GridField* start) {
  if (tol <= 0) throw ConfigError("iterative_norm: tol must be > 0");
  const std::int64_t m = g.vertex_count();
  if (m < 2) throw SizeError("iterative_norm: need at least 2 vertices");

  GridField v;
  if (start) {
    if (start->size() != m) throw DimensionError("iterative_norm: bad start field");
    v = mean_zero(*start);
  }
  if (!start || field_norm(v) < 1e-14) {
    v.resize(m);
    for (std::int64_t i = 0; i < m; ++i)
      v[i] = static_cast<double>(mix64(0x5eedULL + static_cast<std::uint64_t>(i))) *
                 0x1.0p-63 - 1.0;
    v = mean_zero(v);
  }
  v /= field_norm(v);

  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    GridField w = g.adjacency_apply(g.adjacency_apply(v));
    w = mean_zero(w);  // keep roundoff from reintroducing the constant mode
    double rayleigh = normalized_inner(w, v);
    double next = std::sqrt(std::max(rayleigh, 0.0));
    double wn = field_norm(w);
    if (wn < 1e-300) return 0.0;
    v = w / wn;
    if (it > 0 && std::abs(next - est) < tol) return next;
    est = next;
  }
  throw ConvergenceError("iterative_norm: no convergence after " +
                             std::to_string(max_iter) + " iterations",
                         est);
}

double kazhdan_ratio(const MargulisGraph& g, const GridField& f) {
  const std::int64_t m = g.vertex_count();
  if (f.size() != m) throw DimensionError("kazhdan_ratio: field length mismatch");
  const double nf2 = f.squaredNorm() / static_cast<double>(m);
  if (nf2 == 0.0) throw std::domain_error("kazhdan_ratio: zero field");
  if (std::abs(f.mean()) > 1e-10 * std::max(1.0, std::sqrt(nf2)))
    throw std::domain_error("kazhdan_ratio: field is not mean-zero");

  double total = 0.0;
  for (int k = 0; k < MargulisGraph::kDegree; ++k) {
    KahanSum s;
    for (std::int64_t v = 0; v < m; ++v) {
      double d = f[g.image(k, v)] - f[v];
      s.add(d * d);
    }
    total += s.value() / static_cast<double>(m);
  }
  return total / nf2;
}

namespace {

constexpr std::array<std::array<std::array<std::int64_t, 2>, 2>, 4> kDualMaps{{
    {{{1, 0}, {2, 1}}},   // T1^T
    {{{1, 0}, {-2, 1}}},  // (T1^T)^-1
    {{{1, 2}, {0, 1}}},   // T2^T
    {{{1, -2}, {0, 1}}},  // (T2^T)^-1
}};

std::array<std::int64_t, 2> dual_apply(const std::array<std::array<std::int64_t, 2>, 2>& t,
                                       std::array<std::int64_t, 2> m) {
  return {t[0][0] * m[0] + t[0][1] * m[1], t[1][0] * m[0] + t[1][1] * m[1]};
}

}  // namespace

OrbitGraph build_orbit_graph(std::array<std::int64_t, 2> m0, std::int64_t radius) {
  if (m0[0] == 0 && m0[1] == 0)
    throw ConfigError("build_orbit_graph: seed must be nonzero");
  const std::int64_t m0_norm = std::max(std::llabs(m0[0]), std::llabs(m0[1]));
  if (radius < m0_norm)
    throw ConfigError("build_orbit_graph: radius smaller than the seed norm");

  OrbitGraph og;
  og.seed = m0;
  og.radius = radius;
  std::map<std::array<std::int64_t, 2>, std::int32_t> index;
  std::deque<std::array<std::int64_t, 2>> queue;
  index[m0] = 0;
  og.vertices.push_back(m0);
  queue.push_back(m0);
  while (!queue.empty()) {
    auto m = queue.front();
    queue.pop_front();
    const std::int32_t i = index[m];
    for (const auto& t : kDualMaps) {
      auto w = dual_apply(t, m);
      if (std::max(std::llabs(w[0]), std::llabs(w[1])) <= radius) {
        auto [it, inserted] = index.emplace(w, static_cast<std::int32_t>(og.vertices.size()));
        if (inserted) {
          og.vertices.push_back(w);
          queue.push_back(w);
        }
        og.edges.emplace_back(i, it->second);
      } else {
        ++og.boundary_stubs;
      }
    }
  }
  return og;
}

double orbit_spectral_radius(const OrbitGraph& og, double tol, int max_iter) {
  const std::size_t n = og.vertices.size();
  if (n == 0) throw ConfigError("orbit_spectral_radius: empty orbit graph");
  if (tol <= 0) throw ConfigError("orbit_spectral_radius: tol must be > 0");

  auto apply = [&](const Eigen::VectorXd& x) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(n);
    for (const auto& [i, j] : og.edges) y[i] += 0.25 * x[j];
    return y;
  };

  Eigen::VectorXd v(n);
  for (std::size_t i = 0; i < n; ++i)
    v[i] = static_cast<double>(mix64(0x0eb17ULL + i)) * 0x1.0p-63 - 1.0;
  v.normalize();

  double est = 0.0;
  for (int it = 0; it < max_iter; ++it) {
    Eigen::VectorXd w = apply(apply(v));
    double next = std::sqrt(std::max(w.dot(v), 0.0));
    double wn = w.norm();
    if (wn < 1e-300) return 0.0;
    v = w / wn;
    if (it > 0 && std::abs(next - est) < tol) return next;
    est = next;
  }
  throw ConvergenceError("orbit_spectral_radius: no convergence after " +
                             std::to_string(max_iter) + " iterations",
                         est);
}

}  // namespace graphexon
