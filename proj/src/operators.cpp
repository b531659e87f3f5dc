#include "graphexon/operators.hpp"

#include <cmath>
#include <memory>
#include <utility>

namespace graphexon {

LimitGenerators limit_generators() {
  LimitGenerators lg;
  lg.maps = {{
      {{{1, 2}, {0, 1}}},   // T1
      {{{1, -2}, {0, 1}}},  // T1^-1
      {{{1, 0}, {2, 1}}},   // T2
      {{{1, 0}, {-2, 1}}},  // T2^-1
  }};
  return lg;
}

TorusPoint apply_limit_map(const std::array<std::array<std::int64_t, 2>, 2>& t,
                           TorusPoint x) {
  double y1 = t[0][0] * x.x1 + t[0][1] * x.x2;
  double y2 = t[1][0] * x.x1 + t[1][1] * x.x2;
  return TorusPoint{y1 - std::floor(y1), y2 - std::floor(y2)};
}

double QuadratureGrid::integrate(const std::function<double(TorusPoint)>& f) const {
  KahanSum s;
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) s.add(f(node(i, j)));
  return s.value() * weight();
}

double QuadratureGrid::norm_l2(const std::function<double(TorusPoint)>& f) const {
  KahanSum s;
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j) {
      double v = f(node(i, j));
      s.add(v * v);
    }
  return std::sqrt(s.value() * weight());
}

double cell_average(const TorusFunction& f, Vertex v, std::int64_t N, int sub) {
  KahanSum s;
  double n = static_cast<double>(N);
  for (int i = 0; i < sub; ++i) {
    double o1 = (static_cast<double>(v.v1) + (i + 0.5) / sub) / n;
    for (int j = 0; j < sub; ++j) {
      double o2 = (static_cast<double>(v.v2) + (j + 0.5) / sub) / n;
      s.add(f(o1, o2));
    }
  }
  return s.value() / (static_cast<double>(sub) * sub);
}

GridField project(const TorusFunction& f, std::int64_t N, int sub) {
  if (N < 1) throw SizeError("project: N must be >= 1");
  if (sub < 1) throw ConfigError("project: sub must be >= 1");
  GridField out(N * N);
  for (std::int64_t v1 = 0; v1 < N; ++v1)
    for (std::int64_t v2 = 0; v2 < N; ++v2)
      out[v1 * N + v2] = cell_average(f, Vertex{v1, v2}, N, sub);
  return out;
}

TorusFunction extend(GridField phi, std::int64_t N) {
  if (phi.size() != N * N)
    throw DimensionError("extend: field length does not match N^2");
  auto values = std::make_shared<GridField>(std::move(phi));
  return TorusFunction{
      [values, N](double x1, double x2) {
        Vertex v = locate(TorusPoint{x1, x2}, N);
        return (*values)[v.v1 * N + v.v2];
      },
      0.0};
}

double step_operator_apply(const MargulisGraph& g, const TorusFunction& f,
                           TorusPoint x, int sub) {
  const std::int64_t n = g.resolution();
  Vertex v = locate(x, n);
  KahanSum s;
  for (int k = 0; k < MargulisGraph::kDegree; ++k) {
    Vertex u = g.vertex_at(g.image(k, g.flat_index(v)));
    s.add(cell_average(f, u, n, sub));
  }
  return s.value() / MargulisGraph::kDegree;
}

double limit_operator_apply(const TorusFunction& f, TorusPoint x) {
  const LimitGenerators lg = limit_generators();
  KahanSum s;
  for (const auto& t : lg.maps) s.add(f(apply_limit_map(t, x)));
  return s.value() / LimitGenerators::kDistinct;
}

double empirical_measure_integral(const MargulisGraph& g, const EdgeFunction& psi) {
  const std::int64_t m = g.vertex_count();
  const std::int64_t n = g.resolution();
  KahanSum s;
  for (std::int64_t v = 0; v < m; ++v) {
    TorusPoint x = embed(g.vertex_at(v), n);
    for (int k = 0; k < MargulisGraph::kDegree; ++k) {
      TorusPoint y = embed(g.vertex_at(g.image(k, v)), n);
      s.add(psi(x, y));
    }
  }
  return s.value() / (static_cast<double>(MargulisGraph::kDegree) * m);
}

double limit_measure_integral(const EdgeFunction& psi, const QuadratureGrid& quad) {
  const LimitGenerators lg = limit_generators();
  KahanSum s;
  for (int i = 0; i < quad.resolution; ++i)
    for (int j = 0; j < quad.resolution; ++j) {
      TorusPoint x = quad.node(i, j);
      for (const auto& t : lg.maps)
        s.add(LimitGenerators::kMultiplicity * psi(x, apply_limit_map(t, x)));
    }
  return s.value() * quad.weight() / (LimitGenerators::kDistinct * LimitGenerators::kMultiplicity);
}

std::vector<double> weak_convergence_gap(const EdgeFunction& psi,
                                         const std::vector<std::int64_t>& n_list,
                                         const QuadratureGrid& quad) {
  const double limit = limit_measure_integral(psi, quad);
  std::vector<double> gaps;
  gaps.reserve(n_list.size());
  for (std::int64_t n : n_list) {
    MargulisGraph g(n);
    gaps.push_back(std::abs(empirical_measure_integral(g, psi) - limit));
  }
  return gaps;
}

std::vector<double> strong_convergence_gap(const TorusFunction& f,
                                           const std::vector<std::int64_t>& n_list,
                                           const QuadratureGrid& quad, int sub) {
  std::vector<double> gaps;
  gaps.reserve(n_list.size());
  for (std::int64_t n : n_list) {
    MargulisGraph g(n);
    GridField stepped = g.adjacency_apply(project(f, n, sub));
    TorusFunction gn_f = extend(std::move(stepped), n);
    gaps.push_back(quad.norm_l2([&](TorusPoint x) {
      return gn_f(x) - limit_operator_apply(f, x);
    }));
  }
  return gaps;
}

}  // namespace graphexon
