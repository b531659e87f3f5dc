#include "graphexon/margulis.hpp"

#include <cmath>
#include <string>

namespace graphexon {

namespace {

constexpr std::array<std::array<std::int64_t, 2>, 2> kT1{{{1, 2}, {0, 1}}};
constexpr std::array<std::array<std::int64_t, 2>, 2> kT2{{{1, 0}, {2, 1}}};
constexpr std::array<std::array<std::int64_t, 2>, 2> kT1Inv{{{1, -2}, {0, 1}}};
constexpr std::array<std::array<std::int64_t, 2>, 2> kT2Inv{{{1, 0}, {-2, 1}}};

std::int64_t mod_canonical(std::int64_t x, std::int64_t n) {
  std::int64_t r = x % n;
  return r < 0 ? r + n : r;
}

}  // namespace

std::array<AffineGenerator, 8> default_generators() {
  // shifts of the inverse generators: -T1^{-1} e1 = (-1,0), -T2^{-1} e2 = (0,-1)
  return {{
      {kT1, {0, 0}},
      {kT1, {1, 0}},
      {kT2, {0, 0}},
      {kT2, {0, 1}},
      {kT1Inv, {0, 0}},
      {kT1Inv, {-1, 0}},
      {kT2Inv, {0, 0}},
      {kT2Inv, {0, -1}},
  }};
}

Vertex apply_generator(const AffineGenerator& g, Vertex v, std::int64_t N) {
  std::int64_t w1 = g.matrix[0][0] * v.v1 + g.matrix[0][1] * v.v2 + g.shift[0];
  std::int64_t w2 = g.matrix[1][0] * v.v1 + g.matrix[1][1] * v.v2 + g.shift[1];
  return Vertex{mod_canonical(w1, N), mod_canonical(w2, N)};
}

TorusPoint embed(Vertex v, std::int64_t N) {
  return TorusPoint{static_cast<double>(v.v1) / static_cast<double>(N),
                    static_cast<double>(v.v2) / static_cast<double>(N)};
}

Vertex locate(TorusPoint x, std::int64_t N) {
  double w1 = x.x1 - std::floor(x.x1);
  double w2 = x.x2 - std::floor(x.x2);
  auto idx = [N](double w) {
    auto i = static_cast<std::int64_t>(std::floor(w * static_cast<double>(N)));
    if (i < 0) i = 0;
    if (i >= N) i = N - 1;  // w*N can round up to N when w -> 1
    return i;
  };
  return Vertex{idx(w1), idx(w2)};
}

MargulisGraph::MargulisGraph(std::int64_t resolution)
    : resolution_(resolution), generators_(default_generators()) {
  if (resolution_ < 1)
    throw SizeError("MargulisGraph: resolution must be >= 1");
  const std::int64_t m = vertex_count();
  for (int k = 0; k < kDegree; ++k) {
    tables_[k].resize(m);
    for (std::int64_t v1 = 0; v1 < resolution_; ++v1) {
      for (std::int64_t v2 = 0; v2 < resolution_; ++v2) {
        Vertex w = apply_generator(generators_[k], Vertex{v1, v2}, resolution_);
        tables_[k][v1 * resolution_ + v2] =
            static_cast<std::int32_t>(flat_index(w));
      }
    }
  }
}

GridField MargulisGraph::adjacency_apply(const GridField& f) const {
  const std::int64_t m = vertex_count();
  if (f.size() != m)
    throw DimensionError("adjacency_apply: field length " +
                         std::to_string(f.size()) + " != vertex count " +
                         std::to_string(m));
  GridField out = GridField::Zero(m);
  for (int k = 0; k < kDegree; ++k) {
    const auto& tab = tables_[k];
    for (std::int64_t v = 0; v < m; ++v) out[v] += f[tab[v]];
  }
  out /= static_cast<double>(kDegree);
  return out;
}

Eigen::MatrixXd MargulisGraph::dense_adjacency() const {
  const std::int64_t m = vertex_count();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
  for (int k = 0; k < kDegree; ++k)
    for (std::int64_t v = 0; v < m; ++v) a(v, tables_[k][v]) += 0.125;
  return a;
}

void MargulisGraph::write_edge_csv(std::ostream& out) const {
  out << "v1,v2,k,u1,u2\n";
  for (std::int64_t v = 0; v < vertex_count(); ++v) {
    Vertex src = vertex_at(v);
    for (int k = 0; k < kDegree; ++k) {
      Vertex dst = vertex_at(tables_[k][v]);
      out << src.v1 << ',' << src.v2 << ',' << (k + 1) << ',' << dst.v1 << ','
          << dst.v2 << '\n';
    }
  }
}

}  // namespace graphexon
