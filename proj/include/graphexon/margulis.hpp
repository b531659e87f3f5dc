#pragma once

/*
 * margulis.hpp — Gabber-Galil-Margulis expander graphs on the discrete torus.
 *
 * The graph G_N is the 8-regular Schreier graph on (Z/NZ)^2 generated by the
 * affine bijections
 *
 *   sigma_1(v) = T1 v,  sigma_2(v) = T1 v + e1,
 *   sigma_3(v) = T2 v,  sigma_4(v) = T2 v + e2,
 *   sigma_5..8 = the inverses of sigma_1..4,
 *
 * all mod N, with T1 = [[1,2],[0,1]] and T2 = [[1,0],[2,1]].  The generator
 * list is closed under inversion, so the normalized adjacency operator
 *
 *   [O_N f](v) = (1/8) sum_k f(sigma_k(v))
 *
 * is symmetric and row-stochastic.  Vertices are stored flat in row-major
 * order v1*N + v2; adjacency is held as eight permutation tables, so one
 * operator application is eight gathers.
 */

#include <array>
#include <cstdint>
#include <ostream>
#include <vector>

#include "graphexon/common.hpp"

namespace graphexon {

/// One affine bijection of (Z/NZ)^2: v -> matrix*v + shift (mod N).
/// The matrix is an element of SL(2,Z) held exactly.
struct AffineGenerator {
  std::array<std::array<std::int64_t, 2>, 2> matrix{};
  std::array<std::int64_t, 2> shift{};

  std::int64_t det() const {
    return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0];
  }
};

/// The eight generators s1..s8 in order: (T1,0), (T1,e1), (T2,0), (T2,e2),
/// then their inverses. Pairs (1,5), (2,6), (3,7), (4,8) compose to the
/// identity on every (Z/NZ)^2.
std::array<AffineGenerator, 8> default_generators();

/// (matrix*v + shift) mod N with canonical representatives in [0,N).
Vertex apply_generator(const AffineGenerator& g, Vertex v, std::int64_t N);

/// v -> v/N on the torus.
TorusPoint embed(Vertex v, std::int64_t N);

/// x -> the index of the cell Q_v = [v1/N,(v1+1)/N) x [v2/N,(v2+1)/N)
/// containing x. Coordinates outside [0,1) are wrapped first.
Vertex locate(TorusPoint x, std::int64_t N);

class MargulisGraph {
 public:
  static constexpr int kDegree = 8;

  explicit MargulisGraph(std::int64_t resolution);

  std::int64_t resolution() const { return resolution_; }
  std::int64_t vertex_count() const { return resolution_ * resolution_; }
  const std::array<AffineGenerator, kDegree>& generators() const {
    return generators_;
  }

  /// Flat index of sigma_k(v), k in [0,8), v a flat index.
  std::int64_t image(int k, std::int64_t v) const { return tables_[k][v]; }

  std::int64_t flat_index(Vertex v) const { return v.v1 * resolution_ + v.v2; }
  Vertex vertex_at(std::int64_t flat) const {
    return Vertex{flat / resolution_, flat % resolution_};
  }

  /// [O_N f](v) = (1/8) sum_k f(sigma_k(v)). Throws DimensionError on
  /// length mismatch.
  GridField adjacency_apply(const GridField& f) const;

  /// Dense symmetric matrix of O_N; entries are exact multiples of 1/8.
  /// Intended for resolutions where M_N is small enough to eigensolve.
  Eigen::MatrixXd dense_adjacency() const;

  /// Edge list, one record per (vertex, generator):
  /// columns v1,v2,k,u1,u2 with k the 1-based generator index.
  void write_edge_csv(std::ostream& out) const;

 private:
  std::int64_t resolution_;
  std::array<AffineGenerator, kDegree> generators_;
  std::array<std::vector<std::int32_t>, kDegree> tables_;
};

}  // namespace graphexon
