#include <doctest.h>

#include <random>
#include <sstream>

#include "graphexon/margulis.hpp"

using namespace graphexon;

namespace {

GridField random_field(std::int64_t m, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  GridField f(m);
  for (std::int64_t i = 0; i < m; ++i) f[i] = dist(rng);
  return f;
}

}  // namespace

TEST_CASE("default generators match the affine family") {
  auto gens = default_generators();
  REQUIRE(gens.size() == 8);

  // s1 = (0, T1)
  CHECK(gens[0].matrix == std::array<std::array<std::int64_t, 2>, 2>{{{1, 2}, {0, 1}}});
  CHECK(gens[0].shift == std::array<std::int64_t, 2>{0, 0});

  // s6 = (-T1^-1 e1, T1^-1): matrix [[1,-2],[0,1]], shift (-1,0)
  CHECK(gens[5].matrix == std::array<std::array<std::int64_t, 2>, 2>{{{1, -2}, {0, 1}}});
  CHECK(gens[5].shift == std::array<std::int64_t, 2>{-1, 0});

  for (const auto& g : gens) CHECK(g.det() == 1);

  // generator 5 after generator 1 is the identity
  for (std::int64_t n : {3, 5, 8}) {
    for (std::int64_t v1 = 0; v1 < n; ++v1)
      for (std::int64_t v2 = 0; v2 < n; ++v2) {
        Vertex v{v1, v2};
        CHECK(apply_generator(gens[4], apply_generator(gens[0], v, n), n) == v);
      }
  }
}

TEST_CASE("apply_generator evaluates the affine maps mod N") {
  auto gens = default_generators();
  CHECK(apply_generator(gens[0], Vertex{1, 1}, 5) == Vertex{3, 1});
  CHECK(apply_generator(gens[1], Vertex{0, 0}, 5) == Vertex{1, 0});
  CHECK(apply_generator(gens[4], apply_generator(gens[0], Vertex{2, 3}, 7), 7) ==
        Vertex{2, 3});
  // negative intermediates map to canonical representatives in [0,N)
  CHECK(apply_generator(gens[4], Vertex{0, 3}, 5) == Vertex{4, 3});
}

TEST_CASE("adjacency_apply fixes constants and matches the N=2 enumeration") {
  MargulisGraph g2(2);
  GridField ones = GridField::Ones(4);
  CHECK((g2.adjacency_apply(ones) - ones).cwiseAbs().maxCoeff() == 0.0);

  // indicator of (0,0): output(v) = #{k: sigma_k(v) = (0,0)}/8
  GridField ind = GridField::Zero(4);
  ind[0] = 1.0;
  GridField out = g2.adjacency_apply(ind);
  CHECK(out[0] == doctest::Approx(0.50).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(out[2] == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(out[3] == doctest::Approx(0.00).epsilon(1e-15));

  MargulisGraph g10(10);
  GridField f = random_field(100, 1);
  GridField h = random_field(100, 2);
  CHECK(normalized_inner(g10.adjacency_apply(f), h) ==
        doctest::Approx(normalized_inner(f, g10.adjacency_apply(h))).epsilon(1e-12));

  CHECK_THROWS_AS((void)g10.adjacency_apply(GridField::Zero(7)), DimensionError);
}

TEST_CASE("embed and locate are consistent") {
  CHECK(embed(Vertex{0, 0}, 7).x1 == 0.0);
  CHECK(embed(Vertex{0, 0}, 7).x2 == 0.0);
  auto p = embed(Vertex{20, 10}, 40);
  CHECK(p.x1 == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(p.x2 == doctest::Approx(0.25).epsilon(1e-15));

  CHECK(locate(TorusPoint{0.51, 0.26}, 40) == Vertex{20, 10});
  CHECK(locate(TorusPoint{0.999999, 0.0}, 10) == Vertex{9, 0});

  for (std::int64_t v1 = 0; v1 < 13; ++v1)
    for (std::int64_t v2 = 0; v2 < 13; ++v2)
      CHECK(locate(embed(Vertex{v1, v2}, 13), 13) == Vertex{v1, v2});

  // embed(v) lies in the half-open cell Q_v
  for (std::int64_t v1 = 0; v1 < 9; ++v1) {
    auto x = embed(Vertex{v1, 0}, 9);
    CHECK(x.x1 >= static_cast<double>(v1) / 9);
    CHECK(x.x1 < static_cast<double>(v1 + 1) / 9);
  }
}

TEST_CASE("generators are permutations closed under inversion") {
  for (std::int64_t n = 2; n <= 50; ++n) {
    MargulisGraph g(n);
    const std::int64_t m = g.vertex_count();
    bool bijective = true;
    for (int k = 0; k < 8; ++k) {
      std::vector<bool> hit(m, false);
      for (std::int64_t v = 0; v < m; ++v) hit[g.image(k, v)] = true;
      for (std::int64_t v = 0; v < m; ++v) bijective = bijective && hit[v];
    }
    CHECK(bijective);
    // pairs (1,5), (2,6), (3,7), (4,8) compose to the identity
    bool identity = true;
    for (int k = 0; k < 4; ++k)
      for (std::int64_t v = 0; v < m; ++v)
        identity = identity && g.image(k + 4, g.image(k, v)) == v;
    CHECK(identity);
  }
}

TEST_CASE("dense adjacency is exactly symmetric with rational entries") {
  for (std::int64_t n : {2, 5, 8}) {
    MargulisGraph g(n);
    Eigen::MatrixXd a = g.dense_adjacency();
    CHECK((a - a.transpose()).cwiseAbs().maxCoeff() == 0.0);
    bool sums_ok = true, rational = true;
    for (std::int64_t v = 0; v < g.vertex_count(); ++v) {
      sums_ok = sums_ok && a.row(v).sum() == 1.0 && a.col(v).sum() == 1.0;
      for (std::int64_t u = 0; u < g.vertex_count(); ++u)
        rational = rational && a(v, u) == std::round(a(v, u) * 8.0) / 8.0;
    }
    CHECK(sums_ok);
    CHECK(rational);
  }
}

TEST_CASE("mean_zero projection has vanishing mean") {
  GridField f = random_field(400, 11);
  f.array() += 3.7;
  CHECK(std::abs(mean_zero(f).mean()) < 1e-12);
}

TEST_CASE("edge CSV has K*M records and is deterministic") {
  MargulisGraph g(2);
  std::ostringstream first, second;
  g.write_edge_csv(first);
  g.write_edge_csv(second);
  CHECK(first.str() == second.str());

  std::istringstream in(first.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "v1,v2,k,u1,u2");
  int records = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++records;
  CHECK(records == 32);  // 8 per vertex, 4 vertices
}
