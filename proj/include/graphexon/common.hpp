#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace graphexon {

/// Real-valued function values on the N x N vertex grid, flat row-major
/// index v1*N + v2.
using GridField = Eigen::VectorXd;

/// A point on the flat torus, coordinates in [0,1).
struct TorusPoint {
  double x1 = 0.0;
  double x2 = 0.0;
};

/// A vertex of the discrete torus (Z/NZ)^2, exact integer coordinates.
struct Vertex {
  std::int64_t v1 = 0;
  std::int64_t v2 = 0;
  friend bool operator==(const Vertex&, const Vertex&) = default;
};

struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct SizeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CertificationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConvergenceError : std::runtime_error {
  ConvergenceError(const std::string& what, double last)
      : std::runtime_error(what), last_estimate(last) {}
  double last_estimate;
};

struct NoRealSolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Normalized inner product <f,g> = (1/M) sum_v f(v) g(v).
inline double normalized_inner(const GridField& f, const GridField& g) {
  if (f.size() != g.size())
    throw DimensionError("normalized_inner: field lengths differ");
  return f.dot(g) / static_cast<double>(f.size());
}

/// l2 norm under the normalized inner product.
inline double field_norm(const GridField& f) {
  return std::sqrt(f.squaredNorm() / static_cast<double>(f.size()));
}

/// Projection onto the zero-mean subspace.
inline GridField mean_zero(const GridField& f) {
  return f.array() - f.mean();
}

/// Compensated (Kahan) accumulator; keeps quadrature sums stable to ~1e-16
/// independent of accumulation order.
class KahanSum {
 public:
  void add(double x) {
    double y = x - comp_;
    double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

/// SplitMix64 finalizer; full-avalanche 64-bit mix.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based standard normal keyed by (seed, agent, step): identical
/// values regardless of evaluation order or thread count.
double counter_normal(std::uint64_t seed, std::uint64_t agent, std::uint64_t step);

}  // namespace graphexon
