#pragma once

/*
 * operators.hpp — the discrete-to-continuum operator pipeline.
 *
 * P_N projects an L^2 torus function to cell averages, E_N extends a grid
 * field to a piecewise constant function, and the step operator
 * G_N = E_N o O_N o P_N approximates the limit averaging operator
 *
 *   [G f](x) = (1/4) ( f(T1 x) + f(T1^-1 x) + f(T2 x) + f(T2^-1 x) )  (mod 1).
 *
 * The empirical edge measure of G_N and the limit measure (nu on the first
 * coordinate, point mass at sigma_k(x) on the second) are integrated against
 * continuous test functions; the gap diagnostics quantify weak measure
 * convergence and strong L^2 operator convergence.
 *
 * All integrals use midpoint quadrature on uniform grids with compensated
 * summation.
 */

#include <cmath>
#include <functional>
#include <vector>

#include "graphexon/common.hpp"
#include "graphexon/margulis.hpp"

namespace graphexon {

/// Callable on the torus; arguments are wrapped into [0,1) before the
/// underlying function is evaluated. lipschitz is an optional declared
/// constant (0 = unknown) used only for documentation/diagnostics.
struct TorusFunction {
  std::function<double(double, double)> fn;
  double lipschitz = 0.0;

  double operator()(double x1, double x2) const {
    return fn(x1 - std::floor(x1), x2 - std::floor(x2));
  }
  double operator()(TorusPoint x) const { return (*this)(x.x1, x.x2); }
};

/// Continuous test function on the edge space T^2 x T^2.
using EdgeFunction = std::function<double(TorusPoint, TorusPoint)>;

/// The four distinct limit maps {T1, T1^-1, T2, T2^-1}; each carries
/// multiplicity 2 of the K=8 discrete generators.
struct LimitGenerators {
  static constexpr int kDistinct = 4;
  static constexpr int kMultiplicity = 2;
  std::array<std::array<std::array<std::int64_t, 2>, 2>, kDistinct> maps;
};
LimitGenerators limit_generators();

/// Image of x under one limit map, reduced mod 1.
TorusPoint apply_limit_map(const std::array<std::array<std::int64_t, 2>, 2>& t,
                           TorusPoint x);

/// Midpoint quadrature on M x M uniform cells; weights 1/M^2 sum to 1.
struct QuadratureGrid {
  int resolution = 200;

  TorusPoint node(int i, int j) const {
    double m = static_cast<double>(resolution);
    return TorusPoint{(i + 0.5) / m, (j + 0.5) / m};
  }
  double weight() const {
    double m = static_cast<double>(resolution);
    return 1.0 / (m * m);
  }
  double integrate(const std::function<double(TorusPoint)>& f) const;
  double norm_l2(const std::function<double(TorusPoint)>& f) const;
};

/// [P_N f](v): cell average over Q_v by midpoint quadrature on a sub x sub
/// subgrid. Exact for functions constant on cells.
GridField project(const TorusFunction& f, std::int64_t N, int sub = 4);

/// Average of f over the single cell Q_v (the v-th component of P_N f).
double cell_average(const TorusFunction& f, Vertex v, std::int64_t N, int sub);

/// [E_N phi](x) = phi(locate(x, N)): piecewise constant extension.
TorusFunction extend(GridField phi, std::int64_t N);

/// [G_N f](x) = (1/8) sum_k [P_N f](sigma_k(i_N(x))).
double step_operator_apply(const MargulisGraph& g, const TorusFunction& f,
                           TorusPoint x, int sub = 4);

/// [G f](x): quarter-sum of f over the four limit maps.
double limit_operator_apply(const TorusFunction& f, TorusPoint x);

/// Integral of Psi against the empirical edge measure of G_N:
/// (1/(8 M_N)) sum_v sum_k Psi(iota(v), iota(sigma_k(v))).
double empirical_measure_integral(const MargulisGraph& g, const EdgeFunction& psi);

/// Integral of Psi against the limit measure:
/// (1/8) sum_k integral Psi(x, sigma_inf_k(x)) nu(dx) by quadrature.
double limit_measure_integral(const EdgeFunction& psi, const QuadratureGrid& quad);

/// |empirical - limit| per N. Expected to decrease toward quadrature error
/// for continuous Psi.
std::vector<double> weak_convergence_gap(const EdgeFunction& psi,
                                         const std::vector<std::int64_t>& n_list,
                                         const QuadratureGrid& quad);

/// ||G_N f - G f||_L2 (quadrature norm) per N. For Lipschitz f this is
/// bounded by L_f((1+L_tau) sqrt(2)/N + eps_N) = O(1/N).
std::vector<double> strong_convergence_gap(const TorusFunction& f,
                                           const std::vector<std::int64_t>& n_list,
                                           const QuadratureGrid& quad,
                                           int sub = 4);

}  // namespace graphexon
