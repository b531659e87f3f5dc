#pragma once

// Shared helpers for the mfg unit tests and the acceptance suite: the
// reference experiment parameters, random admissible parameter draws, and
// the brute-force grid classifier used as an independent oracle.

#include <cmath>
#include <random>
#include <string>

#include "graphexon/mfg.hpp"

namespace graphexon::testing {

inline MfgParameters reference_params(double c = 0.0, double eta = 2.0) {
  MfgParameters p;
  p.a = -1.0;
  p.b = 1.0;
  p.c = c;
  p.sigma = 0.1;
  p.q = 2.0;
  p.r = 1.0;
  p.gamma = 0.5;
  p.eta = eta;
  return p;
}

struct Draw {
  RiccatiData rd;
  double c;
  double rho;
};

inline Draw random_draw(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MfgParameters p;
  p.a = -3.0 + 5.0 * u(rng);
  p.b = 0.2 + 1.8 * u(rng);
  p.c = -8.0 + 16.0 * u(rng);
  p.q = 3.0 * u(rng);
  p.r = 0.2 + 1.8 * u(rng);
  p.gamma = 0.05 + 1.95 * u(rng);
  p.eta = -2.0 + 4.0 * u(rng);
  return Draw{solve_riccati(p), p.c, 0.3 + 0.65 * u(rng)};
}

/// Brute-force classification from the sign of Acl on a lambda grid.
/// Returns "skip" for draws the grid cannot evaluate (Delta(1) < 0 while
/// existence on [-rho,rho] holds, so the mean mode has no real branch).
inline std::string oracle_classify(const RiccatiData& rd, double c, double rho,
                                   int points = 10000) {
  if (c == 0.0) return "Uncoupled";
  double max_rate = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= points; ++i) {
    const double lam = -rho + 2.0 * rho * i / points;
    if (sare_discriminant(rd, c, lam) < 0.0) return "NoRealSolution";
    max_rate = std::max(max_rate, closed_loop_rate(rd, c, lam));
  }
  if (sare_discriminant(rd, c, 1.0) < 0.0) return "skip";
  const bool mean_stable = closed_loop_rate(rd, c, 1.0) < 0.0;
  const bool spatial_unstable = max_rate > 0.0;
  if (rd.a_c < 0.0 && mean_stable && spatial_unstable) return "TuringUnstable";
  if (rd.a_c < 0.0 && mean_stable && !spatial_unstable) return "Stable";
  return "MeanUnstable";
}

/// True when c sits within `margin` of any interval endpoint, threshold, or
/// existence boundary, where strict-inequality classification and a finite
/// grid oracle may legitimately disagree.
inline bool near_region_boundary(const RiccatiData& rd, double c, double rho,
                                 double margin) {
  const StabilityAtlas atlas = stability_atlas(rd, rho);
  std::vector<double> bounds{-rd.params.gamma, rd.params.gamma / rho,
                             -rd.params.gamma / rho, 0.0};
  for (double t : {atlas.c_plus, atlas.c_minus, atlas.c_star})
    if (!std::isnan(t)) bounds.push_back(t);
  for (const auto& ivs : {atlas.turing_intervals, atlas.mean_stable_intervals})
    for (const auto& iv : ivs) {
      if (std::isfinite(iv.lo)) bounds.push_back(iv.lo);
      if (std::isfinite(iv.hi)) bounds.push_back(iv.hi);
    }
  for (double bnd : bounds)
    if (std::abs(c - bnd) < margin) return true;
  const double ps = rd.psi(c);
  const double mixed = rd.a_gamma * c + rd.k * ps;
  const double slack =
      c * c * rho * rho + 4.0 * rd.a_gamma * rd.a_gamma - 4.0 * rho * std::abs(mixed);
  if (std::abs(slack) < margin) return true;
  const double vertex = rd.k * ps * (2.0 * rd.a_gamma * c + rd.k * ps);
  if (std::abs(2.0 * mixed / (c * c)) <= rho + margin && std::abs(vertex) < margin)
    return true;
  return false;
}

}  // namespace graphexon::testing
