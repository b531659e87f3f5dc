#pragma once

/*
 * mfg.hpp — closed-form solution of the networked linear-quadratic mean
 * field game, one scalar Riccati problem per spectral mode.
 *
 * Baseline Riccati equation:  2*Pi*(a - gamma/2) - k*Pi^2 + q = 0,
 * k = b^2/r, with the stabilizing root making a_gamma = a - k*Pi - gamma/2
 * negative. The per-mode equation at spectral point lambda,
 *
 *   -k p^2 + (2 a_c - gamma + lambda c) p + lambda psi = 0,
 *   psi = c*Pi - q*eta,
 *
 * has discriminant Delta(lambda) = c^2 lambda^2 + 4(a_gamma c + k psi) lambda
 * + 4 a_gamma^2; the stabilizing branch is p = (2 a_gamma + lambda c +
 * sqrt(Delta))/(2k) and the closed-loop rate of the mode is
 *
 *   Acl(lambda) = (gamma + lambda c - sqrt(Delta(lambda))) / 2
 *               = a_c + lambda c - k p(lambda).
 *
 * On {gamma + lambda c >= 0} the sign of Acl agrees with the affine function
 * L(lambda) = ((gamma - a) c + k q eta) lambda - Theta, Theta = a_c(a_c -
 * gamma), which yields exact interval formulas for the coupling values c
 * where the deviation field diverges (spatial instability over
 * lambda in [-rho, rho]) and where the mean mode at lambda = 1 stays stable.
 */

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <json.hpp>

#include "graphexon/common.hpp"

namespace graphexon {

struct MfgParameters {
  double a = 0.0;      // drift
  double b = 1.0;      // control gain
  double c = 0.0;      // network coupling
  double sigma = 0.0;  // noise amplitude, >= 0
  double q = 0.0;      // state weight, >= 0
  double r = 1.0;      // control weight, > 0
  double gamma = 1.0;  // discount rate, > 0
  double eta = 0.0;    // target coupling weight

  void validate() const;
};

struct RiccatiData {
  MfgParameters params;
  double k = 0.0;        // b^2/r
  double pi = 0.0;       // stabilizing Riccati root
  double a_c = 0.0;      // a - k*Pi
  double a_gamma = 0.0;  // a_c - gamma/2
  double theta = 0.0;    // a_c*(a_c - gamma)

  double psi(double c) const { return c * pi - params.q * params.eta; }
  /// Residual of the baseline Riccati equation at the stored root.
  double riccati_residual() const {
    return 2.0 * pi * (params.a - params.gamma / 2.0) - k * pi * pi + params.q;
  }
};

/// Stabilizing root of the baseline Riccati equation. For k = 0 the equation
/// is linear and requires gamma > 2a; otherwise throws NoRealSolutionError.
RiccatiData solve_riccati(const MfgParameters& p);

/// Delta(lambda) = c^2 lambda^2 + 4(a_gamma c + k psi) lambda + 4 a_gamma^2.
double sare_discriminant(const RiccatiData& rd, double c, double lambda);

struct ExistenceReport {
  bool ok = false;
  int failed_condition = 0;       // 0 = none, 1 = boundary, 2 = vertex
  double lambda_at_failure = 0.0;
  double delta_at_failure = 0.0;
};

/// Real solvability of the per-mode equation for every lambda in [-rho, rho]:
/// (1) c^2 rho^2 + 4 a_gamma^2 >= 4 rho |a_gamma c + k psi| and
/// (2) at the parabola vertex lambda* = -2(a_gamma c + k psi)/c^2, if
///     |lambda*| <= rho then k psi (2 a_gamma c + k psi) <= 0.
/// Throws std::domain_error for c = 0.
ExistenceReport existence_check(const RiccatiData& rd, double c, double rho);

/// Stabilizing branch p(lambda) = (2 a_gamma + lambda c + sqrt(Delta))/(2k);
/// for k = 0 the linear-equation root -lambda psi / (2 a_gamma + lambda c).
/// Throws NoRealSolutionError when Delta(lambda) < 0.
double sare_solution(const RiccatiData& rd, double c, double lambda);

/// Acl(lambda) = (gamma + lambda c - sqrt(Delta(lambda)))/2; for k = 0 the
/// mode generator is a_c + lambda c directly.
/// Throws NoRealSolutionError when Delta(lambda) < 0.
double closed_loop_rate(const RiccatiData& rd, double c, double lambda);

/// L(lambda) = ((gamma - a) c + k q eta) lambda - Theta; same sign as
/// Acl(lambda) wherever gamma + lambda c >= 0.
double sign_function(const RiccatiData& rd, double c, double lambda);

struct StabilityReport {
  bool stable = false;
  bool a_c_negative = false;
  /// Some extreme point sits on the region boundary (|L| < 1e-9); the
  /// verdict still follows the strict rule.
  bool marginal = false;
  /// The checked extreme points (lambda_e, L(lambda_e)).
  std::vector<std::pair<double, double>> extreme_points;
};

/// Global asymptotic stability of the mean-field system: a_c < 0 and
/// L(lambda_e) < 0 at every extreme point of {lambda in [-rho,rho] or 1 :
/// gamma + lambda c >= 0}. For c = 0 this reduces to a_c < 0.
StabilityReport stability_check(const RiccatiData& rd, double c, double rho);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return lo < x && x < hi; }
};

inline bool in_any(const std::vector<Interval>& ivs, double x) {
  for (const auto& iv : ivs)
    if (iv.contains(x)) return true;
  return false;
}

enum class CaseTag { GammaGreater, GammaLess, GammaEqual };

struct StabilityAtlas {
  double rho = 0.0;
  double theta = 0.0;
  // Thresholds; NaN when gamma == a (the case formulas do not use them).
  double c_plus = std::numeric_limits<double>::quiet_NaN();
  double c_minus = std::numeric_limits<double>::quiet_NaN();
  double c_star = std::numeric_limits<double>::quiet_NaN();
  std::vector<Interval> turing_intervals;       // I0: spatial instability
  std::vector<Interval> mean_stable_intervals;  // S1: mean stability
  CaseTag case_tag = CaseTag::GammaGreater;

  nlohmann::json to_json() const;
};

/// The open set I0 = {c : max(Acl(rho), Acl(-rho)) > 0} by the exact case
/// formulas; also fills rho, theta, c_plus/c_minus and the case tag.
StabilityAtlas turing_region(const RiccatiData& rd, double rho);

/// The open set S1 = {c : Acl(1) < 0}; fills theta, c_star and the case tag.
StabilityAtlas mean_stability_region(const RiccatiData& rd);

/// Both regions plus all thresholds in one atlas.
StabilityAtlas stability_atlas(const RiccatiData& rd, double rho);

enum class CouplingLabel {
  Stable,
  TuringUnstable,
  MeanUnstable,
  NoRealSolution,
  Uncoupled,
};

const char* to_string(CouplingLabel label);

/// Uncoupled if c = 0; NoRealSolution if the existence conditions fail;
/// TuringUnstable if a_c < 0 and c lies in S1 and I0\{0}; Stable if the
/// stability check passes; MeanUnstable otherwise. Interval membership is
/// strict (open intervals, zero tolerance).
CouplingLabel classify_coupling(const RiccatiData& rd, double c, double rho);

}  // namespace graphexon
