#include "graphexon/mfg.hpp"

#include <algorithm>

namespace graphexon {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

nlohmann::json interval_json(const Interval& iv) {
  auto bound = [](double x) -> nlohmann::json {
    if (x == -kInf) return "-inf";
    if (x == kInf) return "inf";
    return x;
  };
  return nlohmann::json::array({bound(iv.lo), bound(iv.hi)});
}

nlohmann::json threshold_json(double x) {
  if (std::isnan(x)) return nullptr;
  return x;
}

}  // namespace

void MfgParameters::validate() const {
  if (r <= 0) throw ConfigError("MfgParameters: r must be > 0");
  if (gamma <= 0) throw ConfigError("MfgParameters: gamma must be > 0");
  if (q < 0) throw ConfigError("MfgParameters: q must be >= 0");
  if (sigma < 0) throw ConfigError("MfgParameters: sigma must be >= 0");
}

RiccatiData solve_riccati(const MfgParameters& p) {
  p.validate();
  RiccatiData rd;
  rd.params = p;
  rd.k = p.b * p.b / p.r;
  const double half = p.a - p.gamma / 2.0;
  if (rd.k > 0.0) {
    rd.pi = (half + std::sqrt(half * half + rd.k * p.q)) / rd.k;
  } else {
    if (p.gamma <= 2.0 * p.a)
      throw NoRealSolutionError(
          "solve_riccati: k = 0 with gamma <= 2a has no stabilizing solution");
    rd.pi = p.q / (p.gamma - 2.0 * p.a);
  }
  rd.a_c = p.a - rd.k * rd.pi;
  rd.a_gamma = rd.a_c - p.gamma / 2.0;
  rd.theta = rd.a_c * (rd.a_c - p.gamma);
  return rd;
}

double sare_discriminant(const RiccatiData& rd, double c, double lambda) {
  const double ps = rd.psi(c);
  return c * c * lambda * lambda + 4.0 * (rd.a_gamma * c + rd.k * ps) * lambda +
         4.0 * rd.a_gamma * rd.a_gamma;
}

ExistenceReport existence_check(const RiccatiData& rd, double c, double rho) {
  if (c == 0.0) throw std::domain_error("existence_check: requires c != 0");
  if (!(rho > 0.0 && rho <= 1.0))
    throw ConfigError("existence_check: rho must lie in (0, 1]");
  const double ps = rd.psi(c);
  const double mixed = rd.a_gamma * c + rd.k * ps;

  ExistenceReport rep;
  if (c * c * rho * rho + 4.0 * rd.a_gamma * rd.a_gamma < 4.0 * rho * std::abs(mixed)) {
    rep.failed_condition = 1;
    rep.lambda_at_failure = mixed > 0 ? -rho : rho;
    rep.delta_at_failure = sare_discriminant(rd, c, rep.lambda_at_failure);
    return rep;
  }
  const double lambda_star = -2.0 * mixed / (c * c);
  if (std::abs(lambda_star) <= rho &&
      rd.k * ps * (2.0 * rd.a_gamma * c + rd.k * ps) > 0.0) {
    rep.failed_condition = 2;
    rep.lambda_at_failure = lambda_star;
    rep.delta_at_failure = sare_discriminant(rd, c, lambda_star);
    return rep;
  }
  rep.ok = true;
  return rep;
}

double sare_solution(const RiccatiData& rd, double c, double lambda) {
  if (rd.k == 0.0) {
    const double denom = 2.0 * rd.a_gamma + lambda * c;
    if (denom == 0.0)
      throw NoRealSolutionError("sare_solution: degenerate linear equation");
    return -lambda * rd.psi(c) / denom;
  }
  const double delta = sare_discriminant(rd, c, lambda);
  if (delta < 0.0)
    throw NoRealSolutionError("sare_solution: negative discriminant at lambda = " +
                              std::to_string(lambda));
  return (2.0 * rd.a_gamma + lambda * c + std::sqrt(delta)) / (2.0 * rd.k);
}

double closed_loop_rate(const RiccatiData& rd, double c, double lambda) {
  if (rd.k == 0.0) return rd.a_c + lambda * c;
  const double delta = sare_discriminant(rd, c, lambda);
  if (delta < 0.0)
    throw NoRealSolutionError("closed_loop_rate: negative discriminant at lambda = " +
                              std::to_string(lambda));
  return 0.5 * (rd.params.gamma + lambda * c - std::sqrt(delta));
}

double sign_function(const RiccatiData& rd, double c, double lambda) {
  const double phi = (rd.params.gamma - rd.params.a) * c +
                     rd.k * rd.params.q * rd.params.eta;
  return phi * lambda - rd.theta;
}

StabilityReport stability_check(const RiccatiData& rd, double c, double rho) {
  StabilityReport rep;
  rep.a_c_negative = rd.a_c < 0.0;
  if (c == 0.0) {  // uncoupled: every mode runs at a_c
    rep.stable = rep.a_c_negative;
    return rep;
  }
  const double gamma = rd.params.gamma;
  std::vector<double> extremes;
  for (double lam : {1.0, -rho, rho})
    if (gamma + lam * c >= 0.0) extremes.push_back(lam);
  const double lam_zero = -gamma / c;  // gamma + lam*c = 0 boundary
  if (std::abs(lam_zero) <= rho) extremes.push_back(lam_zero);

  bool all_negative = true;
  for (double lam : extremes) {
    const double l = sign_function(rd, c, lam);
    rep.extreme_points.emplace_back(lam, l);
    if (l >= 0.0) all_negative = false;
    if (std::abs(l) < 1e-9) rep.marginal = true;
  }
  rep.stable = rep.a_c_negative && all_negative;
  return rep;
}

StabilityAtlas turing_region(const RiccatiData& rd, double rho) {
  if (!(rho > 0.0 && rho < 1.0))
    throw ConfigError("turing_region: rho must lie in (0, 1)");
  const double a = rd.params.a;
  const double gamma = rd.params.gamma;
  const double kqeta = rd.k * rd.params.q * rd.params.eta;

  StabilityAtlas atlas;
  atlas.rho = rho;
  atlas.theta = rd.theta;
  if (gamma > a) {
    atlas.case_tag = CaseTag::GammaGreater;
    atlas.c_plus = (rd.theta / rho - kqeta) / (gamma - a);
    atlas.c_minus = (-rd.theta / rho - kqeta) / (gamma - a);
    atlas.turing_intervals = {
        {-kInf, std::min(gamma / rho, atlas.c_minus)},
        {std::max(-gamma / rho, atlas.c_plus), kInf},
    };
  } else if (gamma < a) {
    atlas.case_tag = CaseTag::GammaLess;
    atlas.c_plus = (rd.theta / rho - kqeta) / (gamma - a);
    atlas.c_minus = (-rd.theta / rho - kqeta) / (gamma - a);
    for (Interval iv : {Interval{-gamma / rho, atlas.c_plus},
                        Interval{atlas.c_minus, gamma / rho}})
      if (iv.lo < iv.hi) atlas.turing_intervals.push_back(iv);
  } else {
    atlas.case_tag = CaseTag::GammaEqual;
    if (rho * rd.k * std::abs(rd.params.q * rd.params.eta) <= rd.theta) {
      atlas.turing_intervals = {};
    } else if (rho * kqeta > rd.theta) {
      atlas.turing_intervals = {{-gamma / rho, kInf}};
    } else {
      atlas.turing_intervals = {{-kInf, gamma / rho}};
    }
  }
  return atlas;
}

StabilityAtlas mean_stability_region(const RiccatiData& rd) {
  const double a = rd.params.a;
  const double gamma = rd.params.gamma;
  const double kqeta = rd.k * rd.params.q * rd.params.eta;

  StabilityAtlas atlas;
  atlas.theta = rd.theta;
  if (gamma > a) {
    atlas.case_tag = CaseTag::GammaGreater;
    atlas.c_star = (rd.theta - kqeta) / (gamma - a);
    atlas.mean_stable_intervals = {{-kInf, std::max(-gamma, atlas.c_star)}};
  } else if (gamma < a) {
    atlas.case_tag = CaseTag::GammaLess;
    atlas.c_star = (rd.theta - kqeta) / (gamma - a);
    atlas.mean_stable_intervals = {{-kInf, -gamma}, {atlas.c_star, kInf}};
  } else {
    atlas.case_tag = CaseTag::GammaEqual;
    if (kqeta < rd.theta)
      atlas.mean_stable_intervals = {{-kInf, kInf}};
    else
      atlas.mean_stable_intervals = {{-kInf, -gamma}};
  }
  return atlas;
}

StabilityAtlas stability_atlas(const RiccatiData& rd, double rho) {
  StabilityAtlas atlas = turing_region(rd, rho);
  StabilityAtlas mean = mean_stability_region(rd);
  atlas.c_star = mean.c_star;
  atlas.mean_stable_intervals = std::move(mean.mean_stable_intervals);
  return atlas;
}

const char* to_string(CouplingLabel label) {
  switch (label) {
    case CouplingLabel::Stable: return "Stable";
    case CouplingLabel::TuringUnstable: return "TuringUnstable";
    case CouplingLabel::MeanUnstable: return "MeanUnstable";
    case CouplingLabel::NoRealSolution: return "NoRealSolution";
    case CouplingLabel::Uncoupled: return "Uncoupled";
  }
  return "?";
}

CouplingLabel classify_coupling(const RiccatiData& rd, double c, double rho) {
  if (c == 0.0) return CouplingLabel::Uncoupled;
  if (!existence_check(rd, c, rho).ok) return CouplingLabel::NoRealSolution;
  const StabilityAtlas atlas = stability_atlas(rd, rho);
  const bool turing = rd.a_c < 0.0 && in_any(atlas.mean_stable_intervals, c) &&
                      in_any(atlas.turing_intervals, c);
  if (turing) return CouplingLabel::TuringUnstable;
  if (stability_check(rd, c, rho).stable) return CouplingLabel::Stable;
  return CouplingLabel::MeanUnstable;
}

nlohmann::json StabilityAtlas::to_json() const {
  nlohmann::json i0 = nlohmann::json::array();
  for (const auto& iv : turing_intervals) i0.push_back(interval_json(iv));
  nlohmann::json s1 = nlohmann::json::array();
  for (const auto& iv : mean_stable_intervals) s1.push_back(interval_json(iv));
  const char* tag = case_tag == CaseTag::GammaGreater ? "gamma>a"
                    : case_tag == CaseTag::GammaLess  ? "gamma<a"
                                                      : "gamma=a";
  return nlohmann::json{
      {"rho", rho},
      {"theta", theta},
      {"c_plus", threshold_json(c_plus)},
      {"c_minus", threshold_json(c_minus)},
      {"c_star", threshold_json(c_star)},
      {"I0", i0},
      {"S1", s1},
      {"case", tag},
  };
}

}  // namespace graphexon
