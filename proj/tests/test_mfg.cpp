#include <doctest.h>

#include <cmath>
#include <random>

#include "graphexon/mfg.hpp"
#include "support.hpp"

using namespace graphexon;
using testing::Draw;
using testing::near_region_boundary;
using testing::oracle_classify;
using testing::random_draw;
using testing::reference_params;

namespace {

const double kRho = std::sqrt(3.0) / 2.0;

}  // namespace

TEST_CASE("solve_riccati: reference parameters and degenerate branches") {
  RiccatiData rd = solve_riccati(reference_params());
  CHECK(rd.k == 1.0);
  CHECK(rd.pi == doctest::Approx(0.637459).epsilon(1e-6));
  CHECK(rd.a_c == doctest::Approx(-1.637459).epsilon(1e-6));
  CHECK(std::abs(rd.riccati_residual()) < 1e-12);
  CHECK(rd.a_gamma < 0.0);
  // Theta = (1 + Pi)(1.5 + Pi) with Pi^2 = 2 - 2.5 Pi collapses to 3.5
  CHECK(rd.theta == doctest::Approx(3.5).epsilon(1e-12));
  CHECK(rd.theta ==
        doctest::Approx(rd.a_c * (rd.a_c - rd.params.gamma)).epsilon(1e-14));

  MfgParameters zero_q = reference_params();
  zero_q.q = 0.0;
  RiccatiData rd0 = solve_riccati(zero_q);
  CHECK(rd0.pi == 0.0);
  CHECK(rd0.a_c == zero_q.a);

  MfgParameters no_control = reference_params();
  no_control.b = 0.0;  // gamma = 0.5 > 2a = -2: linear branch
  RiccatiData rdl = solve_riccati(no_control);
  CHECK(rdl.pi == doctest::Approx(2.0 / 2.5).epsilon(1e-14));
  CHECK(std::abs(rdl.riccati_residual()) < 1e-12);

  MfgParameters bad = no_control;
  bad.a = 1.0;  // gamma <= 2a
  CHECK_THROWS_AS((void)solve_riccati(bad), NoRealSolutionError);

  MfgParameters invalid = reference_params();
  invalid.r = 0.0;
  CHECK_THROWS_AS((void)solve_riccati(invalid), ConfigError);
}

TEST_CASE("riccati residual and monotonicity over random draws") {
  std::mt19937 rng(17);
  double prev_pi = -1.0;
  for (int i = 0; i < 500; ++i) {
    Draw d = random_draw(rng);
    CHECK(std::abs(d.rd.riccati_residual()) < 1e-12);
    CHECK(d.rd.pi >= 0.0);
    if (d.rd.params.q > 0.0) CHECK(d.rd.pi > 0.0);
    if (d.rd.params.q == 0.0 && d.rd.params.a <= d.rd.params.gamma / 2)
      CHECK(d.rd.pi == 0.0);
    if (d.rd.a_c < 0.0) {
      CHECK(d.rd.theta > 0.0);
      CHECK(d.rd.a_gamma < 0.0);
    }
    (void)prev_pi;
  }
  // Pi is nondecreasing in q at fixed other parameters
  MfgParameters p = reference_params();
  prev_pi = -1.0;
  for (double q : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    p.q = q;
    double pi = solve_riccati(p).pi;
    CHECK(pi >= prev_pi);
    prev_pi = pi;
  }
}

TEST_CASE("sare_discriminant: constant term, degenerate parabola, two routes") {
  RiccatiData rd = solve_riccati(reference_params());
  CHECK(sare_discriminant(rd, 1.3, 0.0) ==
        doctest::Approx(4.0 * rd.a_gamma * rd.a_gamma).epsilon(1e-14));

  // c = 0: psi = -q eta and the parabola degenerates to a line in lambda
  for (double lam : {-0.5, 0.0, 0.7}) {
    const double psi0 = -rd.params.q * rd.params.eta;
    CHECK(sare_discriminant(rd, 0.0, lam) ==
          doctest::Approx(4.0 * rd.k * psi0 * lam + 4.0 * rd.a_gamma * rd.a_gamma)
              .epsilon(1e-13));
  }

  // nested evaluation against the expanded polynomial
  const double c = 1.0, lam = 0.5;
  const double ps = rd.psi(c);
  const double expanded = c * c * lam * lam + 4.0 * rd.a_gamma * c * lam +
                          4.0 * rd.k * ps * lam + 4.0 * rd.a_gamma * rd.a_gamma;
  CHECK(sare_discriminant(rd, c, lam) == doctest::Approx(expanded).epsilon(1e-12));
}

TEST_CASE("existence_check: perfect square, reference region, grid oracle") {
  RiccatiData rd = solve_riccati(reference_params());

  // psi = 0 at eta = c Pi / q: Delta = (c lambda + 2 a_gamma)^2 >= 0
  const double c0 = 1.7;
  MfgParameters tuned = reference_params(c0, c0 * rd.pi / 2.0);
  RiccatiData rdt = solve_riccati(tuned);
  CHECK(rdt.psi(c0) == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(existence_check(rdt, c0, kRho).ok);
  for (double lam : {-0.8, -0.1, 0.5})
    CHECK(sare_discriminant(rdt, c0, lam) >= -1e-12);

  CHECK(existence_check(rd, -1.0, kRho).ok);  // stable-region coupling
  CHECK_THROWS_AS((void)existence_check(rd, 0.0, kRho), std::domain_error);

  std::mt19937 rng(23);
  for (int i = 0; i < 300; ++i) {
    Draw d = random_draw(rng);
    if (d.c == 0.0) continue;
    bool grid_ok = true;
    double min_delta = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 10000; ++j) {
      const double lam = -d.rho + 2.0 * d.rho * j / 10000;
      min_delta = std::min(min_delta, sare_discriminant(d.rd, d.c, lam));
    }
    grid_ok = min_delta >= -1e-9;
    const ExistenceReport rep = existence_check(d.rd, d.c, d.rho);
    if (std::abs(min_delta) > 1e-7)  // away from the marginal boundary
      CHECK(rep.ok == grid_ok);
    if (!rep.ok) {
      CHECK(rep.failed_condition >= 1);
      CHECK(rep.delta_at_failure < 0.0);
      CHECK(std::abs(rep.lambda_at_failure) <= d.rho + 1e-12);
    }
  }
}

TEST_CASE("sare_solution: branch values and residuals") {
  RiccatiData rd = solve_riccati(reference_params());
  CHECK(sare_solution(rd, -1.0, 0.0) == 0.0);  // p(0) = 0 for a_gamma < 0

  std::mt19937 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  while (checked < 100) {
    const double c = 6.0 * u(rng);
    const double lam = kRho * u(rng);
    if (c == 0.0 || sare_discriminant(rd, c, lam) < 0.0) continue;
    const double p = sare_solution(rd, c, lam);
    const double residual = -rd.k * p * p +
                            (2.0 * rd.a_c - rd.params.gamma + lam * c) * p +
                            lam * rd.psi(c);
    CHECK(std::abs(residual) < 1e-10);
    ++checked;
  }

  // psi = 0: p(lambda) = max(0, (2 a_gamma + lambda c)/k)
  const double c0 = 1.7;
  RiccatiData rdt = solve_riccati(reference_params(c0, c0 * rd.pi / 2.0));
  for (double lam : {-0.8, 0.0, 0.4, 0.86}) {
    const double expect = std::max(0.0, (2.0 * rdt.a_gamma + lam * c0) / rdt.k);
    CHECK(sare_solution(rdt, c0, lam) == doctest::Approx(expect).epsilon(1e-12));
  }

  // k = 0 falls back to the linear-equation root
  MfgParameters lin = reference_params();
  lin.b = 0.0;
  RiccatiData rdl = solve_riccati(lin);
  const double p_lin = sare_solution(rdl, 2.0, 0.5);
  CHECK(p_lin == doctest::Approx(-0.5 * rdl.psi(2.0) /
                                 (2.0 * rdl.a_gamma + 0.5 * 2.0))
                     .epsilon(1e-13));

  // negative discriminant refuses a real branch
  CHECK(sare_discriminant(rd, 0.1, kRho) < 0.0);
  CHECK_THROWS_AS((void)sare_solution(rd, 0.1, kRho), NoRealSolutionError);
}

TEST_CASE("closed_loop_rate: base value, branch identity, sign function") {
  RiccatiData rd = solve_riccati(reference_params());
  for (double c : {-6.0, -1.0, 1.0})
    CHECK(closed_loop_rate(rd, c, 0.0) == doctest::Approx(rd.a_c).epsilon(1e-12));

  std::mt19937 rng(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int checked = 0;
  while (checked < 200) {
    Draw d = random_draw(rng);
    const double lam = u(rng) * d.rho;
    if (d.rd.k == 0.0 || sare_discriminant(d.rd, d.c, lam) < 0.0) continue;
    const double acl = closed_loop_rate(d.rd, d.c, lam);
    CHECK(acl == doctest::Approx(d.rd.a_c + lam * d.c -
                                 d.rd.k * sare_solution(d.rd, d.c, lam))
                     .epsilon(1e-10));
    // sign equivalence with L on gamma + lambda c >= 0
    if (d.rd.params.gamma + lam * d.c > 1e-9 && std::abs(acl) > 1e-9) {
      const double l = sign_function(d.rd, d.c, lam);
      CHECK(std::signbit(acl) == std::signbit(l));
    }
    ++checked;
  }

  // weak monotonicity: no interior strict extremum unless the degeneracy
  // k psi (2 a_gamma c + k psi) = 0 holds
  for (double c : {-6.0, -1.0, 0.5}) {
    const double ps = rd.psi(c);
    const double degeneracy = rd.k * ps * (2.0 * rd.a_gamma * c + rd.k * ps);
    if (degeneracy == 0.0 || !existence_check(rd, c, kRho).ok) continue;
    double prev = closed_loop_rate(rd, c, -kRho);
    bool increasing = closed_loop_rate(rd, c, kRho) > prev;
    bool monotone = true;
    for (int i = 1; i <= 400; ++i) {
      const double lam = -kRho + 2.0 * kRho * i / 400;
      const double cur = closed_loop_rate(rd, c, lam);
      monotone = monotone && (increasing ? cur >= prev - 1e-12 : cur <= prev + 1e-12);
      prev = cur;
    }
    CHECK(monotone);
  }
}

TEST_CASE("stability_check: uncoupled limit, reference value, extreme points") {
  RiccatiData rd = solve_riccati(reference_params());

  StabilityReport un = stability_check(rd, 0.0, kRho);
  CHECK(un.stable);  // a_c < 0 suffices at c = 0
  CHECK(un.extreme_points.empty());

  StabilityReport rep = stability_check(rd, -1.0, kRho);
  CHECK(rep.stable);
  CHECK(!rep.marginal);
  // L(1) = ((gamma - a) c + k q eta) - Theta = 2.5 - 3.5 = -1 at c = -1
  CHECK(sign_function(rd, -1.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-12));
  for (const auto& [lam, l] : rep.extreme_points) {
    CHECK(l < 0.0);
    CHECK((std::abs(lam) <= kRho + 1e-12 || lam == 1.0));
  }

  // exactly on a bifurcation threshold the report flags the boundary
  // (the verdict itself rides on the sign of roundoff there)
  const double c_plus = turing_region(rd, kRho).c_plus;
  CHECK(stability_check(rd, c_plus, kRho).marginal);

  // grid oracle agreement for the full verdict
  std::mt19937 rng(53);
  int used = 0;
  for (int i = 0; i < 400 && used < 150; ++i) {
    Draw d = random_draw(rng);
    if (d.c == 0.0 || !existence_check(d.rd, d.c, d.rho).ok) continue;
    if (near_region_boundary(d.rd, d.c, d.rho, 1e-5)) continue;
    std::string orc = oracle_classify(d.rd, d.c, d.rho);
    if (orc == "skip") continue;
    CHECK(stability_check(d.rd, d.c, d.rho).stable == (orc == "Stable"));
    ++used;
  }
  CHECK(used > 50);
}

TEST_CASE("turing_region: reference thresholds and case formulas") {
  RiccatiData rd = solve_riccati(reference_params());
  StabilityAtlas atlas = turing_region(rd, kRho);

  const double kqeta = rd.k * rd.params.q * rd.params.eta;
  CHECK(kqeta == doctest::Approx(4.0).epsilon(1e-14));
  const double c_plus_expected = (3.5 / kRho - 4.0) / 1.5;
  const double c_minus_expected = (-3.5 / kRho - 4.0) / 1.5;
  CHECK(atlas.c_plus == doctest::Approx(c_plus_expected).epsilon(1e-14));
  CHECK(atlas.c_minus == doctest::Approx(c_minus_expected).epsilon(1e-14));
  CHECK(atlas.c_plus == doctest::Approx(0.02767).epsilon(2e-3));
  CHECK(atlas.c_minus == doctest::Approx(-5.36101).epsilon(2e-5));

  REQUIRE(atlas.turing_intervals.size() == 2);
  CHECK(atlas.turing_intervals[0].lo == -std::numeric_limits<double>::infinity());
  CHECK(atlas.turing_intervals[0].hi == doctest::Approx(c_minus_expected));
  CHECK(atlas.turing_intervals[1].hi == std::numeric_limits<double>::infinity());
  CHECK(atlas.turing_intervals[1].lo == doctest::Approx(c_plus_expected));

  // at an endpoint of I0 the binding edge rate vanishes
  CHECK(std::abs(closed_loop_rate(rd, atlas.c_plus, kRho)) < 1e-8);
  CHECK(std::abs(closed_loop_rate(rd, atlas.c_minus, -kRho)) < 1e-8);

  // gamma = a cases
  MfgParameters eq = reference_params();
  eq.a = 0.5;  // gamma = a = 0.5
  eq.eta = 0.0;
  RiccatiData rde = solve_riccati(eq);
  CHECK(turing_region(rde, kRho).turing_intervals.empty());  // rho k |q eta| <= Theta

  eq.eta = 40.0;  // rho k q eta > Theta
  RiccatiData rde2 = solve_riccati(eq);
  StabilityAtlas a2 = turing_region(rde2, kRho);
  REQUIRE(a2.turing_intervals.size() == 1);
  CHECK(a2.turing_intervals[0].lo == doctest::Approx(-eq.gamma / kRho));
  CHECK(a2.turing_intervals[0].hi == std::numeric_limits<double>::infinity());

  eq.eta = -40.0;  // rho k q eta < -Theta
  StabilityAtlas a3 = turing_region(solve_riccati(eq), kRho);
  REQUIRE(a3.turing_intervals.size() == 1);
  CHECK(a3.turing_intervals[0].lo == -std::numeric_limits<double>::infinity());
  CHECK(a3.turing_intervals[0].hi == doctest::Approx(eq.gamma / kRho));

  // gamma < a: c+ < c- and the empty (c-, gamma/rho) component is pruned
  MfgParameters less = reference_params();
  less.a = 1.0;
  less.gamma = 0.4;
  RiccatiData rdl = solve_riccati(less);
  StabilityAtlas a4 = turing_region(rdl, kRho);
  CHECK(a4.c_plus < a4.c_minus);
  REQUIRE(a4.turing_intervals.size() == 1);
  CHECK(a4.turing_intervals[0].lo == doctest::Approx(-less.gamma / kRho));
  CHECK(a4.turing_intervals[0].hi == doctest::Approx(a4.c_plus));
}

TEST_CASE("mean_stability_region: reference value and cases") {
  RiccatiData rd = solve_riccati(reference_params());
  StabilityAtlas atlas = mean_stability_region(rd);
  CHECK(atlas.c_star == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
  REQUIRE(atlas.mean_stable_intervals.size() == 1);
  CHECK(atlas.mean_stable_intervals[0].lo == -std::numeric_limits<double>::infinity());
  CHECK(atlas.mean_stable_intervals[0].hi == doctest::Approx(-1.0 / 3.0));

  // sampled couplings inside S1 keep the mean mode contracting
  for (double c : {-0.4, -1.0, -3.0, -5.0}) {
    CHECK(in_any(atlas.mean_stable_intervals, c));
    if (sare_discriminant(rd, c, 1.0) >= 0.0)
      CHECK(closed_loop_rate(rd, c, 1.0) < 0.0);
  }
  for (double c : {-0.3, 0.5, 2.0}) CHECK(!in_any(atlas.mean_stable_intervals, c));

  // gamma = a with k q eta < Theta: stable for every coupling
  MfgParameters eq = reference_params();
  eq.a = 0.5;
  eq.eta = 0.0;
  StabilityAtlas a1 = mean_stability_region(solve_riccati(eq));
  REQUIRE(a1.mean_stable_intervals.size() == 1);
  CHECK(a1.mean_stable_intervals[0].lo == -std::numeric_limits<double>::infinity());
  CHECK(a1.mean_stable_intervals[0].hi == std::numeric_limits<double>::infinity());
  CHECK(std::isnan(a1.c_star));

  eq.eta = 40.0;  // k q eta >= Theta
  StabilityAtlas a2 = mean_stability_region(solve_riccati(eq));
  REQUIRE(a2.mean_stable_intervals.size() == 1);
  CHECK(a2.mean_stable_intervals[0].hi == doctest::Approx(-eq.gamma));

  // gamma < a case keeps two components
  MfgParameters less = reference_params();
  less.a = 1.0;
  less.gamma = 0.4;
  StabilityAtlas a3 = mean_stability_region(solve_riccati(less));
  CHECK(a3.mean_stable_intervals.size() == 2);
}

TEST_CASE("classify_coupling: reference representatives and oracle agreement") {
  RiccatiData rd = solve_riccati(reference_params());
  CHECK(classify_coupling(rd, 0.0, kRho) == CouplingLabel::Uncoupled);
  CHECK(classify_coupling(rd, -1.0, kRho) == CouplingLabel::Stable);
  // any coupling below c_minus with existence intact fragments space
  for (double c : {-6.0, -10.0, -20.0}) {
    REQUIRE(existence_check(rd, c, kRho).ok);
    CHECK(classify_coupling(rd, c, kRho) == CouplingLabel::TuringUnstable);
  }
  CHECK(classify_coupling(rd, 0.1, kRho) == CouplingLabel::NoRealSolution);
  // just below c_plus: existence holds, the mean mode escapes
  CHECK(classify_coupling(rd, 0.02, kRho) == CouplingLabel::MeanUnstable);

  std::mt19937 rng(71);
  int used = 0, mismatches = 0;
  while (used < 200) {
    Draw d = random_draw(rng);
    if (std::abs(d.c) < 1e-5) continue;
    if (near_region_boundary(d.rd, d.c, d.rho, 1e-6)) continue;
    std::string orc = oracle_classify(d.rd, d.c, d.rho);
    if (orc == "skip") continue;
    if (orc != to_string(classify_coupling(d.rd, d.c, d.rho))) ++mismatches;
    ++used;
  }
  CHECK(mismatches == 0);
}

TEST_CASE("atlas JSON uses infinity sentinels and null thresholds") {
  RiccatiData rd = solve_riccati(reference_params());
  nlohmann::json j = stability_atlas(rd, kRho).to_json();
  CHECK(j["rho"].get<double>() == kRho);
  CHECK(j["theta"].get<double>() == doctest::Approx(3.5));
  CHECK(j["case"] == "gamma>a");
  CHECK(j["I0"][0][0] == "-inf");
  CHECK(j["I0"][1][1] == "inf");
  CHECK(j["S1"][0][0] == "-inf");
  CHECK(j["c_star"].get<double>() == doctest::Approx(-1.0 / 3.0));

  MfgParameters eq = reference_params();
  eq.a = 0.5;
  eq.eta = 0.0;
  nlohmann::json je = stability_atlas(solve_riccati(eq), kRho).to_json();
  CHECK(je["case"] == "gamma=a");
  CHECK(je["c_plus"].is_null());
  CHECK(je["c_minus"].is_null());
  CHECK(je["c_star"].is_null());
}
