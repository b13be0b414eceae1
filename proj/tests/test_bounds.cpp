#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "bounds.hpp"
#include "plants.hpp"

using namespace sg;

TEST_CASE("optimum_estimate") {
  CHECK(optimum_estimate(2.0, 1.0, 0.5, 1.0) == doctest::Approx(0.25));
  CHECK(optimum_estimate(2.0, 1.0, 0.5, 0.0) == doctest::Approx(0.0));
  CHECK(optimum_estimate(1.0, 2.0, 0.5, 3.0) == doctest::Approx(36.0));
  CHECK_THROWS_AS(optimum_estimate(2.0, 1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(optimum_estimate(0.0, 1.0, 0.5, 1.0), Error);
}

TEST_CASE("optimum_estimate monotonicity") {
  double base = optimum_estimate(2.0, 1.0, 0.5, 1.0);
  for (double delta : {1.1, 1.5, 2.0}) {
    CHECK(optimum_estimate(2.0, 1.0, 0.5, delta) > base);
  }
  for (double a1 : {1.1, 1.5, 2.0}) {
    CHECK(optimum_estimate(2.0, a1, 0.5, 1.0) > base);
  }
  for (double a0 : {2.1, 2.5, 3.0}) {
    CHECK(optimum_estimate(a0, 1.0, 0.5, 1.0) < base);
  }
}

TEST_CASE("min_gain_k0") {
  CHECK(min_gain_k0(1.0, 0.1, 2.0, 0.5) == doctest::Approx(20.0));
  CHECK(min_gain_k0(0.0, 0.1, 2.0, 0.5) == doctest::Approx(0.0));
  CHECK(min_gain_k0(4.0, 0.5, 1.0, 0.0) == doctest::Approx(16.0));
  CHECK_THROWS_AS(min_gain_k0(1.0, 0.0, 2.0, 0.5), Error);
}

TEST_CASE("corollary_bound") {
  CHECK(corollary_bound(0.25, 1.0, 20.0, 2.0, 0.5) == doctest::Approx(0.35));
  CHECK(corollary_bound(0.25, 1.0, 1e9, 2.0, 0.5) ==
        doctest::Approx(0.25).epsilon(1e-8));
  CHECK(corollary_bound(0.25, 0.0, 7.0, 2.0, 0.5) == doctest::Approx(0.25));
  CHECK_THROWS_AS(corollary_bound(0.25, 1.0, 0.0, 2.0, 0.5), Error);
}

TEST_CASE("corollary_bound decreases in k toward delta_star") {
  double prev = corollary_bound(0.25, 1.0, 1.0, 2.0, 0.5);
  for (double k : {2.0, 4.0, 8.0, 64.0, 1024.0}) {
    double cur = corollary_bound(0.25, 1.0, k, 2.0, 0.5);
    CHECK(cur < prev);
    CHECK(cur >= 0.25);
    prev = cur;
  }
}

TEST_CASE("error_bound_linear") {
  CHECK(error_bound_linear(1.0, 1.0, 1.0, 1.0, 0.0).value ==
        doctest::Approx(0.5));
  CHECK(error_bound_linear(1.0, 1.0, 1.0, 1.0, 0.2).value ==
        doctest::Approx(0.7));
  CHECK(error_bound_linear(4.0, 1.0, 1.0, 1.0, 0.0).value ==
        doctest::Approx(1.0));
  auto degenerate = error_bound_linear(1.0, 1.0, 0.0, 1.0, 0.2);
  CHECK(degenerate.value == doctest::Approx(0.0));
  CHECK(degenerate.second_term_dropped);
  auto zero = error_bound_linear(1.0, 1.0, 0.0, 1.0, 0.0);
  CHECK(zero.value == doctest::Approx(0.0));
  CHECK_FALSE(zero.second_term_dropped);
  CHECK_THROWS_AS(error_bound_linear(1.0, 2.0, 1.0, 1.0, 0.0), Error);
}

TEST_CASE("check_gain_conditions") {
  AdaptLawSpec law;
  law.family = LawFamily::Sigma;
  law.gain = Mat::Identity(1, 1);
  FeedbackSpec z;
  z.variant = FeedbackVariant::Linear;
  z.alpha = 2.0;
  z.theta_bar = Vec::Zero(1);
  law.feedback = z;
  validate_law(law, 1);

  // rho = 1, Gamma = I, alpha0 = 2, sigma = 0.5: 2*1*1 = 2 >= 1.
  law.kappa = 25.0;
  Vec theta_star = Vec::Constant(1, -1.0);
  auto checks =
      check_gain_conditions(law, 1.0, 1.0, 2.0, 0.5, 0.1, &theta_star);
  REQUIRE(checks.size() == 3);
  CHECK(checks[0].name == "gain_2rho_lambda");
  CHECK(checks[0].passed);
  CHECK(checks[0].margin == doctest::Approx(1.0));
  CHECK(checks[1].name == "gain_kappa_gt_k0");
  CHECK(checks[1].passed);  // k0 = 20 < 25
  // Boundary: kappa == k0 must fail (strict inequality).
  law.kappa = 20.0;
  auto boundary =
      check_gain_conditions(law, 1.0, 1.0, 2.0, 0.5, 0.1, &theta_star);
  CHECK_FALSE(boundary[1].passed);

  // Linear-feedback surrogate: threshold alpha |..|^2 / (eps a0 (1-s)) = 20.
  law.kappa = 25.0;
  auto with_surrogate =
      check_gain_conditions(law, 1.0, 1.0, 2.0, 0.5, 0.1, &theta_star);
  CHECK(with_surrogate[2].name == "gain_param_linear");
  CHECK(with_surrogate[2].passed);
  CHECK(with_surrogate[2].margin == doctest::Approx(5.0));

  AdaptLawSpec basic;
  basic.family = LawFamily::Basic;
  basic.gain = Mat::Identity(1, 1);
  CHECK_THROWS_AS(check_gain_conditions(basic, 1.0, 1.0, 2.0, 0.5, 0.1, nullptr),
                  Error);
}

TEST_CASE("deadzone_applicability") {
  CHECK(deadzone_applicability(0.3, 0.25));
  CHECK_FALSE(deadzone_applicability(0.25, 0.25));
  CHECK(deadzone_applicability(0.1, 0.0));
  CHECK_THROWS_AS(deadzone_applicability(0.0, 0.25), Error);
}

TEST_CASE("proposition1_certificate on the scalar example") {
  ScalarExample ex = make_scalar_example(1.0, 1.0, -2.0, 0.5);
  Prop1Report rep = proposition1_certificate(ex.frozen);
  CHECK(rep.delta_star == doctest::Approx(0.125));
  CHECK(rep.grid_check.passed);
  CHECK(rep.grid_check.margin >= -1e-12);
  CHECK(rep.tail_check.passed);
  CHECK(rep.measured_tail_q == doctest::Approx(0.125).epsilon(0.02));

  // Undisturbed: both sides of the grid inequality reduce consistently.
  ScalarExample calm = make_scalar_example(1.0, 1.0, -2.0, 0.0);
  Prop1Report rep0 = proposition1_certificate(calm.frozen);
  CHECK(rep0.grid_check.passed);
  CHECK(rep0.tail_check.passed);
}

TEST_CASE("make_bound_report: sigma-law scalar scenario passes its checks") {
  ScalarExample ex = make_scalar_example(1.0, 1.0, -2.0, 0.5);
  ScenarioSpec s = ex.frozen;
  s.name = "scalar_sigma_unit";
  s.freeze_params = false;
  s.theta0 = Vec::Zero(1);
  s.law.family = LawFamily::Sigma;
  s.law.kappa = 24.0;
  FeedbackSpec z;
  z.variant = FeedbackVariant::Linear;
  z.alpha = 2.0;
  z.theta_bar = Vec::Zero(1);
  s.law.feedback = z;
  s.verify->epsilon = 0.5;
  finalize_scenario(s);

  TrajectoryRecord traj = integrate(s);
  BoundReport rep = make_bound_report(s, &traj);
  CHECK(rep.delta_star == doctest::Approx(0.125));
  CHECK(rep.nf_rho == doctest::Approx(1.0));
  CHECK(rep.nf_rho_prime == doctest::Approx(4.0));
  CHECK(rep.k0 == doctest::Approx(16.0));
  CHECK(rep.corollary == doctest::Approx(0.125 + 8.0 / 24.0));
  CHECK(rep.tail_sup_q <= rep.corollary);
  CHECK(rep.tail_sup_q <= rep.delta_star + rep.epsilon);
  CHECK(rep.all_passed(false));
  for (const auto& c : rep.conditions) {
    INFO(c.name, ": ", c.detail);
    CHECK(c.passed);
  }

  std::ostringstream out;
  write_report(rep, out);
  CHECK(out.str().find("status = pass") != std::string::npos);
  CHECK(out.str().find("delta_star = 0.125") != std::string::npos);
}

TEST_CASE("epsilon-optimality holds across epsilon once kappa clears k0") {
  ScalarExample ex = make_scalar_example(1.0, 1.0, -2.0, 0.5);
  for (double eps : {0.25, 0.5, 1.0}) {
    CAPTURE(eps);
    ScenarioSpec s = ex.frozen;
    s.freeze_params = false;
    s.theta0 = Vec::Zero(1);
    s.law.family = LawFamily::Sigma;
    FeedbackSpec z;
    z.variant = FeedbackVariant::Linear;
    z.alpha = 2.0;
    z.theta_bar = Vec::Zero(1);
    s.law.feedback = z;
    s.verify->epsilon = eps;
    NfConstants nf = nf_constants(z, s.verify->theta_star);
    double k0 = min_gain_k0(nf.rho_prime, eps, ex.constants.alpha0,
                            ex.constants.sigma);
    s.law.kappa = 1.5 * k0;
    finalize_scenario(s);
    double tail = tail_sup(integrate(s), s.sim.tail_fraction);
    CHECK(tail <= 1.02 * (ex.delta_star + eps));
  }
}

TEST_CASE("adversarial disturbance attains the optimum estimate") {
  // With theta frozen at the ideal gain, pushing along grad Q realizes the
  // worst case: the tail settles at delta* itself.
  ScalarExample ex = make_scalar_example(1.0, 1.0, -2.0, 0.5);
  ScenarioSpec s = ex.frozen;
  s.disturbance = DisturbanceSpec{};
  s.disturbance.kind = DisturbanceKind::AdversarialSign;
  s.disturbance.amplitude = 0.5;
  finalize_scenario(s);
  double tail = tail_sup(integrate(s), s.sim.tail_fraction);
  CHECK(tail == doctest::Approx(ex.delta_star).epsilon(0.02));
  CHECK(tail <= ex.delta_star * 1.02 + 1e-9);
}

TEST_CASE("make_bound_report: deadzone applicability drives the verdict") {
  ScalarExample ex = make_scalar_example(1.0, 1.0, -2.0, 0.5);
  ScenarioSpec s = ex.frozen;
  s.name = "scalar_deadzone_unit";
  s.freeze_params = false;
  s.theta0 = Vec::Zero(1);
  s.law.family = LawFamily::Deadzone;
  s.law.deadzone = 1.2 * ex.delta_star;
  finalize_scenario(s);
  TrajectoryRecord traj = integrate(s);
  BoundReport rep = make_bound_report(s, &traj);
  bool found = false;
  for (const auto& c : rep.conditions) {
    if (c.name == "deadzone_applicable") {
      found = true;
      CHECK(c.passed);
    }
  }
  CHECK(found);

  s.law.deadzone = 0.8 * ex.delta_star;
  finalize_scenario(s);
  BoundReport bad = make_bound_report(s, nullptr);
  for (const auto& c : bad.conditions) {
    if (c.name == "deadzone_applicable") CHECK_FALSE(c.passed);
  }
  CHECK_FALSE(bad.all_passed(false));
}
