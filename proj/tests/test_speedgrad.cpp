#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "plants.hpp"
#include "rng.hpp"
#include "speedgrad.hpp"

using namespace sg;

namespace {

FeedbackSpec linear_zeta(double alpha, const Vec& theta_bar) {
  FeedbackSpec z;
  z.variant = FeedbackVariant::Linear;
  z.alpha = alpha;
  z.theta_bar = theta_bar;
  return z;
}

}  // namespace

TEST_CASE("eval_feedback: linear") {
  FeedbackSpec z = linear_zeta(2.0, Vec::Zero(2));
  Vec th(2);
  th << 1, -1;
  Vec out = eval_feedback(z, th);
  CHECK(out[0] == doctest::Approx(2.0));
  CHECK(out[1] == doctest::Approx(-2.0));
}

TEST_CASE("eval_feedback: ball deadzone is zero inside the ball") {
  FeedbackSpec z;
  z.variant = FeedbackVariant::BallDeadzone;
  z.alpha = 2.0;
  z.theta_bar = Vec::Zero(2);
  z.ball_radius = 1.0;
  Vec inside(2);
  inside << 0.5, 0;
  CHECK(eval_feedback(z, inside).norm() == 0.0);
  Vec boundary(2);
  boundary << 1.0, 0;
  CHECK(eval_feedback(z, boundary).norm() == doctest::Approx(2.0));
}

TEST_CASE("eval_feedback: relay acts componentwise") {
  FeedbackSpec z;
  z.variant = FeedbackVariant::Relay;
  z.relay_amplitude = 2.0;
  z.theta_bar = Vec::Zero(2);
  z.ball_radius = 1.0;
  Vec th(2);
  th << 3, 4;  // norm 5 >= d
  Vec out = eval_feedback(z, th);
  CHECK(out[0] == doctest::Approx(2.0));
  CHECK(out[1] == doctest::Approx(2.0));
  Vec inside(2);
  inside << 0.3, 0.3;
  CHECK(eval_feedback(z, inside).norm() == 0.0);
}

TEST_CASE("feedback is odd about theta_bar (linear and relay)") {
  Rng rng(21);
  Vec theta_bar(3);
  theta_bar << 1, -2, 0.5;
  FeedbackSpec lin = linear_zeta(1.7, theta_bar);
  FeedbackSpec rel;
  rel.variant = FeedbackVariant::Relay;
  rel.relay_amplitude = 1.3;
  rel.theta_bar = theta_bar;
  rel.ball_radius = 0.5;
  for (int i = 0; i < 50; ++i) {
    Vec v = rng.vector_in_cube(3, 4.0);
    if (v.norm() < rel.ball_radius) continue;
    CHECK((eval_feedback(lin, theta_bar + v) +
           eval_feedback(lin, theta_bar - v)).norm() == doctest::Approx(0.0));
    CHECK((eval_feedback(rel, theta_bar + v) +
           eval_feedback(rel, theta_bar - v)).norm() == doctest::Approx(0.0));
  }
}

TEST_CASE("nf_constants: linear with zero prior") {
  Vec theta_star(2);
  theta_star << 1, 0;
  NfConstants c = nf_constants(linear_zeta(2.0, Vec::Zero(2)), theta_star);
  CHECK(c.rho == doctest::Approx(1.0));
  CHECK(c.rho_prime == doctest::Approx(1.0));
}

TEST_CASE("nf_constants: perfect prior") {
  Vec theta_star(2);
  theta_star << -3, 2;
  NfConstants c = nf_constants(linear_zeta(2.0, theta_star), theta_star);
  CHECK(c.rho == doctest::Approx(1.0));
  CHECK(c.rho_prime == doctest::Approx(0.0));
}

TEST_CASE("nf_constants: ball deadzone") {
  FeedbackSpec z;
  z.variant = FeedbackVariant::BallDeadzone;
  z.alpha = 2.0;
  z.theta_bar = Vec::Zero(1);
  z.ball_radius = 1.0;
  Vec theta_star = Vec::Constant(1, 1.0);  // |theta_bar - theta*| = 1
  NfConstants c = nf_constants(z, theta_star);
  CHECK(c.rho == doctest::Approx(1.0));
  CHECK(c.rho_prime == doctest::Approx(4.0));
}

TEST_CASE("verify_nf: analytic linear constants pass with equality attained") {
  Vec theta_bar(2);
  theta_bar << 2, -1;
  Vec theta_star(2);
  theta_star << -1, 1;
  FeedbackSpec z = linear_zeta(2.0, theta_bar);
  NfConstants c = nf_constants(z, theta_star);
  auto rep = verify_nf(z, theta_star, c.rho, c.rho_prime, 10.0, 2000, 77);
  CHECK(rep.passed);
  CHECK(rep.margin >= -1e-9);
  // Exact equality at theta = theta_bar.
  Vec v = theta_bar - theta_star;
  double at_bar = eval_feedback(z, theta_bar).dot(v) - c.rho * v.squaredNorm() +
                  c.rho_prime;
  CHECK(at_bar == doctest::Approx(0.0));
}

TEST_CASE("verify_nf: inflated rho fails at large radius") {
  Vec theta_star(2);
  theta_star << 1, 0;
  FeedbackSpec z = linear_zeta(2.0, Vec::Zero(2));
  NfConstants c = nf_constants(z, theta_star);
  auto rep = verify_nf(z, theta_star, 10.0 * c.rho, c.rho_prime, 10.0, 2000, 77);
  CHECK_FALSE(rep.passed);
}

TEST_CASE("verify_nf: zero feedback cannot be coercive") {
  FeedbackSpec z;
  z.variant = FeedbackVariant::BallDeadzone;
  z.alpha = 1.0;
  z.theta_bar = Vec::Zero(2);
  z.ball_radius = 1e9;  // zero on the whole sampled region
  auto rep = verify_nf(z, Vec::Zero(2), 1.0, 0.0, 10.0, 500, 5);
  CHECK_FALSE(rep.passed);
}

TEST_CASE("relay NF fit verifies on its radius") {
  FeedbackSpec z;
  z.variant = FeedbackVariant::Relay;
  z.relay_amplitude = 2.0;
  z.theta_bar = Vec::Zero(1);
  z.ball_radius = 1.0;
  Vec theta_star = Vec::Constant(1, -2.0);
  NfFitOptions opts;
  opts.radius = 10.0;
  NfConstants c = nf_constants(z, theta_star, opts);
  CHECK(c.ok);
  CHECK(c.rho > 0.0);
  auto rep = verify_nf(z, theta_star, c.rho, c.rho_prime, 10.0, 4000, 99);
  CHECK(rep.passed);

  // Forcing a rho the relay cannot support within a tight rho' cap fails.
  NfFitOptions hard = opts;
  hard.min_rho = 5.0;
  hard.rho_prime_cap = 1.0;
  NfConstants bad = fit_relay_nf(z, theta_star, hard);
  CHECK_FALSE(bad.ok);
}

TEST_CASE("adapt_rate: basic / sigma / deadzone") {
  AdaptLawSpec basic;
  basic.family = LawFamily::Basic;
  basic.gain = Mat::Identity(2, 2);
  Vec grad(2);
  grad << 1, -2;
  Vec rate = adapt_rate(basic, grad, Vec::Zero(2), 1.0);
  CHECK(rate[0] == doctest::Approx(-1.0));
  CHECK(rate[1] == doctest::Approx(2.0));

  AdaptLawSpec sigma;
  sigma.family = LawFamily::Sigma;
  sigma.gain = Mat::Identity(2, 2);
  sigma.kappa = 2.0;
  FeedbackSpec z;
  z.variant = FeedbackVariant::Linear;
  z.alpha = 1.0;
  z.theta_bar = Vec::Zero(2);
  sigma.feedback = z;
  Vec g2(2);
  g2 << 1, 0;
  Vec theta(2);
  theta << 0, 1;  // zeta(theta) = [0, 1]
  Vec rs = adapt_rate(sigma, g2, theta, 1.0);
  CHECK(rs[0] == doctest::Approx(-2.0));
  CHECK(rs[1] == doctest::Approx(-1.0));

  AdaptLawSpec dz;
  dz.family = LawFamily::Deadzone;
  dz.gain = Mat::Identity(2, 2);
  dz.deadzone = 1.0;
  CHECK(adapt_rate(dz, g2, theta, 0.5).norm() == 0.0);
  CHECK(adapt_rate(dz, g2, theta, 1.0) == adapt_rate(basic, g2, theta, 1.0));
}

TEST_CASE("adapt_rate: scaling (kappa, zeta) by 2 doubles the rate exactly") {
  AdaptLawSpec law;
  law.family = LawFamily::Sigma;
  law.gain = Mat::Identity(3, 3);
  law.gain(0, 0) = 2.5;
  law.kappa = 3.0;
  FeedbackSpec z;
  z.variant = FeedbackVariant::Linear;
  z.alpha = 1.25;
  z.theta_bar = Vec::Zero(3);
  law.feedback = z;

  AdaptLawSpec scaled = law;
  scaled.kappa *= 2.0;
  scaled.feedback->alpha *= 2.0;

  Rng rng(31);
  for (int i = 0; i < 30; ++i) {
    Vec grad = rng.vector_in_cube(3, 5.0);
    Vec theta = rng.vector_in_cube(3, 5.0);
    Vec r1 = adapt_rate(law, grad, theta, 1.0);
    Vec r2 = adapt_rate(scaled, grad, theta, 1.0);
    CHECK(r2 == Vec(2.0 * r1));  // exact in floating point
  }
}

TEST_CASE("validate_law rejects bad gain matrices") {
  AdaptLawSpec law;
  law.family = LawFamily::Basic;
  law.gain = Mat::Zero(2, 2);
  law.gain << 1, 0.2, 0.3, 1;  // not symmetric
  CHECK_THROWS_AS(validate_law(law, 2), Error);

  law.gain << 1, 2, 2, 1;  // symmetric, indefinite
  CHECK_THROWS_AS(validate_law(law, 2), Error);

  law.gain << 2, 0.5, 0.5, 1;
  validate_law(law, 2);
  CHECK(law.gain_lambda_min > 0.0);
  CHECK(law.gain_lambda_min == doctest::Approx(1.5 - std::sqrt(0.5)));
}

TEST_CASE("verify_pseudogradient") {
  ScalarAffinePlant sp{1.0, 1.0};
  PlantSpec plant = sp.plant();
  GoalSpec goal = quadratic_goal(Mat::Identity(1, 1));
  SampleDomain dom;

  PseudoGradSpec zero;
  zero.psi = [](const Vec&, double) { return Vec::Zero(1); };
  auto rep0 = verify_pseudogradient(zero, plant, goal, dom);
  CHECK(rep0.passed);

  // psi = grad_theta w at a reference theta; theta-independent here, so the
  // inner product is |grad w|^2 >= 0.
  PseudoGradSpec self;
  self.psi = [&plant, &goal](const Vec& x, double t) {
    return eval_speed_gradient(plant, goal, x, Vec::Zero(1), t);
  };
  CHECK(verify_pseudogradient(self, plant, goal, dom).passed);

  PseudoGradSpec negated;
  negated.psi = [&plant, &goal](const Vec& x, double t) {
    return Vec(-eval_speed_gradient(plant, goal, x, Vec::Zero(1), t));
  };
  CHECK_FALSE(verify_pseudogradient(negated, plant, goal, dom).passed);
}
