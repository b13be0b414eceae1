#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>

#include "certificate.hpp"
#include "error.hpp"

namespace sg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using DynamicsFn = std::function<Vec(const Vec& x, const Vec& theta, double t)>;
using ParamJacobianFn =
    std::function<Mat(const Vec& x, const Vec& theta, double t)>;  // n x m
using GoalValueFn = std::function<double(const Vec& x)>;
using GoalGradientFn = std::function<Vec(const Vec& x)>;

// Growth/attainability constants of the goal function class:
//   w(x, theta*) <= -alpha0 Q(x),  |grad Q(x)| <= alpha1 Q(x)^sigma.
struct ClassConstants {
  double alpha0 = 0.0;
  double alpha1 = 0.0;
  double sigma = 0.0;  // in [0, 1)
};

// Controlled vector field xdot = F(x, theta, t); theta is the vector of
// adjustable parameters. The parameter Jacobian dF/dtheta is optional;
// without it speed gradients fall back to central finite differences.
struct PlantSpec {
  int state_dim = 0;   // n
  int param_dim = 0;   // m
  DynamicsFn dynamics;
  ParamJacobianFn param_jacobian;  // empty -> finite differences
};

// Nonnegative goal function Q(x) with its gradient.
struct GoalSpec {
  GoalValueFn value;
  GoalGradientFn gradient;
  std::optional<ClassConstants> constants;
};

enum class DisturbanceKind {
  Zero,
  ConstantVector,
  Sinusoid,
  BoundedUniformRandom,
  AdversarialSign,
};

// Additive disturbance with |f| <= amplitude at all times, exactly.
struct DisturbanceSpec {
  DisturbanceKind kind = DisturbanceKind::Zero;
  double amplitude = 0.0;
  Vec direction;                  // constant / sinusoid; rescaled to amplitude
  double omega = 1.0;             // sinusoid frequency (rad/s)
  double phase = 0.0;
  std::uint64_t seed = 0;         // random kind
  GoalGradientFn goal_gradient;   // bound at scenario assembly (adversarial)
};

std::string disturbance_kind_name(DisturbanceKind kind);

// Rescales v in place so that the recomputed Euclidean norm is <= radius.
void clip_to_ball(Vec& v, double radius);

// xdot = F(x, theta, t) + f. Rejects non-finite results.
Vec eval_dynamics(const PlantSpec& plant, const Vec& x, const Vec& theta,
                  double t, const Vec& f);

// Speed of the goal along the nominal (undisturbed) field:
//   w = grad Q(x) . F(x, theta, t).
double eval_speed(const PlantSpec& plant, const GoalSpec& goal, const Vec& x,
                  const Vec& theta, double t);

// Gradient of w with respect to theta. Uses the analytic parameter Jacobian
// when present, else central differences with step 1e-6 * (1 + |theta|).
Vec eval_speed_gradient(const PlantSpec& plant, const GoalSpec& goal,
                        const Vec& x, const Vec& theta, double t);

Vec eval_disturbance(const DisturbanceSpec& spec, double t, const Vec& x);

// --- sampling certificates -------------------------------------------------

struct SampleDomain {
  double state_radius = 10.0;
  double param_radius = 10.0;
  int n_samples = 100;
  std::uint64_t seed = 1;
};

// Central-difference check of goal.gradient against goal.value.
// FD step 1e-5 * (1 + |x|); relative tolerance `rel_tol`.
CertificateReport check_goal_gradient(const GoalSpec& goal, int state_dim,
                                      const SampleDomain& dom,
                                      double rel_tol = 1e-6);

// Q nonnegative and growing along sampled rays (radial unboundedness).
CertificateReport check_goal_growth(const GoalSpec& goal, int state_dim,
                                    const SampleDomain& dom);

// Convexity of w in theta:
//   w(x, theta') - w(x, theta) >= (theta' - theta) . grad_theta w - 1e-9.
CertificateReport check_speed_convexity(const PlantSpec& plant,
                                        const GoalSpec& goal,
                                        const SampleDomain& dom);

}  // namespace sg
