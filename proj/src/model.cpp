#include "model.hpp"

#include <cmath>

#include "rng.hpp"

namespace sg {

std::string disturbance_kind_name(DisturbanceKind kind) {
  switch (kind) {
    case DisturbanceKind::Zero: return "zero";
    case DisturbanceKind::ConstantVector: return "constant";
    case DisturbanceKind::Sinusoid: return "sinusoid";
    case DisturbanceKind::BoundedUniformRandom: return "random";
    case DisturbanceKind::AdversarialSign: return "adversarial_sign";
  }
  return "?";
}

void clip_to_ball(Vec& v, double radius) {
  // One rescale is not always enough in floating point; iterate until the
  // recomputed norm actually satisfies the bound.
  for (int pass = 0; pass < 4; ++pass) {
    double n = v.norm();
    if (n <= radius) return;
    v *= radius / n;
  }
  v.setZero();
}

Vec eval_dynamics(const PlantSpec& plant, const Vec& x, const Vec& theta,
                  double t, const Vec& f) {
  if (x.size() != plant.state_dim || theta.size() != plant.param_dim ||
      f.size() != plant.state_dim) {
    throw Error(ErrorKind::InvalidArgument, "eval_dynamics: dimension mismatch");
  }
  Vec xdot = plant.dynamics(x, theta, t) + f;
  if (!xdot.allFinite()) {
    throw Error(ErrorKind::Validation,
                "plant dynamics produced a non-finite value at t=" +
                    std::to_string(t));
  }
  return xdot;
}

double eval_speed(const PlantSpec& plant, const GoalSpec& goal, const Vec& x,
                  const Vec& theta, double t) {
  Vec field = plant.dynamics(x, theta, t);
  double w = goal.gradient(x).dot(field);
  if (!std::isfinite(w)) {
    throw Error(ErrorKind::Validation,
                "goal speed non-finite at t=" + std::to_string(t));
  }
  return w;
}

Vec eval_speed_gradient(const PlantSpec& plant, const GoalSpec& goal,
                        const Vec& x, const Vec& theta, double t) {
  if (plant.param_jacobian) {
    // w = grad Q . F  =>  grad_theta w = (dF/dtheta)^T grad Q.
    return plant.param_jacobian(x, theta, t).transpose() * goal.gradient(x);
  }
  const double step = 1e-6 * (1.0 + theta.norm());
  Vec grad(plant.param_dim);
  Vec probe = theta;
  for (int i = 0; i < plant.param_dim; ++i) {
    probe[i] = theta[i] + step;
    double wp = eval_speed(plant, goal, x, probe, t);
    probe[i] = theta[i] - step;
    double wm = eval_speed(plant, goal, x, probe, t);
    probe[i] = theta[i];
    grad[i] = (wp - wm) / (2.0 * step);
  }
  return grad;
}

Vec eval_disturbance(const DisturbanceSpec& spec, double t, const Vec& x) {
  const int n = static_cast<int>(x.size());
  Vec f = Vec::Zero(n);
  switch (spec.kind) {
    case DisturbanceKind::Zero:
      break;
    case DisturbanceKind::ConstantVector: {
      f = spec.direction;
      break;
    }
    case DisturbanceKind::Sinusoid: {
      f = spec.direction * std::sin(spec.omega * t + spec.phase);
      break;
    }
    case DisturbanceKind::BoundedUniformRandom: {
      // Stateless per (seed, t, component); component scale amplitude/sqrt(n)
      // keeps the Euclidean norm within the amplitude for every draw.
      const std::uint64_t key = hash_combine(spec.seed, double_bits(t));
      const double scale = spec.amplitude / std::sqrt(static_cast<double>(n));
      for (int i = 0; i < n; ++i) {
        double u = 2.0 * bits_to_unit(splitmix64(key + 0x632be59bd9b4e019ULL *
                                                           (i + 1))) -
                   1.0;
        f[i] = scale * u;
      }
      break;
    }
    case DisturbanceKind::AdversarialSign: {
      // Pushes Q uphill: aligned with grad Q, zero near stationary points.
      Vec g = spec.goal_gradient ? spec.goal_gradient(x) : Vec::Zero(n);
      double gn = g.norm();
      if (gn >= 1e-12) f = (spec.amplitude / gn) * g;
      break;
    }
  }
  clip_to_ball(f, spec.amplitude);
  return f;
}

CertificateReport check_goal_gradient(const GoalSpec& goal, int state_dim,
                                      const SampleDomain& dom,
                                      double rel_tol) {
  Rng rng(dom.seed);
  CertificateReport rep;
  rep.name = "a1_goal_gradient";
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < dom.n_samples; ++k) {
    Vec x = rng.vector_in_cube(state_dim, dom.state_radius);
    const double step = 1e-5 * (1.0 + x.norm());
    Vec fd(state_dim);
    Vec probe = x;
    for (int i = 0; i < state_dim; ++i) {
      probe[i] = x[i] + step;
      double qp = goal.value(probe);
      probe[i] = x[i] - step;
      double qm = goal.value(probe);
      probe[i] = x[i];
      fd[i] = (qp - qm) / (2.0 * step);
    }
    Vec g = goal.gradient(x);
    double err = (fd - g).norm() / (1.0 + g.norm());
    worst = std::min(worst, rel_tol - err);
  }
  rep.margin = worst;
  rep.passed = worst >= 0.0;
  rep.detail = "central differences vs analytic gradient, " +
               std::to_string(dom.n_samples) + " samples";
  return rep;
}

CertificateReport check_goal_growth(const GoalSpec& goal, int state_dim,
                                    const SampleDomain& dom) {
  Rng rng(dom.seed);
  CertificateReport rep;
  rep.name = "a2_radial_growth";
  double worst = std::numeric_limits<double>::infinity();
  const int n_rays = 64;
  for (int k = 0; k < n_rays; ++k) {
    Vec dir = rng.direction(state_dim);
    double prev = goal.value(Vec::Zero(state_dim));
    if (prev < 0.0) worst = std::min(worst, prev);
    double q1 = 0.0;
    for (double r = 1.0; r <= 64.0; r *= 2.0) {
      double q = goal.value(r * dir);
      if (r == 1.0) q1 = q;
      if (q < 0.0) worst = std::min(worst, q);
      worst = std::min(worst, q - prev);
      prev = q;
    }
    // Monotone but saturating goals are not radially unbounded; require the
    // ray span to at least double the value.
    worst = std::min(worst, prev - 2.0 * q1);
  }
  rep.margin = worst;
  rep.passed = worst > 0.0;
  rep.detail = "Q >= 0, increasing and at least doubling along sampled rays";
  return rep;
}

CertificateReport check_speed_convexity(const PlantSpec& plant,
                                        const GoalSpec& goal,
                                        const SampleDomain& dom) {
  Rng rng(dom.seed);
  CertificateReport rep;
  rep.name = "a3_convexity";
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < dom.n_samples; ++k) {
    Vec x = rng.vector_in_cube(plant.state_dim, dom.state_radius);
    Vec th = rng.vector_in_cube(plant.param_dim, dom.param_radius);
    Vec th2 = rng.vector_in_cube(plant.param_dim, dom.param_radius);
    double t = rng.uniform(0.0, 10.0);
    double lhs = eval_speed(plant, goal, x, th2, t) -
                 eval_speed(plant, goal, x, th, t);
    double rhs = (th2 - th).dot(eval_speed_gradient(plant, goal, x, th, t));
    worst = std::min(worst, lhs - rhs + 1e-9);
  }
  rep.margin = worst;
  rep.passed = worst >= 0.0;
  rep.detail = "w(x,th') - w(x,th) >= (th'-th).grad_theta w - 1e-9";
  return rep;
}

}  // namespace sg
