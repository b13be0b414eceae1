#include "scenario.hpp"

#include <cmath>

namespace sg {

void finalize_scenario(ScenarioSpec& s) {
  if (s.plant.state_dim <= 0 || s.plant.param_dim <= 0) {
    throw Error(ErrorKind::Validation, "plant dimensions must be positive");
  }
  if (!s.plant.dynamics) {
    throw Error(ErrorKind::Validation, "plant has no dynamics");
  }
  if (!s.goal.value || !s.goal.gradient) {
    throw Error(ErrorKind::Validation, "goal function incomplete");
  }
  if (s.x0.size() != s.plant.state_dim) {
    throw Error(ErrorKind::Validation,
                "x0 has dimension " + std::to_string(s.x0.size()) +
                    ", plant expects " + std::to_string(s.plant.state_dim));
  }
  if (s.theta0.size() != s.plant.param_dim) {
    throw Error(ErrorKind::Validation,
                "theta0 has dimension " + std::to_string(s.theta0.size()) +
                    ", plant expects " + std::to_string(s.plant.param_dim));
  }

  validate_law(s.law, s.plant.param_dim);

  if (s.sim.step <= 0.0 || s.sim.horizon <= 0.0) {
    throw Error(ErrorKind::Validation, "step and horizon must be > 0");
  }
  if (s.sim.step > s.sim.horizon) {
    throw Error(ErrorKind::Validation, "step exceeds horizon");
  }
  double steps = s.sim.horizon / s.sim.step;
  if (std::abs(steps - std::llround(steps)) > 1e-6 * std::max(1.0, steps)) {
    throw Error(ErrorKind::Validation,
                "horizon must be an integer multiple of the step");
  }
  if (s.sim.record_stride < 1) {
    throw Error(ErrorKind::Validation, "record_stride must be >= 1");
  }
  if (!(s.sim.tail_fraction > 0.0 && s.sim.tail_fraction < 1.0)) {
    throw Error(ErrorKind::Validation, "tail_fraction must be in (0,1)");
  }

  const bool discontinuous =
      s.law.family == LawFamily::Deadzone ||
      (s.law.feedback && s.law.feedback->variant == FeedbackVariant::Relay);
  if (discontinuous && s.sim.step > s.sim.max_step_discontinuous) {
    throw Error(ErrorKind::Validation,
                "relay/deadzone scenarios require step <= " +
                    std::to_string(s.sim.max_step_discontinuous));
  }

  if (s.disturbance.amplitude < 0.0) {
    throw Error(ErrorKind::Validation, "disturbance amplitude must be >= 0");
  }
  switch (s.disturbance.kind) {
    case DisturbanceKind::ConstantVector:
    case DisturbanceKind::Sinusoid: {
      if (s.disturbance.direction.size() != s.plant.state_dim) {
        throw Error(ErrorKind::Validation, "disturbance direction dimension");
      }
      Vec v = s.disturbance.direction;
      double n = v.norm();
      if (n > 0.0) v *= s.disturbance.amplitude / n;
      clip_to_ball(v, s.disturbance.amplitude);
      s.disturbance.direction = v;
      break;
    }
    case DisturbanceKind::AdversarialSign:
      s.disturbance.goal_gradient = s.goal.gradient;
      break;
    default:
      break;
  }

  if (s.verify && s.verify->theta_star.size() != 0 &&
      s.verify->theta_star.size() != s.plant.param_dim) {
    throw Error(ErrorKind::Validation, "theta_star dimension mismatch");
  }

  // A1 spot check at the initial point.
  Vec f0 = eval_disturbance(s.disturbance, 0.0, s.x0);
  (void)eval_dynamics(s.plant, s.x0, s.theta0, 0.0, f0);
  double q0 = s.goal.value(s.x0);
  if (!std::isfinite(q0) || q0 < 0.0) {
    throw Error(ErrorKind::Validation, "goal value invalid at x0");
  }
}

}  // namespace sg
