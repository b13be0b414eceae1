#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "model.hpp"
#include "speedgrad.hpp"

namespace sg {

struct SimConfig {
  double step = 1e-3;        // h
  double horizon = 10.0;     // T
  int record_stride = 1;
  double tail_fraction = 0.2;
  // Discontinuous right-hand sides (relay feedback, deadzone law) are
  // evaluated pointwise at the stage points; the step must stay below this
  // cap for those scenarios.
  double max_step_discontinuous = 1e-3;
};

// Inputs for the certificates that need the ideal parameters.
struct VerifySpec {
  Vec theta_star;
  double epsilon = 0.0;
  std::optional<ClassConstants> constants;  // computed when absent
  double nf_radius = 10.0;
  int nf_samples = 2000;
  std::uint64_t seed = 20260801;
};

// Extra facts about linear output-feedback plants, retained at assembly for
// the state error bound and the surrogate-gradient diagnostic.
struct LinearPlantInfo {
  double lambda_plus = 0.0;    // lambda_max(H)
  double lambda_minus = 0.0;   // lambda_min(H)
  double sigma_decay = 0.0;    // shift used to build H (or stability degree)
  bool surrogate_aligned = false;
  double alignment_residual = 0.0;
  double alignment_scale = 0.0;
};

struct ScenarioSpec {
  std::string name = "scenario";
  PlantSpec plant;
  GoalSpec goal;
  DisturbanceSpec disturbance;
  AdaptLawSpec law;
  Vec x0;
  Vec theta0;
  SimConfig sim;
  bool freeze_params = false;  // hold theta at theta0 (comparison runs)
  // Optional replacement for grad_theta w in the adaptation law, e.g. the
  // output-feedback surrogate (g.y) y.
  std::function<Vec(const Vec& x, const Vec& theta, double t)>
      adaptation_gradient;
  std::optional<VerifySpec> verify;
  std::optional<LinearPlantInfo> linear;
};

// Dimension / parameter checks shared by the file loader and the builders.
// Binds the adversarial disturbance to the goal gradient and caches
// lambda_min of the adaptation gain. Throws Error(Validation) on failure.
void finalize_scenario(ScenarioSpec& scenario);

}  // namespace sg
