#pragma once

#include <string>

#include "plants.hpp"
#include "scenario.hpp"

namespace sg {

// Parsed form of a scenario file; mirrors the on-disk schema 1:1 so that
// overrides and re-serialization stay exact. assemble() turns it into a
// runnable ScenarioSpec.
struct ScenarioFileData {
  std::string name = "scenario";

  // [plant]
  std::string plant_kind;  // scalar_affine | linear_output
  double a = 0.0, b = 0.0; // scalar_affine
  Mat A, B, L;             // linear_output
  Vec g;
  Vec theta_bar;           // linear_output prior (also default for feedback)

  // [goal]
  bool goal_from_lyapunov = false;
  double lyapunov_shift_factor = 0.9;
  Mat H;                   // explicit weight (when not constructed)

  // [disturbance]
  std::string disturbance_kind = "zero";
  double amplitude = 0.0;
  Vec direction;
  double omega = 1.0, phase = 0.0;
  std::uint64_t seed = 0;

  // [law]
  std::string family = "basic";
  Mat gain;
  double kappa = 1.0;
  double deadzone = 0.0;
  bool use_true_gradient = false;  // linear_output: bypass (g.y) y surrogate

  // [law.feedback]
  bool has_feedback = false;
  std::string feedback_variant = "linear";
  double feedback_alpha = 0.0;
  Vec feedback_theta_bar;
  double ball_radius = 0.0;
  double relay_amplitude = 0.0;

  // [law.pseudograd]
  bool has_pseudograd = false;
  double pseudograd_gamma = 1.0;
  Vec pseudograd_theta_ref;

  // [init]
  Vec x0, theta0;
  bool freeze_params = false;

  // [sim]
  SimConfig sim;

  // [verify]
  bool has_verify = false;
  Vec theta_star;
  bool theta_star_high_gain = false;
  double mu = 0.0;
  double epsilon = 0.0;
  bool has_explicit_constants = false;
  ClassConstants explicit_constants;
  double nf_radius = 10.0;
  int nf_samples = 2000;
  std::uint64_t verify_seed = 20260801;

  ScenarioSpec assemble() const;
  std::string serialize() const;

  // Whitelisted sweep parameters:
  // kappa, alpha, delta_f, gamma_scale, delta, epsilon, seed.
  void override_parameter(const std::string& param, double value);
};

// base_dir resolves csv: matrix references; load_scenario_file passes the
// scenario's own directory.
ScenarioFileData parse_scenario_text(const std::string& text,
                                     const std::string& source_name,
                                     const std::string& base_dir = ".");
ScenarioFileData load_scenario_file(const std::string& path);

bool is_sweep_parameter(const std::string& name);

}  // namespace sg
