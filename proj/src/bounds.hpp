#pragma once

#include <iosfwd>

#include "sim.hpp"

namespace sg {

// Minimal achievable estimate of the limiting goal value under a bounded
// disturbance: (delta_f * alpha1 / alpha0)^{1/(1-sigma)}.
double optimum_estimate(double alpha0, double alpha1, double sigma,
                        double delta_f);

// Smallest internal gain guaranteeing estimated epsilon-optimality:
// k0 = 2 rho' / (epsilon alpha0 (1 - sigma)).
double min_gain_k0(double rho_prime, double epsilon, double alpha0,
                   double sigma);

// Limit bound for a conforming run with internal gain k:
// delta_star + 2 rho' / (k alpha0 (1 - sigma)).
double corollary_bound(double delta_star, double rho_prime, double k,
                       double alpha0, double sigma);

struct ErrorBoundResult {
  double value = 0.0;
  // delta_f = 0 makes the second term singular; in that case only the first
  // term (zero) is returned and this flag is set when epsilon > 0.
  bool second_term_dropped = false;
};

// State error bound for the linear output-feedback example:
// sqrt(lp/lm) delta_f / (2 sigma) + epsilon sigma / (delta_f sqrt(lp lm)).
ErrorBoundResult error_bound_linear(double lambda_plus, double lambda_minus,
                                    double delta_f, double sigma_decay,
                                    double epsilon);

// Gain conditions for sigma/combined laws:
//   (i)   2 rho lambda_min(Gamma) >= alpha0 (1 - sigma)
//   (ii)  kappa > k0 (strict)
//   (iii) kappa > alpha |theta_bar - theta*|^2 / (epsilon alpha0 (1-sigma)),
//         the linear-feedback specialization of (ii); emitted when the
//         feedback is linear and theta* is known.
CertificateList check_gain_conditions(const AdaptLawSpec& law, double rho,
                                      double rho_prime, double alpha0,
                                      double sigma, double epsilon,
                                      const Vec* theta_star = nullptr);

// Deadzone law applies when delta_star < delta (strict).
bool deadzone_applicability(double delta, double delta_star);

struct Prop1Report {
  CertificateReport grid_check;  // scalar inequality on a Q-grid
  CertificateReport tail_check;  // measured tail-sup Q <= delta_star + tol
  double delta_star = 0.0;
  double measured_tail_q = 0.0;
};

// Certificate for a frozen-parameter comparison run: verifies the decay
// inequality -a0 q + df a1 q^s <= -a0(1-s)(q - delta_star) on a grid over
// [0, 10 delta_star] and the measured tail-sup of the trajectory.
Prop1Report proposition1_certificate(const ScenarioSpec& frozen,
                                     int grid_points = 1000);

struct BoundReport {
  std::string scenario_name;
  std::string law_family;
  ClassConstants constants;
  double delta_f = 0.0;
  double epsilon = 0.0;

  double delta_star = std::numeric_limits<double>::quiet_NaN();
  double k0 = std::numeric_limits<double>::quiet_NaN();
  double corollary = std::numeric_limits<double>::quiet_NaN();
  double error_bound_x = std::numeric_limits<double>::quiet_NaN();
  double nf_rho = std::numeric_limits<double>::quiet_NaN();
  double nf_rho_prime = std::numeric_limits<double>::quiet_NaN();

  double tail_sup_q = std::numeric_limits<double>::quiet_NaN();
  double tail_sup_x_norm = std::numeric_limits<double>::quiet_NaN();

  CertificateList conditions;

  int conditions_passed(bool strict = false) const;
  int conditions_total(bool strict = false) const;
  bool all_passed(bool strict = false) const;
};

// Assembles every applicable bound and certificate for the scenario; the
// trajectory is optional (measured checks are skipped without it).
// Comparisons of measured tails against bounds carry a 2% estimator
// tolerance; algebraic gain conditions are strict.
BoundReport make_bound_report(const ScenarioSpec& scenario,
                              const TrajectoryRecord* traj);

// Structured text form (documented in the README).
void write_report(const BoundReport& report, std::ostream& out);

}  // namespace sg
