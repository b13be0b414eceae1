#pragma once

#include <functional>
#include <optional>

#include "model.hpp"

namespace sg {

enum class FeedbackVariant { Linear, BallDeadzone, Relay };

// Parametric feedback zeta(theta) added to the adaptation law.
//   linear:        zeta = alpha (theta - theta_bar)
//   ball_deadzone: linear outside |theta - theta_bar| >= d, zero inside
//   relay:         amplitude * sign(theta - theta_bar) componentwise outside
struct FeedbackSpec {
  FeedbackVariant variant = FeedbackVariant::Linear;
  double alpha = 0.0;
  Vec theta_bar;
  double ball_radius = 0.0;  // d
  double relay_amplitude = 0.0;
};

std::string feedback_variant_name(FeedbackVariant variant);

// Proportional term of the combined law. psi depends on (x, t) only so that
// theta = z - gamma psi(x, t) stays explicit in the integrated state z.
struct PseudoGradSpec {
  std::function<Vec(const Vec& x, double t)> psi;
  double gamma = 1.0;
};

enum class LawFamily { Basic, Sigma, Combined, Deadzone };

std::string law_family_name(LawFamily family);

struct AdaptLawSpec {
  LawFamily family = LawFamily::Basic;
  Mat gain;                             // Gamma, symmetric positive definite
  double kappa = 1.0;                   // internal gain (sigma / combined)
  std::optional<FeedbackSpec> feedback; // sigma / combined
  std::optional<PseudoGradSpec> pseudograd;  // combined
  double deadzone = 0.0;                // Delta (deadzone family)
  double gain_lambda_min = 0.0;         // cached by validate_law
};

// Checks symmetry and positive definiteness of Gamma (plus per-family
// parameter sanity) and caches lambda_min(Gamma).
void validate_law(AdaptLawSpec& law, int param_dim);

Vec eval_feedback(const FeedbackSpec& zeta, const Vec& theta);

// Constants of the coercivity condition
//   zeta(theta).(theta - theta*) >= rho |theta - theta*|^2 - rho'.
struct NfConstants {
  double rho = 0.0;
  double rho_prime = 0.0;
  bool ok = true;
  std::string note;
};

struct NfFitOptions {
  double radius = 10.0;   // fit/verify over |theta - theta*| <= radius
  int n_samples = 2000;
  std::uint64_t seed = 7;
  double min_rho = 0.0;          // require rho >= min_rho (0 = free)
  double rho_prime_cap = std::numeric_limits<double>::infinity();
};

// Analytic constants for linear and ball variants; numerical fit for relay.
NfConstants nf_constants(const FeedbackSpec& zeta, const Vec& theta_star,
                         const NfFitOptions& opts = {});

NfConstants fit_relay_nf(const FeedbackSpec& zeta, const Vec& theta_star,
                         const NfFitOptions& opts);

CertificateReport verify_nf(const FeedbackSpec& zeta, const Vec& theta_star,
                            double rho, double rho_prime, double radius,
                            int n_samples, std::uint64_t seed);

// Rate of the integrated parameter state.
//   basic:    -Gamma grad_w
//   sigma:    -Gamma [kappa grad_w + zeta(theta)]
//   combined: zdot = -Gamma [kappa grad_w + zeta(z)]   (pass z)
//   deadzone: -Gamma grad_w when Q >= Delta, else 0
Vec adapt_rate(const AdaptLawSpec& law, const Vec& grad_w,
               const Vec& theta_or_z, double goal_value);

CertificateReport verify_pseudogradient(const PseudoGradSpec& psi,
                                        const PlantSpec& plant,
                                        const GoalSpec& goal,
                                        const SampleDomain& dom);

}  // namespace sg
