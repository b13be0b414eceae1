#include "speedgrad.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "rng.hpp"

namespace sg {

std::string feedback_variant_name(FeedbackVariant variant) {
  switch (variant) {
    case FeedbackVariant::Linear: return "linear";
    case FeedbackVariant::BallDeadzone: return "ball_deadzone";
    case FeedbackVariant::Relay: return "relay";
  }
  return "?";
}

std::string law_family_name(LawFamily family) {
  switch (family) {
    case LawFamily::Basic: return "basic";
    case LawFamily::Sigma: return "sigma";
    case LawFamily::Combined: return "combined";
    case LawFamily::Deadzone: return "deadzone";
  }
  return "?";
}

void validate_law(AdaptLawSpec& law, int param_dim) {
  if (law.gain.rows() != param_dim || law.gain.cols() != param_dim) {
    throw Error(ErrorKind::Validation, "adaptation gain must be " +
                                           std::to_string(param_dim) + "x" +
                                           std::to_string(param_dim));
  }
  double asym = (law.gain - law.gain.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * (1.0 + law.gain.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::Validation, "adaptation gain is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(law.gain);
  law.gain_lambda_min = es.eigenvalues().minCoeff();
  if (law.gain_lambda_min <= 0.0) {
    throw Error(ErrorKind::Validation,
                "adaptation gain is not positive definite (lambda_min=" +
                    std::to_string(law.gain_lambda_min) + ")");
  }
  const bool has_feedback =
      law.family == LawFamily::Sigma || law.family == LawFamily::Combined;
  if (has_feedback) {
    if (!law.feedback) {
      throw Error(ErrorKind::Validation,
                  law_family_name(law.family) + " law requires a feedback term");
    }
    if (law.kappa <= 0.0) {
      throw Error(ErrorKind::Validation, "internal gain kappa must be > 0");
    }
    if (law.feedback->theta_bar.size() != param_dim) {
      throw Error(ErrorKind::Validation, "theta_bar dimension mismatch");
    }
    switch (law.feedback->variant) {
      case FeedbackVariant::Linear:
      case FeedbackVariant::BallDeadzone:
        if (law.feedback->alpha <= 0.0) {
          throw Error(ErrorKind::Validation, "feedback gain alpha must be > 0");
        }
        break;
      case FeedbackVariant::Relay:
        if (law.feedback->relay_amplitude <= 0.0) {
          throw Error(ErrorKind::Validation, "relay amplitude must be > 0");
        }
        break;
    }
    if (law.feedback->ball_radius < 0.0) {
      throw Error(ErrorKind::Validation, "ball radius d must be >= 0");
    }
  }
  if (law.family == LawFamily::Combined && !law.pseudograd) {
    throw Error(ErrorKind::Validation,
                "combined law requires a pseudogradient term");
  }
  if (law.family == LawFamily::Deadzone && law.deadzone <= 0.0) {
    throw Error(ErrorKind::Validation, "deadzone level Delta must be > 0");
  }
}

Vec eval_feedback(const FeedbackSpec& zeta, const Vec& theta) {
  Vec v = theta - zeta.theta_bar;
  switch (zeta.variant) {
    case FeedbackVariant::Linear:
      return zeta.alpha * v;
    case FeedbackVariant::BallDeadzone:
      if (v.norm() >= zeta.ball_radius) return zeta.alpha * v;
      return Vec::Zero(theta.size());
    case FeedbackVariant::Relay:
      if (v.norm() >= zeta.ball_radius) {
        Vec s(v.size());
        for (int i = 0; i < v.size(); ++i) {
          s[i] = v[i] > 0.0 ? 1.0 : (v[i] < 0.0 ? -1.0 : 0.0);
        }
        return zeta.relay_amplitude * s;
      }
      return Vec::Zero(theta.size());
  }
  return Vec::Zero(theta.size());
}

NfConstants nf_constants(const FeedbackSpec& zeta, const Vec& theta_star,
                         const NfFitOptions& opts) {
  NfConstants c;
  switch (zeta.variant) {
    case FeedbackVariant::Linear: {
      double dist = (zeta.theta_bar - theta_star).norm();
      c.rho = zeta.alpha / 2.0;
      c.rho_prime = zeta.alpha * dist * dist / 2.0;
      c.note = "analytic (linear)";
      return c;
    }
    case FeedbackVariant::BallDeadzone: {
      double dist = (zeta.theta_bar - theta_star).norm() + zeta.ball_radius;
      c.rho = zeta.alpha / 2.0;
      c.rho_prime = zeta.alpha * dist * dist / 2.0;
      c.note = "analytic (ball deadzone)";
      return c;
    }
    case FeedbackVariant::Relay:
      return fit_relay_nf(zeta, theta_star, opts);
  }
  return c;
}

NfConstants fit_relay_nf(const FeedbackSpec& zeta, const Vec& theta_star,
                         const NfFitOptions& opts) {
  NfConstants c;
  if (zeta.variant != FeedbackVariant::Relay) {
    throw Error(ErrorKind::InvalidArgument, "fit_relay_nf: not a relay feedback");
  }
  if (opts.radius <= 0.0) {
    throw Error(ErrorKind::InvalidArgument, "fit_relay_nf: radius must be > 0");
  }
  // The relay term grows linearly in |theta - theta*| while the NF left-hand
  // side is quadratic, so rho must shrink with the sampling radius. Default
  // slope A/(2R) makes the quadratic stay under the linear part; a caller
  // that needs a larger rho (gain condition) can force it via min_rho at the
  // price of a larger rho'.
  c.rho = std::max(zeta.relay_amplitude / (2.0 * opts.radius), opts.min_rho);
  Rng rng(opts.seed);
  const int m = static_cast<int>(theta_star.size());
  double need = 0.0;
  auto probe = [&](const Vec& theta) {
    Vec v = theta - theta_star;
    double lhs = eval_feedback(zeta, theta).dot(v);
    need = std::max(need, c.rho * v.squaredNorm() - lhs);
  };
  for (int k = 0; k < opts.n_samples; ++k) {
    probe(theta_star + rng.direction(m) * (opts.radius * rng.unit()));
    // boundary of the sampling ball and of the dead ball, where the worst
    // margins live
    probe(theta_star + rng.direction(m) * opts.radius);
    probe(zeta.theta_bar + rng.direction(m) * zeta.ball_radius);
  }
  probe(zeta.theta_bar);
  c.rho_prime = need + 1e-9;
  c.note = "fitted on radius " + std::to_string(opts.radius);
  if (!(c.rho_prime <= opts.rho_prime_cap)) {
    c.ok = false;
    c.note += " (infeasible: rho'=" + std::to_string(c.rho_prime) +
              " exceeds cap " + std::to_string(opts.rho_prime_cap) + ")";
  }
  return c;
}

CertificateReport verify_nf(const FeedbackSpec& zeta, const Vec& theta_star,
                            double rho, double rho_prime, double radius,
                            int n_samples, std::uint64_t seed) {
  CertificateReport rep;
  rep.name = "nf_condition";
  Rng rng(seed);
  const int m = static_cast<int>(theta_star.size());
  double worst = std::numeric_limits<double>::infinity();
  auto margin_at = [&](const Vec& theta) {
    Vec v = theta - theta_star;
    double lhs = eval_feedback(zeta, theta).dot(v);
    worst = std::min(worst, lhs - rho * v.squaredNorm() + rho_prime);
  };
  for (int k = 0; k < n_samples; ++k) {
    margin_at(theta_star + rng.direction(m) * (radius * rng.unit()));
    margin_at(theta_star + rng.direction(m) * radius);
  }
  // Structured probes: the prior itself and the segment toward it, where the
  // linear variant attains equality.
  margin_at(zeta.theta_bar);
  Vec to_bar = zeta.theta_bar - theta_star;
  if (to_bar.norm() > 0.0) {
    Vec dir = to_bar.normalized();
    for (double r = 0.0; r <= radius; r += radius / 16.0) {
      margin_at(theta_star + r * dir);
      margin_at(theta_star - r * dir);
    }
  }
  rep.margin = worst;
  rep.passed = worst >= -1e-9;
  rep.detail = "zeta(th).(th-th*) >= rho|th-th*|^2 - rho' on radius " +
               std::to_string(radius);
  return rep;
}

Vec adapt_rate(const AdaptLawSpec& law, const Vec& grad_w,
               const Vec& theta_or_z, double goal_value) {
  switch (law.family) {
    case LawFamily::Basic:
      return -(law.gain * grad_w);
    case LawFamily::Sigma:
    case LawFamily::Combined: {
      Vec inner = law.kappa * grad_w + eval_feedback(*law.feedback, theta_or_z);
      return -(law.gain * inner);
    }
    case LawFamily::Deadzone:
      if (goal_value >= law.deadzone) return -(law.gain * grad_w);
      return Vec::Zero(theta_or_z.size());
  }
  return Vec::Zero(theta_or_z.size());
}

CertificateReport verify_pseudogradient(const PseudoGradSpec& psi,
                                        const PlantSpec& plant,
                                        const GoalSpec& goal,
                                        const SampleDomain& dom) {
  CertificateReport rep;
  rep.name = "pseudograd_condition";
  Rng rng(dom.seed);
  double worst = std::numeric_limits<double>::infinity();
  for (int k = 0; k < dom.n_samples; ++k) {
    Vec x = rng.vector_in_cube(plant.state_dim, dom.state_radius);
    Vec th = rng.vector_in_cube(plant.param_dim, dom.param_radius);
    double t = rng.uniform(0.0, 10.0);
    double ip = psi.psi(x, t).dot(eval_speed_gradient(plant, goal, x, th, t));
    worst = std::min(worst, ip + 1e-9);
  }
  rep.margin = worst;
  rep.passed = worst >= 0.0;
  rep.detail = "psi(x,t).grad_theta w >= -1e-9 at sampled (x,theta,t)";
  return rep;
}

}  // namespace sg
