#include "plants.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>

#include "rng.hpp"

namespace sg {

PlantSpec ScalarAffinePlant::plant() const {
  PlantSpec p;
  p.state_dim = 1;
  p.param_dim = 1;
  double a_ = a, b_ = b;
  p.dynamics = [a_, b_](const Vec& x, const Vec& theta, double) {
    Vec out(1);
    out[0] = (a_ + b_ * theta[0]) * x[0];
    return out;
  };
  p.param_jacobian = [b_](const Vec& x, const Vec&, double) {
    Mat jac(1, 1);
    jac(0, 0) = b_ * x[0];
    return jac;
  };
  return p;
}

GoalSpec quadratic_goal(const Mat& H) {
  GoalSpec goal;
  Mat Hc = H;
  goal.value = [Hc](const Vec& x) { return 0.5 * x.dot(Hc * x); };
  goal.gradient = [Hc](const Vec& x) { return Vec(Hc * x); };
  return goal;
}

Mat LinearOutputPlant::closed_loop_matrix(const Vec& theta) const {
  return A + B * theta.transpose() * L.transpose();
}

void LinearOutputPlant::validate() const {
  const int n = state_dim();
  const int l = output_dim();
  if (A.rows() != n || A.cols() != n) {
    throw Error(ErrorKind::Validation, "A must be square");
  }
  if (B.rows() != n || B.cols() != 1) {
    throw Error(ErrorKind::Validation, "B must be n x 1 (scalar input)");
  }
  if (L.rows() != n) {
    throw Error(ErrorKind::Validation, "L must have n rows");
  }
  if (g.size() != l || theta_star.size() != l || theta_bar.size() != l) {
    throw Error(ErrorKind::Validation,
                "g, theta_star, theta_bar must match the output dimension");
  }
  if (H.rows() != n || H.cols() != n) {
    throw Error(ErrorKind::Validation, "H must be n x n");
  }
  if ((H - H.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * (1.0 + H.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::Validation, "H is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorKind::Validation, "H is not positive definite");
  }
  if (stability_degree(closed_loop_matrix(theta_star)) <= 0.0) {
    throw Error(ErrorKind::Validation,
                "ideal closed loop A + B theta*' L' is not Hurwitz");
  }
}

PlantSpec LinearOutputPlant::plant() const {
  PlantSpec p;
  p.state_dim = state_dim();
  p.param_dim = output_dim();
  Mat A_ = A, B_ = B, L_ = L;
  p.dynamics = [A_, B_, L_](const Vec& x, const Vec& theta, double) {
    Vec y = L_.transpose() * x;
    return Vec(A_ * x + B_ * (theta.dot(y)));
  };
  p.param_jacobian = [B_, L_](const Vec& x, const Vec&, double) {
    Vec y = L_.transpose() * x;
    return Mat(B_ * y.transpose());
  };
  return p;
}

GoalSpec LinearOutputPlant::goal() const { return quadratic_goal(H); }

ScalarExample make_scalar_example(double a, double b, double theta_star,
                                  double delta_f) {
  if (b == 0.0) {
    throw Error(ErrorKind::InvalidArgument,
                "scalar example needs b != 0 for attainability");
  }
  if (delta_f < 0.0) {
    throw Error(ErrorKind::InvalidArgument, "delta_f must be >= 0");
  }
  ScalarExample ex;
  ex.plant_def = ScalarAffinePlant{a, b};
  ex.theta_star = theta_star;
  const double a_star = a + b * theta_star;
  if (a_star >= 0.0) {
    throw Error(ErrorKind::InvalidArgument,
                "a + b theta* must be negative (attainability)");
  }
  Mat H = Mat::Identity(1, 1);
  Mat A_star(1, 1);
  A_star(0, 0) = a_star;
  auto cc = class_constants(H, A_star);
  ex.constants = cc.constants;
  ex.delta_star = std::pow(
      delta_f * ex.constants.alpha1 / ex.constants.alpha0,
      1.0 / (1.0 - ex.constants.sigma));

  ScenarioSpec s;
  s.name = "scalar_frozen";
  s.plant = ex.plant_def.plant();
  s.goal = quadratic_goal(H);
  s.goal.constants = ex.constants;
  s.disturbance.kind = delta_f > 0.0 ? DisturbanceKind::ConstantVector
                                     : DisturbanceKind::Zero;
  s.disturbance.amplitude = delta_f;
  s.disturbance.direction = Vec::Ones(1);
  s.law.family = LawFamily::Basic;
  s.law.gain = Mat::Identity(1, 1);
  s.x0 = Vec::Ones(1);
  s.theta0 = Vec::Constant(1, theta_star);
  s.freeze_params = true;
  s.sim.step = 1e-3;
  s.sim.horizon = 30.0;
  s.sim.record_stride = 10;
  VerifySpec v;
  v.theta_star = Vec::Constant(1, theta_star);
  v.constants = ex.constants;
  s.verify = v;
  finalize_scenario(s);
  ex.frozen = std::move(s);
  return ex;
}

AlignmentInfo surrogate_alignment(const LinearOutputPlant& plant) {
  // grad_theta w = (B'Hx) y; the prescribed (g.y) y matches it exactly when
  // HB = c Lg with c > 0.
  AlignmentInfo info;
  Vec hb = plant.H * plant.B.col(0);
  Vec lg = plant.L * plant.g;
  double denom = lg.squaredNorm();
  info.scale = denom > 0.0 ? hb.dot(lg) / denom : 0.0;
  info.residual = (hb - info.scale * lg).norm();
  info.aligned =
      info.scale > 0.0 && info.residual <= 1e-9 * std::max(1.0, hb.norm());
  return info;
}

std::function<Vec(const Vec&, const Vec&, double)> make_surrogate_gradient(
    const Mat& L, const Vec& g) {
  Mat L_ = L;
  Vec g_ = g;
  return [L_, g_](const Vec& x, const Vec&, double) {
    Vec y = L_.transpose() * x;
    return Vec(g_.dot(y) * y);
  };
}

OutputLawResult adaptive_output_law(const LinearOutputPlant& plant,
                                    double kappa, double alpha,
                                    const Mat& gain) {
  plant.validate();
  OutputLawResult out;
  out.law.family = LawFamily::Sigma;
  out.law.gain = gain;
  out.law.kappa = kappa;
  FeedbackSpec zeta;
  zeta.variant = FeedbackVariant::Linear;
  zeta.alpha = alpha;
  zeta.theta_bar = plant.theta_bar;
  out.law.feedback = zeta;
  validate_law(out.law, plant.output_dim());
  out.alignment = surrogate_alignment(plant);
  out.surrogate_gradient = make_surrogate_gradient(plant.L, plant.g);
  return out;
}

Mat solve_lyapunov(const Mat& A_cl, double shift) {
  const int n = static_cast<int>(A_cl.rows());
  if (A_cl.cols() != n) {
    throw Error(ErrorKind::InvalidArgument, "solve_lyapunov: matrix not square");
  }
  Mat M = A_cl + shift * Mat::Identity(n, n);
  if (stability_degree(M) <= 0.0) {
    throw Error(ErrorKind::Validation,
                "solve_lyapunov: shifted matrix is not Hurwitz, no solution");
  }
  // vec(M'H) + vec(HM) = (I (x) M' + M' (x) I) vec(H) = -vec(I)
  Mat K = Mat::Zero(n * n, n * n);
  Mat Mt = M.transpose();
  for (int i = 0; i < n; ++i) {
    K.block(i * n, i * n, n, n) += Mt;               // I (x) M'
    for (int j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) +=
          Mt(i, j) * Mat::Identity(n, n);            // M' (x) I
    }
  }
  Vec rhs = Vec::Zero(n * n);
  for (int i = 0; i < n; ++i) rhs[i * n + i] = -1.0;
  Vec h = K.partialPivLu().solve(rhs);
  Mat H = Eigen::Map<Mat>(h.data(), n, n);
  H = 0.5 * (H + H.transpose());

  double residual = (M.transpose() * H + H * M + Mat::Identity(n, n)).norm();
  if (residual > 1e-10 * H.norm()) {
    throw Error(ErrorKind::Internal,
                "solve_lyapunov: residual " + std::to_string(residual) +
                    " exceeds tolerance");
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(H);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorKind::Internal, "solve_lyapunov: H not positive definite");
  }
  return H;
}

double stability_degree(const Mat& M) {
  Eigen::EigenSolver<Mat> es(M, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::Internal, "eigenvalue iteration failed");
  }
  return -es.eigenvalues().real().maxCoeff();
}

double numerator_stability_degree(const Vec& g,
                                  const std::vector<Vec>& a_poly) {
  if (static_cast<std::size_t>(g.size()) != a_poly.size()) {
    throw Error(ErrorKind::InvalidArgument,
                "numerator_stability_degree: g and a(s) sizes differ");
  }
  Eigen::Index max_len = 0;
  for (const Vec& p : a_poly) max_len = std::max(max_len, p.size());
  Vec coeffs = Vec::Zero(max_len);
  for (std::size_t i = 0; i < a_poly.size(); ++i) {
    coeffs.head(a_poly[i].size()) += g[i] * a_poly[i];
  }
  double scale = coeffs.cwiseAbs().maxCoeff();
  if (scale == 0.0) {
    throw Error(ErrorKind::InvalidArgument, "g'a(s) is identically zero");
  }
  Eigen::Index degree = coeffs.size() - 1;
  while (degree > 0 && std::abs(coeffs[degree]) <= 1e-12 * scale) --degree;
  if (degree == 0) return std::numeric_limits<double>::infinity();

  Mat companion = Mat::Zero(degree, degree);
  for (Eigen::Index i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < degree; ++i) {
    companion(i, degree - 1) = -coeffs[i] / coeffs[degree];
  }
  return stability_degree(companion);
}

ClassConstantsResult class_constants(const Mat& H, const Mat& A_star,
                                     int n_dirs, std::uint64_t seed) {
  const int n = static_cast<int>(H.rows());
  ClassConstantsResult res;
  res.constants.sigma = 0.5;

  Eigen::SelfAdjointEigenSolver<Mat> esH(H);
  const double lambda_plus = esH.eigenvalues().maxCoeff();
  if (esH.eigenvalues().minCoeff() <= 0.0) {
    throw Error(ErrorKind::Validation, "class_constants: H not positive definite");
  }

  // alpha0: largest rate with x'HA*x <= -alpha0 0.5 x'Hx for all x, i.e.
  // -lambda_max of the pencil (HA* + A*'H, H).
  Mat S = H * A_star + A_star.transpose() * H;
  Eigen::GeneralizedSelfAdjointEigenSolver<Mat> pencil(S, H);
  res.constants.alpha0 = -pencil.eigenvalues().maxCoeff();
  if (res.constants.alpha0 <= 0.0) {
    throw Error(ErrorKind::Validation,
                "attainability fails: no positive decay rate for this (H, A*)");
  }

  // alpha1: both the analytic value for Q = 0.5 x'Hx and a sampled sup of
  // |Hx| / Q^{1/2}; the larger is kept (they agree for quadratics).
  const double analytic_alpha1 = std::sqrt(2.0 * lambda_plus);
  Rng rng(seed);
  double sampled_a1 = 0.0;
  double sampled_a0 = std::numeric_limits<double>::infinity();
  for (int k = 0; k < n_dirs; ++k) {
    Vec x = rng.direction(n);
    double q = 0.5 * x.dot(H * x);
    sampled_a1 = std::max(sampled_a1, (H * x).norm() / std::sqrt(q));
    sampled_a0 = std::min(sampled_a0, -x.dot(H * (A_star * x)) / q);
  }
  res.sampled_alpha1 = sampled_a1;
  res.sampled_alpha0 = sampled_a0;
  res.constants.alpha1 = std::max(analytic_alpha1, sampled_a1);

  res.a4.name = "a4_attainability";
  res.a4.margin = sampled_a0 - res.constants.alpha0;
  res.a4.passed = res.a4.margin >= -1e-9 * res.constants.alpha0;
  res.a4.detail = "sampled min of -w/Q vs pencil alpha0=" +
                  std::to_string(res.constants.alpha0);

  res.a5.name = "a5_grad_growth";
  res.a5.margin = res.constants.alpha1 - sampled_a1;
  res.a5.passed = res.a5.margin >= -1e-9 * res.constants.alpha1;
  res.a5.detail = "|grad Q| <= alpha1 Q^0.5 over " + std::to_string(n_dirs) +
                  " directions, alpha1=" + std::to_string(res.constants.alpha1);
  return res;
}

ClassConstantsResult class_constants(const LinearOutputPlant& plant,
                                     int n_dirs, std::uint64_t seed) {
  return class_constants(plant.H, plant.closed_loop_matrix(plant.theta_star),
                         n_dirs, seed);
}

}  // namespace sg
