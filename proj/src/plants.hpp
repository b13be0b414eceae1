#pragma once

#include <vector>

#include "scenario.hpp"

namespace sg {

// One-dimensional plant xdot = (a + b theta) x used for the tightness
// checks: the ideal closed loop xdot = A* x, A* = a + b theta*, has the
// exact steady state |x| -> amplitude / |A*| under a constant disturbance.
struct ScalarAffinePlant {
  double a = 0.0;
  double b = 0.0;
  PlantSpec plant() const;
};

// Quadratic goal Q = 0.5 x'Hx.
GoalSpec quadratic_goal(const Mat& H);

// Linear plant xdot = A x + B u + f, y = L'x under output feedback u = th'y.
struct LinearOutputPlant {
  Mat A;          // n x n
  Mat B;          // n x 1 (scalar control input)
  Mat L;          // n x l
  Vec g;          // l, passification vector
  Vec theta_star; // l, ideal gains
  Vec theta_bar;  // l, prior estimate
  Mat H;          // n x n, symmetric positive definite goal weight

  int state_dim() const { return static_cast<int>(A.rows()); }
  int output_dim() const { return static_cast<int>(L.cols()); }

  Mat closed_loop_matrix(const Vec& theta) const;  // A + B theta' L'
  PlantSpec plant() const;   // parametrized by theta
  GoalSpec goal() const;
  void validate() const;
};

struct ScalarExample {
  ScalarAffinePlant plant_def;
  double theta_star = 0.0;
  ScenarioSpec frozen;          // theta held at theta*, constant disturbance
  ClassConstants constants;
  double delta_star = 0.0;      // (amplitude * alpha1 / alpha0)^{1/(1-sigma)}
};

// Scalar tightness family: Q = 0.5 x^2, constant full-amplitude disturbance,
// frozen comparison run at theta*. Requires a + b theta* < 0.
ScalarExample make_scalar_example(double a, double b, double theta_star,
                                  double delta_f);

struct AlignmentInfo {
  bool aligned = false;
  double residual = 0.0;  // |HB - c Lg|
  double scale = 0.0;     // best c
};

// Checks whether the prescribed direction (g.y) y equals grad_theta w, which
// requires HB = c Lg with c > 0.
AlignmentInfo surrogate_alignment(const LinearOutputPlant& plant);

std::function<Vec(const Vec& x, const Vec& theta, double t)>
make_surrogate_gradient(const Mat& L, const Vec& g);

struct OutputLawResult {
  AdaptLawSpec law;
  AlignmentInfo alignment;
  // (g.y) y, the prescribed adaptation direction; equals grad_theta w up to
  // a positive factor exactly when HB is aligned with Lg.
  std::function<Vec(const Vec& x, const Vec& theta, double t)> surrogate_gradient;
};

// Sigma-family output-feedback law u = theta'y,
// thetadot = -Gamma [kappa (g.y) y + alpha (theta - theta_bar)].
OutputLawResult adaptive_output_law(const LinearOutputPlant& plant,
                                    double kappa, double alpha,
                                    const Mat& gain);

// Solves (A + shift I)'H + H (A + shift I) = -I for symmetric positive
// definite H via the vectorized linear system. A + shift I must be Hurwitz.
Mat solve_lyapunov(const Mat& A_cl, double shift);

// -max Re eig(M); positive iff M is Hurwitz.
double stability_degree(const Mat& M);

// Stability degree of G(s) = sum_i g_i a_i(s); coefficients ascending.
// Returns +infinity for a nonzero constant G.
double numerator_stability_degree(const Vec& g,
                                  const std::vector<Vec>& a_poly);

inline Vec ideal_gain_high_gain(const Vec& g, double mu) { return -mu * g; }

struct ClassConstantsResult {
  ClassConstants constants;       // alpha0 exact (pencil), alpha1 = max of
                                  // analytic sqrt(2 lambda+) and sampled sup
  double sampled_alpha0 = 0.0;    // min over directions of -w/Q
  double sampled_alpha1 = 0.0;    // sup over directions of |Hx|/sqrt(Q)
  CertificateReport a4;           // w(x, theta*) <= -alpha0 Q(x)
  CertificateReport a5;           // |grad Q| <= alpha1 Q^sigma
};

// Constants of the class for Q = 0.5 x'Hx under the ideal closed loop A*:
// sigma = 0.5, alpha1 from lambda_max(H), alpha0 the largest rate with
// x'HA*x <= -alpha0 (0.5 x'Hx) for all x (generalized eigenvalue problem).
// Throws Error(Validation) when A* is not Hurwitz for this H (alpha0 <= 0).
ClassConstantsResult class_constants(const Mat& H, const Mat& A_star,
                                     int n_dirs = 1000,
                                     std::uint64_t seed = 11);

ClassConstantsResult class_constants(const LinearOutputPlant& plant,
                                     int n_dirs = 1000,
                                     std::uint64_t seed = 11);

}  // namespace sg
