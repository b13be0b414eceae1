#pragma once

#include <Eigen/Cholesky>
#include <iosfwd>
#include <vector>

#include "scenario.hpp"

namespace sg {

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<Vec> states;          // x
  std::vector<Vec> params;          // theta
  std::vector<double> goal_values;  // Q(x)
  std::vector<double> speed_values; // w(x, theta, t)
  std::vector<double> lyapunov_values;  // optional, same length when present

  std::size_t size() const { return times.size(); }
  bool has_lyapunov() const { return !lyapunov_values.empty(); }
  double final_time() const { return times.empty() ? 0.0 : times.back(); }
};

// V(x, theta, t) = Q(x) + (2k)^-1 |theta - theta* + gamma psi(x,t)|^2 in the
// Gamma^-1 metric. The Cholesky factor of Gamma is taken once at setup.
class LyapunovSpec {
 public:
  LyapunovSpec(Vec theta_star, double internal_gain, const Mat& gain,
               double gamma = 0.0,
               std::function<Vec(const Vec&, double)> psi = {});

  double value(const GoalSpec& goal, const Vec& x, const Vec& theta,
               double t) const;

  double internal_gain() const { return k_; }

 private:
  Vec theta_star_;
  double k_;
  double gamma_;
  std::function<Vec(const Vec&, double)> psi_;
  Eigen::LLT<Mat> gain_llt_;
};

// Classical fixed-step 4th order integration of the augmented closed loop
// (x, z). Discontinuous right-hand sides are evaluated pointwise at the
// stage points; no event detection. Throws BlowupError on non-finite states.
TrajectoryRecord integrate(const ScenarioSpec& scenario);

// Max of Q over recorded samples with t >= (1 - tail_fraction) * T: the
// artifact's estimator of the limit superior.
double tail_sup(const TrajectoryRecord& traj, double tail_fraction);

// Same estimator applied to |x|.
double tail_sup_state_norm(const TrajectoryRecord& traj, double tail_fraction);

// Verifies V(t_i) <= V(0) e^{-alpha t_i} + (beta/alpha)(1 - e^{-alpha t_i})
// + 1e-6 (1 + V(0)) at every recorded sample.
CertificateReport check_lyapunov_decay(const TrajectoryRecord& traj,
                                       const LyapunovSpec& lyap,
                                       const GoalSpec& goal, double alpha,
                                       double beta);

// true iff max over samples of |x| + |theta| <= bound.
bool boundedness_check(const TrajectoryRecord& traj, double bound);

// Header t,x1..xn,theta1..thetam,Q,w[,V]; one row per sample; full double
// precision (17 significant digits).
void write_csv(const TrajectoryRecord& traj, std::ostream& out);

}  // namespace sg
