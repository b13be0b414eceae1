#include "sim.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace sg {

LyapunovSpec::LyapunovSpec(Vec theta_star, double internal_gain,
                           const Mat& gain, double gamma,
                           std::function<Vec(const Vec&, double)> psi)
    : theta_star_(std::move(theta_star)),
      k_(internal_gain),
      gamma_(gamma),
      psi_(std::move(psi)),
      gain_llt_(gain) {
  if (k_ <= 0.0) {
    throw Error(ErrorKind::InvalidArgument, "Lyapunov internal gain must be > 0");
  }
  if (gain_llt_.info() != Eigen::Success) {
    throw Error(ErrorKind::InvalidArgument,
                "Lyapunov weight: gain matrix is not positive definite");
  }
}

double LyapunovSpec::value(const GoalSpec& goal, const Vec& x, const Vec& theta,
                           double t) const {
  Vec dev = theta - theta_star_;
  if (gamma_ != 0.0 && psi_) dev += gamma_ * psi_(x, t);
  // |v|^2 in the Gamma^-1 metric via the cached factorization.
  double weighted = dev.dot(gain_llt_.solve(dev));
  return goal.value(x) + weighted / (2.0 * k_);
}

namespace {

struct ClosedLoop {
  const ScenarioSpec& s;
  int n, m;
  bool combined;
  double gamma;

  explicit ClosedLoop(const ScenarioSpec& scenario)
      : s(scenario),
        n(scenario.plant.state_dim),
        m(scenario.plant.param_dim),
        combined(scenario.law.family == LawFamily::Combined &&
                 scenario.law.pseudograd.has_value()),
        gamma(combined ? scenario.law.pseudograd->gamma : 0.0) {}

  Vec theta_of(const Vec& x, const Vec& z, double t) const {
    if (!combined) return z;
    return z - gamma * s.law.pseudograd->psi(x, t);
  }

  // y = [x; z]
  Vec rhs(double t, const Vec& y) const {
    Vec x = y.head(n);
    Vec z = y.tail(m);
    Vec theta = theta_of(x, z, t);
    Vec f = eval_disturbance(s.disturbance, t, x);
    Vec out(n + m);
    out.head(n) = eval_dynamics(s.plant, x, theta, t, f);
    if (s.freeze_params) {
      out.tail(m).setZero();
      return out;
    }
    Vec grad = s.adaptation_gradient
                   ? s.adaptation_gradient(x, theta, t)
                   : eval_speed_gradient(s.plant, s.goal, x, theta, t);
    out.tail(m) = adapt_rate(s.law, grad, combined ? z : theta, s.goal.value(x));
    return out;
  }
};

}  // namespace

TrajectoryRecord integrate(const ScenarioSpec& scenario) {
  const ClosedLoop loop(scenario);
  const int n = loop.n, m = loop.m;
  const double h = scenario.sim.step;
  const long long n_steps = std::llround(scenario.sim.horizon / h);

  std::optional<LyapunovSpec> lyap;
  if (scenario.verify && scenario.verify->theta_star.size() == m) {
    double k = scenario.law.kappa;
    std::function<Vec(const Vec&, double)> psi;
    double gamma = 0.0;
    if (loop.combined) {
      psi = scenario.law.pseudograd->psi;
      gamma = loop.gamma;
    }
    lyap.emplace(scenario.verify->theta_star, k, scenario.law.gain, gamma, psi);
  }

  Vec y(n + m);
  y.head(n) = scenario.x0;
  y.tail(m) = scenario.theta0;
  if (loop.combined) {
    y.tail(m) += loop.gamma * scenario.law.pseudograd->psi(scenario.x0, 0.0);
  }

  TrajectoryRecord traj;
  const long long expected =
      n_steps / scenario.sim.record_stride + 2;
  traj.times.reserve(expected);
  traj.states.reserve(expected);
  traj.params.reserve(expected);
  traj.goal_values.reserve(expected);
  traj.speed_values.reserve(expected);

  auto record = [&](long long i, const Vec& state) {
    double t = i * h;
    Vec x = state.head(n);
    Vec theta = loop.theta_of(x, state.tail(m), t);
    traj.times.push_back(t);
    traj.states.push_back(x);
    traj.params.push_back(theta);
    traj.goal_values.push_back(scenario.goal.value(x));
    traj.speed_values.push_back(
        eval_speed(scenario.plant, scenario.goal, x, theta, t));
    if (lyap) {
      traj.lyapunov_values.push_back(lyap->value(scenario.goal, x, theta, t));
    }
  };

  record(0, y);
  Vec k1, k2, k3, k4;
  for (long long i = 0; i < n_steps; ++i) {
    const double t = i * h;
    try {
      k1 = loop.rhs(t, y);
      k2 = loop.rhs(t + 0.5 * h, y + (0.5 * h) * k1);
      k3 = loop.rhs(t + 0.5 * h, y + (0.5 * h) * k2);
      k4 = loop.rhs(t + h, y + h * k3);
      y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      if (!y.allFinite()) throw BlowupError((i + 1) * h);
      if ((i + 1) % scenario.sim.record_stride == 0 || i + 1 == n_steps) {
        record(i + 1, y);
        if (!std::isfinite(traj.goal_values.back()) ||
            !std::isfinite(traj.speed_values.back()) ||
            (lyap && !std::isfinite(traj.lyapunov_values.back()))) {
          throw BlowupError((i + 1) * h);
        }
      }
    } catch (const BlowupError&) {
      throw;
    } catch (const Error& e) {
      // Overflow in the field or the derived values surfaces as a generic
      // non-finite rejection; during integration it means the loop blew up.
      if (e.kind() == ErrorKind::Validation) throw BlowupError(t);
      throw;
    }
  }
  return traj;
}

namespace {

double tail_max(const TrajectoryRecord& traj, double tail_fraction,
                const std::function<double(std::size_t)>& value) {
  if (traj.size() == 0) {
    throw Error(ErrorKind::InvalidArgument, "tail_sup of an empty trajectory");
  }
  const double start = (1.0 - tail_fraction) * traj.final_time();
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.times[i] >= start) best = std::max(best, value(i));
  }
  return best;
}

}  // namespace

double tail_sup(const TrajectoryRecord& traj, double tail_fraction) {
  return tail_max(traj, tail_fraction,
                  [&](std::size_t i) { return traj.goal_values[i]; });
}

double tail_sup_state_norm(const TrajectoryRecord& traj, double tail_fraction) {
  return tail_max(traj, tail_fraction,
                  [&](std::size_t i) { return traj.states[i].norm(); });
}

CertificateReport check_lyapunov_decay(const TrajectoryRecord& traj,
                                       const LyapunovSpec& lyap,
                                       const GoalSpec& goal, double alpha,
                                       double beta) {
  if (alpha <= 0.0) {
    throw Error(ErrorKind::InvalidArgument, "decay rate alpha must be > 0");
  }
  CertificateReport rep;
  rep.name = "lyapunov_decay";
  const double v0 = traj.has_lyapunov()
                        ? traj.lyapunov_values.front()
                        : lyap.value(goal, traj.states.front(),
                                     traj.params.front(), traj.times.front());
  const double tol = 1e-6 * (1.0 + v0);
  double worst = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < traj.size(); ++i) {
    double v = traj.has_lyapunov()
                   ? traj.lyapunov_values[i]
                   : lyap.value(goal, traj.states[i], traj.params[i],
                                traj.times[i]);
    double decay = std::exp(-alpha * traj.times[i]);
    double bound = v0 * decay + (beta / alpha) * (1.0 - decay) + tol;
    worst = std::min(worst, bound - v);
  }
  rep.margin = worst;
  rep.passed = worst >= 0.0;
  rep.detail = "V(t) <= V(0) e^{-a t} + (b/a)(1-e^{-a t}) + tol, a=" +
               std::to_string(alpha) + " b=" + std::to_string(beta);
  return rep;
}

bool boundedness_check(const TrajectoryRecord& traj, double bound) {
  if (bound <= 0.0) {
    throw Error(ErrorKind::InvalidArgument, "boundedness bound must be > 0");
  }
  for (std::size_t i = 0; i < traj.size(); ++i) {
    if (traj.states[i].norm() + traj.params[i].norm() > bound) return false;
  }
  return true;
}

void write_csv(const TrajectoryRecord& traj, std::ostream& out) {
  const int n = traj.states.empty() ? 0 : static_cast<int>(traj.states[0].size());
  const int m = traj.params.empty() ? 0 : static_cast<int>(traj.params[0].size());
  out << "t";
  for (int i = 1; i <= n; ++i) out << ",x" << i;
  for (int i = 1; i <= m; ++i) out << ",theta" << i;
  out << ",Q,w";
  if (traj.has_lyapunov()) out << ",V";
  out << "\n";
  char buf[32];
  auto put = [&](double v, char sep) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << sep;
  };
  for (std::size_t r = 0; r < traj.size(); ++r) {
    put(traj.times[r], ',');
    for (int i = 0; i < n; ++i) put(traj.states[r][i], ',');
    for (int i = 0; i < m; ++i) put(traj.params[r][i], ',');
    put(traj.goal_values[r], ',');
    if (traj.has_lyapunov()) {
      put(traj.speed_values[r], ',');
      put(traj.lyapunov_values[r], '\n');
    } else {
      put(traj.speed_values[r], '\n');
    }
  }
}

}  // namespace sg
