// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Usage: acceptance [cli_path [scenario_dir [work_dir]]].
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "plants.hpp"
#include "scenario_io.hpp"

using namespace sg;
namespace fs = std::filesystem;

namespace {

std::string g_cli = "sgcert";
std::string g_scenarios = "scenarios";
std::string g_work = "acceptance_out";
int g_failures = 0;

void report(int index, const std::string& name, bool passed,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s%s%s\n", passed ? "PASS" : "FAIL", index,
              name.c_str(), detail.empty() ? "" : " -- ", detail.c_str());
  if (!passed) ++g_failures;
}

void run_criterion(int index, const std::string& name,
                   const std::function<bool(std::string&)>& body) {
  std::string detail;
  bool passed = false;
  try {
    passed = body(detail);
  } catch (const std::exception& e) {
    detail = std::string("exception: ") + e.what();
  }
  report(index, name, passed, detail);
}

ScenarioFileData load(const std::string& name) {
  return load_scenario_file(g_scenarios + "/" + name);
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double max_param_norm(const TrajectoryRecord& traj) {
  double worst = 0.0;
  for (const auto& p : traj.params) worst = std::max(worst, p.norm());
  return worst;
}

int run_cli(const std::string& args) {
  std::string cmd = "\"" + g_cli + "\" " + args;
  return std::system(cmd.c_str());
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

// --- criterion bodies -------------------------------------------------------

bool undisturbed_convergence(std::string& detail) {
  ScenarioSpec s = load("scalar_basic.scn").assemble();
  TrajectoryRecord traj = integrate(s);
  double q_final = traj.goal_values.back();
  double theta_max = max_param_norm(traj);
  detail = "Q(T) = " + num(q_final) + ", max |theta| = " + num(theta_max);
  return q_final < 1e-6 && theta_max <= 10.0;
}

bool proposition1_tightness(std::string& detail) {
  ScenarioSpec frozen = load("scalar_frozen.scn").assemble();
  Prop1Report rep = proposition1_certificate(frozen, 1000);
  double lo = 0.98 * rep.delta_star;
  double hi = 1.02 * rep.delta_star;
  detail = "tail-sup Q = " + num(rep.measured_tail_q) + " vs delta* = " +
           num(rep.delta_star) + ", grid margin = " + num(rep.grid_check.margin);
  return rep.measured_tail_q >= lo && rep.measured_tail_q <= hi &&
         rep.grid_check.margin >= -1e-12;
}

bool epsilon_optimality(std::string& detail) {
  ScenarioSpec s = load("scalar_sigma.scn").assemble();
  const ClassConstants& cc = *s.verify->constants;
  double eps = s.verify->epsilon;
  NfConstants nf = nf_constants(*s.law.feedback, s.verify->theta_star);
  double k0 = min_gain_k0(nf.rho_prime, eps, cc.alpha0, cc.sigma);
  if (std::abs(nf.rho - 1.0) > 1e-12 || std::abs(nf.rho_prime - 4.0) > 1e-12 ||
      std::abs(k0 - 16.0) > 1e-12 || std::abs(s.law.kappa - 1.5 * k0) > 1e-12) {
    detail = "constants drifted: rho=" + num(nf.rho) + " rho'=" +
             num(nf.rho_prime) + " k0=" + num(k0);
    return false;
  }
  double alpha = cc.alpha0 * (1.0 - cc.sigma);
  if (s.sim.horizon < 10.0 / alpha) {
    detail = "horizon below 10 / (alpha0 (1-sigma))";
    return false;
  }
  TrajectoryRecord traj = integrate(s);
  double tail_q = tail_sup(traj, s.sim.tail_fraction);
  double delta_star = optimum_estimate(cc.alpha0, cc.alpha1, cc.sigma,
                                       s.disturbance.amplitude);
  double bound_eps = delta_star + eps;
  double corollary =
      corollary_bound(delta_star, nf.rho_prime, s.law.kappa, cc.alpha0, cc.sigma);

  // Bound from the decay inequality itself: V never exceeds V(0) + beta/alpha.
  double beta = nf.rho_prime / s.law.kappa + alpha * delta_star;
  LyapunovSpec lyap(s.verify->theta_star, s.law.kappa, s.law.gain);
  double v0 = lyap.value(s.goal, s.x0, s.theta0, 0.0);
  double v_max = v0 + beta / alpha;
  double bound_m = std::sqrt(2.0 * v_max) + s.verify->theta_star.norm() +
                   std::sqrt(2.0 * s.law.kappa * v_max);
  bool bounded = boundedness_check(traj, bound_m);

  detail = "tail-sup Q = " + num(tail_q) + " vs delta*+eps = " +
           num(bound_eps) + ", corollary = " + num(corollary);
  return bounded && tail_q <= 1.02 * bound_eps && tail_q <= 1.02 * corollary;
}

bool corollary_monotonicity(std::string& detail) {
  fs::path out = fs::path(g_work) / "sweep";
  fs::remove_all(out);
  if (run_cli("run \"" + g_scenarios + "/sweep_kappa.mfs\" --out \"" +
              out.string() + "\" --jobs 2") != 0) {
    detail = "cli sweep failed";
    return false;
  }
  std::ifstream in(out / "summary.csv");
  std::string line;
  std::getline(in, line);  // magic
  std::getline(in, line);  // header
  std::vector<double> tails, corollaries;
  while (std::getline(in, line)) {
    std::stringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() < 10) continue;
    corollaries.push_back(std::strtod(cells[4].c_str(), nullptr));
    tails.push_back(std::strtod(cells[6].c_str(), nullptr));
  }
  if (tails.size() != 4) {
    detail = "expected 4 sweep rows, got " + std::to_string(tails.size());
    return false;
  }
  bool ok = true;
  for (std::size_t i = 0; i < tails.size(); ++i) {
    if (tails[i] > corollaries[i]) ok = false;
    if (i > 0 && tails[i] > 1.02 * tails[i - 1]) ok = false;
  }
  detail = "tails = {" + num(tails[0]) + ", " + num(tails[1]) + ", " +
           num(tails[2]) + ", " + num(tails[3]) + "}";
  return ok;
}

bool deadzone_theorem(std::string& detail) {
  ScenarioFileData data = load("scalar_deadzone.scn");
  ScenarioSpec s = data.assemble();
  const ClassConstants& cc = *s.verify->constants;
  double delta_star = optimum_estimate(cc.alpha0, cc.alpha1, cc.sigma,
                                       s.disturbance.amplitude);
  if (std::abs(s.law.deadzone - 1.2 * delta_star) > 1e-9) {
    detail = "shipped delta is not 1.2 delta*";
    return false;
  }
  if (!deadzone_applicability(s.law.deadzone, delta_star)) {
    detail = "applicability check rejected delta > delta*";
    return false;
  }
  TrajectoryRecord traj = integrate(s);
  double tail_q = tail_sup(traj, s.sim.tail_fraction);
  bool bounded = boundedness_check(traj, 50.0);

  // Below delta* the certificate must flag inapplicability.
  data.override_parameter("delta", 0.8 * delta_star);
  ScenarioSpec bad = data.assemble();
  BoundReport rep = make_bound_report(bad, nullptr);
  bool flagged = false;
  for (const auto& c : rep.conditions) {
    if (c.name == "deadzone_applicable" && !c.passed) flagged = true;
  }
  detail = "tail-sup Q = " + num(tail_q) + " vs delta = " + num(s.law.deadzone) +
           (flagged ? ", inapplicable case flagged" : ", flag missing");
  return bounded && tail_q <= 1.02 * s.law.deadzone && flagged;
}

bool linear_example(std::string& detail) {
  bool ok = true;
  detail.clear();
  for (const char* kind : {"constant", "sinusoid", "random"}) {
    ScenarioFileData data = load("linear2_sigma.scn");
    data.disturbance_kind = kind;
    if (std::string(kind) == "random") data.seed = 42;
    ScenarioSpec s = data.assemble();

    const ClassConstants& cc = *s.verify->constants;
    NfConstants nf = nf_constants(*s.law.feedback, s.verify->theta_star);
    auto gains = check_gain_conditions(s.law, nf.rho, nf.rho_prime, cc.alpha0,
                                       cc.sigma, s.verify->epsilon,
                                       &s.verify->theta_star);
    for (const auto& c : gains) ok = ok && c.passed;

    TrajectoryRecord traj = integrate(s);
    double tail_x = tail_sup_state_norm(traj, s.sim.tail_fraction);
    double bound = error_bound_linear(s.linear->lambda_plus,
                                      s.linear->lambda_minus,
                                      s.disturbance.amplitude,
                                      s.linear->sigma_decay,
                                      s.verify->epsilon)
                       .value;
    if (!detail.empty()) detail += "; ";
    detail += std::string(kind) + ": " + num(tail_x) + " <= " + num(bound);
    ok = ok && tail_x <= bound;
  }
  return ok;
}

bool lyapunov_decay_certificate(std::string& detail) {
  ScenarioSpec s = load("scalar_sigma.scn").assemble();
  const ClassConstants& cc = *s.verify->constants;
  NfConstants nf = nf_constants(*s.law.feedback, s.verify->theta_star);
  double alpha = cc.alpha0 * (1.0 - cc.sigma);
  double delta_star = optimum_estimate(cc.alpha0, cc.alpha1, cc.sigma,
                                       s.disturbance.amplitude);
  double beta = nf.rho_prime / s.law.kappa + alpha * delta_star;
  TrajectoryRecord traj = integrate(s);
  LyapunovSpec lyap(s.verify->theta_star, s.law.kappa, s.law.gain);
  CertificateReport rep = check_lyapunov_decay(traj, lyap, s.goal, alpha, beta);
  detail = "alpha = " + num(alpha) + ", beta = " + num(beta) +
           ", worst margin = " + num(rep.margin);
  return rep.passed;
}

bool certificate_suite(std::string& detail) {
  const char* names[] = {"scalar_basic.scn",      "scalar_frozen.scn",
                         "scalar_sigma.scn",      "scalar_sigma_ball.scn",
                         "scalar_sigma_relay.scn", "scalar_deadzone.scn",
                         "scalar_combined.scn",   "linear2_sigma.scn"};
  bool saw_nf[3] = {false, false, false};
  for (const char* name : names) {
    ScenarioSpec s = load(name).assemble();
    BoundReport rep = make_bound_report(s, nullptr);
    for (const auto& c : rep.conditions) {
      if (!c.passed && !c.warning_only) {
        detail = std::string(name) + ": " + c.name + " failed (" + c.detail + ")";
        return false;
      }
      if (c.name == "nf_condition" && s.law.feedback) {
        saw_nf[static_cast<int>(s.law.feedback->variant)] = true;
      }
    }
  }
  if (!(saw_nf[0] && saw_nf[1] && saw_nf[2])) {
    detail = "not all feedback variants were NF-verified";
    return false;
  }
  detail = "gradient, growth, convexity, A4/A5, NF (linear/ball/relay), "
           "pseudogradient all green on 8 scenarios";
  return true;
}

bool numerics(std::string& detail) {
  // (a) step-halving ratio on the smooth sigma scenario
  ScenarioSpec base = load("scalar_sigma.scn").assemble();
  base.sim.horizon = 5.0;
  base.sim.record_stride = 1;
  auto terminal = [&](double h) {
    ScenarioSpec run = base;
    run.sim.step = h;
    TrajectoryRecord traj = integrate(run);
    Vec y(2);
    y << traj.states.back()[0], traj.params.back()[0];
    return y;
  };
  Vec y1 = terminal(0.04), y2 = terminal(0.02), y3 = terminal(0.01);
  double ratio = (y1 - y2).norm() / (y2 - y3).norm();
  bool ratio_ok = ratio >= 8.0 && ratio <= 32.0;

  // (b) Lyapunov solve residual on the two-state ideal loop
  Mat A(2, 2);
  A << 0, 1, -12, -12;
  double shift = 0.9 * stability_degree(A);
  Mat H = solve_lyapunov(A, shift);
  Mat M = A + shift * Mat::Identity(2, 2);
  double residual = (M.transpose() * H + H * M + Mat::Identity(2, 2)).norm();
  bool residual_ok = residual <= 1e-10 * H.norm();

  // (c) byte-identical rerun of a seeded manifest through the CLI
  fs::path out_a = fs::path(g_work) / "rerun_a";
  fs::path out_b = fs::path(g_work) / "rerun_b";
  fs::remove_all(out_a);
  fs::remove_all(out_b);
  bool rerun_ok =
      run_cli("run \"" + g_scenarios + "/sweep_kappa.mfs\" --out \"" +
              out_a.string() + "\" --jobs 2") == 0 &&
      run_cli("run \"" + g_scenarios + "/sweep_kappa.mfs\" --out \"" +
              out_b.string() + "\"") == 0;
  std::size_t compared = 0;
  if (rerun_ok) {
    for (const auto& entry : fs::directory_iterator(out_a)) {
      if (entry.path().filename() == "run.log") continue;  // timings
      ++compared;
      if (slurp(entry.path()) != slurp(out_b / entry.path().filename())) {
        rerun_ok = false;
        detail = "mismatch in " + entry.path().filename().string();
      }
    }
    rerun_ok = rerun_ok && compared >= 9;  // 4 traj + 4 reports + summary
  }

  if (detail.empty()) {
    detail = "ratio = " + num(ratio) + ", residual = " + num(residual) + ", " +
             std::to_string(compared) + " artifacts byte-identical";
  }
  return ratio_ok && residual_ok && rerun_ok;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];
  if (argc > 2) g_scenarios = argv[2];
  if (argc > 3) g_work = argv[3];
  fs::create_directories(g_work);

  run_criterion(1, "undisturbed speed-gradient convergence",
                undisturbed_convergence);
  run_criterion(2, "frozen-parameter tightness of the optimum estimate",
                proposition1_tightness);
  run_criterion(3, "estimated epsilon-optimality of the sigma law",
                epsilon_optimality);
  run_criterion(4, "limit bound monotone in the internal gain",
                corollary_monotonicity);
  run_criterion(5, "deadzone law respects its level", deadzone_theorem);
  run_criterion(6, "linear output-feedback state error bound", linear_example);
  run_criterion(7, "Lyapunov decay certificate", lyapunov_decay_certificate);
  run_criterion(8, "certificate suite on shipped scenarios", certificate_suite);
  run_criterion(9, "integration order, solver residual, reproducibility",
                numerics);

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
