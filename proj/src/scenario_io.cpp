#include "scenario_io.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kvtext.hpp"

namespace sg {

namespace {

const std::map<std::string, std::vector<std::string>> kSchema = {
    {"", {"name"}},
    {"plant", {"kind", "a", "b", "A", "B", "L", "g", "theta_bar"}},
    {"goal", {"kind", "H", "construction", "shift_factor"}},
    {"disturbance",
     {"kind", "amplitude", "direction", "omega", "phase", "seed"}},
    {"law", {"family", "Gamma", "kappa", "delta", "use_true_gradient"}},
    {"law.feedback", {"variant", "alpha", "theta_bar", "d", "amplitude"}},
    {"law.pseudograd", {"kind", "gamma", "theta_ref"}},
    {"init", {"x0", "theta0", "freeze_params"}},
    {"sim",
     {"step", "horizon", "record_stride", "tail_fraction",
      "max_step_discontinuous"}},
    {"verify",
     {"theta_star", "mu", "epsilon", "alpha0", "alpha1", "sigma", "nf_radius",
      "nf_samples", "seed"}},
};

std::uint64_t to_seed(double v, const KvDoc& doc, const std::string& section) {
  if (v < 0.0 || v != std::floor(v)) {
    doc.fail(section, "seed", "seed must be a nonnegative integer");
  }
  return static_cast<std::uint64_t>(v);
}

// Plain numeric CSV, row-major, '#' comments allowed.
Mat load_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open matrix file: " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    bool blank = line.find_first_not_of(" \t\r,") == std::string::npos;
    if (blank) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      double v = std::strtod(cell.c_str(), &end);
      while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
      if (end == cell.c_str() || (end && *end != '\0')) {
        throw Error(ErrorKind::Parse, path + ":" + std::to_string(line_no) +
                                          ": bad number '" + cell + "'");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorKind::Parse,
                  path + ":" + std::to_string(line_no) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::Parse, path + ": empty matrix");
  Mat m(rows.size(), rows.front().size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

// A matrix key may point at an external file: `A = csv:plant_A.csv`
// (resolved against the scenario's directory).
Mat read_matrix(const KvDoc& doc, const std::string& section,
                const std::string& key, const std::string& base_dir) {
  const KvDoc::Value* v = doc.find(section, key);
  if (v != nullptr && v->type == KvDoc::Value::Type::String) {
    if (v->text.rfind("csv:", 0) != 0) {
      doc.fail(section, key, "expected a matrix or a 'csv:<path>' reference");
    }
    std::filesystem::path p = v->text.substr(4);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return load_matrix_csv(p.string());
  }
  return doc.matrix(section, key);
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_vector(const Vec& v) {
  std::string out = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_number(v[i]);
  }
  return out + "]";
}

std::string format_matrix(const Mat& m) {
  std::string out = "[";
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    if (r > 0) out += ", ";
    out += format_vector(m.row(r));
  }
  return out + "]";
}

}  // namespace

bool is_sweep_parameter(const std::string& name) {
  return name == "kappa" || name == "alpha" || name == "delta_f" ||
         name == "gamma_scale" || name == "delta" || name == "epsilon" ||
         name == "seed";
}

ScenarioFileData parse_scenario_text(const std::string& text,
                                     const std::string& source_name,
                                     const std::string& base_dir) {
  KvDoc doc = KvDoc::parse(text, source_name);
  doc.check_known(kSchema);
  ScenarioFileData d;
  d.name = doc.word_or("", "name", source_name);

  d.plant_kind = doc.word("plant", "kind");
  if (d.plant_kind == "scalar_affine") {
    d.a = doc.number("plant", "a");
    d.b = doc.number("plant", "b");
  } else if (d.plant_kind == "linear_output") {
    d.A = read_matrix(doc, "plant", "A", base_dir);
    d.B = read_matrix(doc, "plant", "B", base_dir);
    d.L = read_matrix(doc, "plant", "L", base_dir);
    d.g = doc.vector("plant", "g");
    d.theta_bar = doc.has("plant", "theta_bar")
                      ? doc.vector("plant", "theta_bar")
                      : Vec(Vec::Zero(d.g.size()));
  } else {
    doc.fail("plant", "kind",
             "unknown plant kind '" + d.plant_kind +
                 "' (expected scalar_affine or linear_output)");
  }

  if (doc.has_section("goal")) {
    std::string kind = doc.word_or("goal", "kind", "quadratic");
    if (kind != "quadratic") {
      doc.fail("goal", "kind", "only quadratic goals are file-expressible");
    }
    std::string construction = doc.word_or("goal", "construction", "explicit");
    if (construction == "lyapunov") {
      d.goal_from_lyapunov = true;
      d.lyapunov_shift_factor = doc.number_or("goal", "shift_factor", 0.9);
    } else if (construction == "explicit") {
      if (doc.has("goal", "H")) d.H = read_matrix(doc, "goal", "H", base_dir);
    } else {
      doc.fail("goal", "construction", "expected 'explicit' or 'lyapunov'");
    }
  }

  if (doc.has_section("disturbance")) {
    d.disturbance_kind = doc.word_or("disturbance", "kind", "zero");
    d.amplitude = doc.number_or("disturbance", "amplitude", 0.0);
    if (doc.has("disturbance", "direction")) {
      d.direction = doc.vector("disturbance", "direction");
    }
    d.omega = doc.number_or("disturbance", "omega", 1.0);
    d.phase = doc.number_or("disturbance", "phase", 0.0);
    if (doc.has("disturbance", "seed")) {
      d.seed = to_seed(doc.number("disturbance", "seed"), doc, "disturbance");
    }
  }

  d.family = doc.word("law", "family");
  d.gain = read_matrix(doc, "law", "Gamma", base_dir);
  d.kappa = doc.number_or("law", "kappa", 1.0);
  d.deadzone = doc.number_or("law", "delta", 0.0);
  d.use_true_gradient = doc.flag_or("law", "use_true_gradient", false);

  if (doc.has_section("law.feedback")) {
    d.has_feedback = true;
    d.feedback_variant = doc.word_or("law.feedback", "variant", "linear");
    d.feedback_alpha = doc.number_or("law.feedback", "alpha", 0.0);
    if (doc.has("law.feedback", "theta_bar")) {
      d.feedback_theta_bar = doc.vector("law.feedback", "theta_bar");
    }
    d.ball_radius = doc.number_or("law.feedback", "d", 0.0);
    d.relay_amplitude = doc.number_or("law.feedback", "amplitude", 0.0);
  }

  if (doc.has_section("law.pseudograd")) {
    d.has_pseudograd = true;
    std::string kind = doc.word_or("law.pseudograd", "kind", "speed_gradient");
    if (kind != "speed_gradient") {
      doc.fail("law.pseudograd", "kind",
               "only the speed_gradient pseudogradient is file-expressible");
    }
    d.pseudograd_gamma = doc.number_or("law.pseudograd", "gamma", 1.0);
    if (doc.has("law.pseudograd", "theta_ref")) {
      d.pseudograd_theta_ref = doc.vector("law.pseudograd", "theta_ref");
    }
  }

  d.x0 = doc.vector("init", "x0");
  d.theta0 = doc.vector("init", "theta0");
  d.freeze_params = doc.flag_or("init", "freeze_params", false);

  d.sim.step = doc.number("sim", "step");
  d.sim.horizon = doc.number("sim", "horizon");
  d.sim.record_stride =
      static_cast<int>(doc.number_or("sim", "record_stride", 1.0));
  d.sim.tail_fraction = doc.number_or("sim", "tail_fraction", 0.2);
  d.sim.max_step_discontinuous =
      doc.number_or("sim", "max_step_discontinuous", 1e-3);

  if (doc.has_section("verify")) {
    d.has_verify = true;
    if (doc.has("verify", "theta_star")) {
      const KvDoc::Value* v = doc.find("verify", "theta_star");
      if (v->type == KvDoc::Value::Type::String) {
        if (v->text != "high_gain") {
          doc.fail("verify", "theta_star",
                   "expected a vector or the word high_gain");
        }
        d.theta_star_high_gain = true;
        d.mu = doc.number("verify", "mu");
      } else {
        d.theta_star = doc.vector("verify", "theta_star");
      }
    }
    d.epsilon = doc.number_or("verify", "epsilon", 0.0);
    if (doc.has("verify", "alpha0") || doc.has("verify", "alpha1") ||
        doc.has("verify", "sigma")) {
      d.has_explicit_constants = true;
      d.explicit_constants.alpha0 = doc.number("verify", "alpha0");
      d.explicit_constants.alpha1 = doc.number("verify", "alpha1");
      d.explicit_constants.sigma = doc.number_or("verify", "sigma", 0.5);
    }
    d.nf_radius = doc.number_or("verify", "nf_radius", 10.0);
    d.nf_samples = static_cast<int>(doc.number_or("verify", "nf_samples", 2000.0));
    if (doc.has("verify", "seed")) {
      d.verify_seed = to_seed(doc.number("verify", "seed"), doc, "verify");
    }
  }
  return d;
}

ScenarioFileData load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::Io, "cannot open scenario file: " + path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  std::string base = std::filesystem::path(path).parent_path().string();
  if (base.empty()) base = ".";
  return parse_scenario_text(buf.str(), path, base);
}

ScenarioSpec ScenarioFileData::assemble() const {
  ScenarioSpec s;
  s.name = name;
  s.sim = sim;
  s.x0 = x0;
  s.theta0 = theta0;
  s.freeze_params = freeze_params;

  // Law family and feedback; theta_bar defaults to the plant prior.
  if (family == "basic") s.law.family = LawFamily::Basic;
  else if (family == "sigma") s.law.family = LawFamily::Sigma;
  else if (family == "combined") s.law.family = LawFamily::Combined;
  else if (family == "deadzone") s.law.family = LawFamily::Deadzone;
  else throw Error(ErrorKind::Validation, "unknown law family '" + family + "'");
  s.law.gain = gain;
  s.law.kappa = kappa;
  s.law.deadzone = deadzone;
  if (has_feedback) {
    FeedbackSpec zeta;
    if (feedback_variant == "linear") zeta.variant = FeedbackVariant::Linear;
    else if (feedback_variant == "ball_deadzone")
      zeta.variant = FeedbackVariant::BallDeadzone;
    else if (feedback_variant == "relay") zeta.variant = FeedbackVariant::Relay;
    else
      throw Error(ErrorKind::Validation,
                  "unknown feedback variant '" + feedback_variant + "'");
    zeta.alpha = feedback_alpha;
    zeta.ball_radius = ball_radius;
    zeta.relay_amplitude = relay_amplitude;
    zeta.theta_bar = feedback_theta_bar.size() > 0 ? feedback_theta_bar
                                                   : theta_bar;
    s.law.feedback = zeta;
  }

  VerifySpec verify;
  verify.epsilon = epsilon;
  verify.nf_radius = nf_radius;
  verify.nf_samples = nf_samples;
  verify.seed = verify_seed;
  if (has_explicit_constants) verify.constants = explicit_constants;

  if (plant_kind == "scalar_affine") {
    if (theta_star_high_gain) {
      throw Error(ErrorKind::Validation,
                  "high_gain theta_star needs a linear_output plant");
    }
    ScalarAffinePlant sp{a, b};
    s.plant = sp.plant();
    Mat H_eff = H.size() > 0 ? H : Mat(Mat::Identity(1, 1));
    s.goal = quadratic_goal(H_eff);
    if (has_verify && theta_star.size() > 0) {
      verify.theta_star = theta_star;
      if (!verify.constants) {
        Mat A_star(1, 1);
        A_star(0, 0) = a + b * theta_star[0];
        verify.constants = class_constants(H_eff, A_star).constants;
      }
    }
  } else if (plant_kind == "linear_output") {
    LinearOutputPlant lp;
    lp.A = A;
    lp.B = B;
    lp.L = L;
    lp.g = g;
    lp.theta_bar = theta_bar;
    if (theta_star_high_gain) {
      lp.theta_star = ideal_gain_high_gain(g, mu);
    } else if (theta_star.size() > 0) {
      lp.theta_star = theta_star;
    } else {
      throw Error(ErrorKind::Validation,
                  "linear_output plants need [verify] theta_star");
    }

    LinearPlantInfo info;
    Mat A_star = lp.A + lp.B * lp.theta_star.transpose() * lp.L.transpose();
    if (goal_from_lyapunov) {
      double degree = stability_degree(A_star);
      if (degree <= 0.0) {
        throw Error(ErrorKind::Validation,
                    "ideal closed loop is not Hurwitz; cannot build H");
      }
      double shift = lyapunov_shift_factor * degree;
      lp.H = solve_lyapunov(A_star, shift);
      info.sigma_decay = shift;
    } else {
      if (H.size() == 0) {
        throw Error(ErrorKind::Validation,
                    "linear_output goal needs H or construction = lyapunov");
      }
      lp.H = H;
    }
    lp.validate();

    auto cc = class_constants(lp);
    if (info.sigma_decay == 0.0) info.sigma_decay = cc.constants.alpha0 / 2.0;
    Eigen::SelfAdjointEigenSolver<Mat> es(lp.H);
    info.lambda_plus = es.eigenvalues().maxCoeff();
    info.lambda_minus = es.eigenvalues().minCoeff();

    s.plant = lp.plant();
    s.goal = lp.goal();
    s.goal.constants = cc.constants;
    verify.theta_star = lp.theta_star;
    if (!verify.constants) verify.constants = cc.constants;

    if (!use_true_gradient) {
      AlignmentInfo ai = surrogate_alignment(lp);
      s.adaptation_gradient = make_surrogate_gradient(lp.L, lp.g);
      info.surrogate_aligned = ai.aligned;
      info.alignment_residual = ai.residual;
      info.alignment_scale = ai.scale;
    } else {
      info.surrogate_aligned = true;
    }
    s.linear = info;
  }

  if (has_pseudograd) {
    PseudoGradSpec pg;
    pg.gamma = pseudograd_gamma;
    Vec theta_ref = pseudograd_theta_ref.size() > 0
                        ? pseudograd_theta_ref
                        : Vec(Vec::Zero(s.plant.param_dim));
    PlantSpec plant_copy = s.plant;
    GoalSpec goal_copy = s.goal;
    pg.psi = [plant_copy, goal_copy, theta_ref](const Vec& x, double t) {
      return eval_speed_gradient(plant_copy, goal_copy, x, theta_ref, t);
    };
    s.law.pseudograd = pg;
  }

  // Disturbance
  if (disturbance_kind == "zero") s.disturbance.kind = DisturbanceKind::Zero;
  else if (disturbance_kind == "constant")
    s.disturbance.kind = DisturbanceKind::ConstantVector;
  else if (disturbance_kind == "sinusoid")
    s.disturbance.kind = DisturbanceKind::Sinusoid;
  else if (disturbance_kind == "random")
    s.disturbance.kind = DisturbanceKind::BoundedUniformRandom;
  else if (disturbance_kind == "adversarial_sign")
    s.disturbance.kind = DisturbanceKind::AdversarialSign;
  else
    throw Error(ErrorKind::Validation,
                "unknown disturbance kind '" + disturbance_kind + "'");
  s.disturbance.amplitude = amplitude;
  s.disturbance.omega = omega;
  s.disturbance.phase = phase;
  s.disturbance.seed = seed;
  if (s.disturbance.kind == DisturbanceKind::ConstantVector ||
      s.disturbance.kind == DisturbanceKind::Sinusoid) {
    s.disturbance.direction =
        direction.size() > 0 ? direction : Vec(Vec::Ones(s.plant.state_dim));
  }

  if (has_verify) s.verify = verify;

  finalize_scenario(s);
  return s;
}

void ScenarioFileData::override_parameter(const std::string& param,
                                          double value) {
  if (param == "kappa") {
    kappa = value;
  } else if (param == "alpha") {
    if (!has_feedback) {
      throw Error(ErrorKind::InvalidArgument,
                  "override 'alpha': scenario has no feedback term");
    }
    feedback_alpha = value;
  } else if (param == "delta_f") {
    amplitude = value;
  } else if (param == "gamma_scale") {
    if (value <= 0.0) {
      throw Error(ErrorKind::InvalidArgument, "gamma_scale must be > 0");
    }
    gain *= value;
  } else if (param == "delta") {
    deadzone = value;
  } else if (param == "epsilon") {
    epsilon = value;
  } else if (param == "seed") {
    if (value < 0.0 || value != std::floor(value)) {
      throw Error(ErrorKind::InvalidArgument, "seed must be a nonnegative integer");
    }
    seed = static_cast<std::uint64_t>(value);
  } else {
    throw Error(ErrorKind::InvalidArgument,
                "unknown sweep parameter '" + param +
                    "' (expected kappa, alpha, delta_f, gamma_scale, delta, "
                    "epsilon or seed)");
  }
}

std::string ScenarioFileData::serialize() const {
  std::ostringstream out;
  out << "# sgcert scenario v1\n";
  out << "name = " << name << "\n\n";

  out << "[plant]\n";
  out << "kind = " << plant_kind << "\n";
  if (plant_kind == "scalar_affine") {
    out << "a = " << format_number(a) << "\n";
    out << "b = " << format_number(b) << "\n";
  } else {
    out << "A = " << format_matrix(A) << "\n";
    out << "B = " << format_matrix(B) << "\n";
    out << "L = " << format_matrix(L) << "\n";
    out << "g = " << format_vector(g) << "\n";
    out << "theta_bar = " << format_vector(theta_bar) << "\n";
  }

  out << "\n[goal]\n";
  out << "kind = quadratic\n";
  if (goal_from_lyapunov) {
    out << "construction = lyapunov\n";
    out << "shift_factor = " << format_number(lyapunov_shift_factor) << "\n";
  } else if (H.size() > 0) {
    out << "H = " << format_matrix(H) << "\n";
  }

  out << "\n[disturbance]\n";
  out << "kind = " << disturbance_kind << "\n";
  out << "amplitude = " << format_number(amplitude) << "\n";
  if (direction.size() > 0) {
    out << "direction = " << format_vector(direction) << "\n";
  }
  if (disturbance_kind == "sinusoid") {
    out << "omega = " << format_number(omega) << "\n";
    out << "phase = " << format_number(phase) << "\n";
  }
  if (disturbance_kind == "random") {
    out << "seed = " << seed << "\n";
  }

  out << "\n[law]\n";
  out << "family = " << family << "\n";
  out << "Gamma = " << format_matrix(gain) << "\n";
  out << "kappa = " << format_number(kappa) << "\n";
  if (family == "deadzone") out << "delta = " << format_number(deadzone) << "\n";
  if (use_true_gradient) out << "use_true_gradient = true\n";

  if (has_feedback) {
    out << "\n[law.feedback]\n";
    out << "variant = " << feedback_variant << "\n";
    out << "alpha = " << format_number(feedback_alpha) << "\n";
    if (feedback_theta_bar.size() > 0) {
      out << "theta_bar = " << format_vector(feedback_theta_bar) << "\n";
    }
    out << "d = " << format_number(ball_radius) << "\n";
    if (feedback_variant == "relay") {
      out << "amplitude = " << format_number(relay_amplitude) << "\n";
    }
  }

  if (has_pseudograd) {
    out << "\n[law.pseudograd]\n";
    out << "kind = speed_gradient\n";
    out << "gamma = " << format_number(pseudograd_gamma) << "\n";
    if (pseudograd_theta_ref.size() > 0) {
      out << "theta_ref = " << format_vector(pseudograd_theta_ref) << "\n";
    }
  }

  out << "\n[init]\n";
  out << "x0 = " << format_vector(x0) << "\n";
  out << "theta0 = " << format_vector(theta0) << "\n";
  if (freeze_params) out << "freeze_params = true\n";

  out << "\n[sim]\n";
  out << "step = " << format_number(sim.step) << "\n";
  out << "horizon = " << format_number(sim.horizon) << "\n";
  out << "record_stride = " << sim.record_stride << "\n";
  out << "tail_fraction = " << format_number(sim.tail_fraction) << "\n";

  if (has_verify) {
    out << "\n[verify]\n";
    if (theta_star_high_gain) {
      out << "theta_star = high_gain\n";
      out << "mu = " << format_number(mu) << "\n";
    } else if (theta_star.size() > 0) {
      out << "theta_star = " << format_vector(theta_star) << "\n";
    }
    out << "epsilon = " << format_number(epsilon) << "\n";
    if (has_explicit_constants) {
      out << "alpha0 = " << format_number(explicit_constants.alpha0) << "\n";
      out << "alpha1 = " << format_number(explicit_constants.alpha1) << "\n";
      out << "sigma = " << format_number(explicit_constants.sigma) << "\n";
    }
    out << "nf_radius = " << format_number(nf_radius) << "\n";
    out << "nf_samples = " << nf_samples << "\n";
    out << "seed = " << verify_seed << "\n";
  }
  return out.str();
}

}  // namespace sg
