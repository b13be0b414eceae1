#include "sgcert.h"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "bounds.hpp"
#include "scenario_io.hpp"

using namespace sg;

struct sg_scenario {
  ScenarioFileData data;
  std::string cached_text;
};

struct sg_trajectory {
  TrajectoryRecord record;
};

struct sg_report {
  BoundReport report;
};

namespace {

thread_local std::string g_last_error;

sg_status set_error(ErrorKind kind, const std::string& msg) {
  g_last_error = msg;
  switch (kind) {
    case ErrorKind::InvalidArgument: return SG_ERR_INVALID_ARGUMENT;
    case ErrorKind::Parse: return SG_ERR_PARSE;
    case ErrorKind::Validation: return SG_ERR_VALIDATION;
    case ErrorKind::Blowup: return SG_ERR_BLOWUP;
    case ErrorKind::Io: return SG_ERR_IO;
    case ErrorKind::Internal: return SG_ERR_INTERNAL;
  }
  return SG_ERR_INTERNAL;
}

template <typename Fn>
sg_status guarded(Fn&& fn) {
  try {
    fn();
    return SG_OK;
  } catch (const Error& e) {
    return set_error(e.kind(), e.what());
  } catch (const std::exception& e) {
    return set_error(ErrorKind::Internal, e.what());
  } catch (...) {
    return set_error(ErrorKind::Internal, "unknown error");
  }
}

sg_status require(bool ok, const char* what) {
  if (ok) return SG_OK;
  return set_error(ErrorKind::InvalidArgument, what);
}

}  // namespace

extern "C" {

const char* sg_version(void) { return "1.0.0"; }

const char* sg_status_name(sg_status status) {
  switch (status) {
    case SG_OK: return "ok";
    case SG_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SG_ERR_PARSE: return "parse_error";
    case SG_ERR_VALIDATION: return "validation_error";
    case SG_ERR_BLOWUP: return "blowup";
    case SG_ERR_IO: return "io_error";
    case SG_ERR_INTERNAL: return "internal_error";
  }
  return "unknown";
}

const char* sg_last_error(void) { return g_last_error.c_str(); }

sg_status sg_scenario_load(const char* path, sg_scenario** out) {
  if (sg_status st = require(path && out, "null argument")) return st;
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<sg_scenario>();
    handle->data = load_scenario_file(path);
    (void)handle->data.assemble();  // validate eagerly
    *out = handle.release();
  });
}

sg_status sg_scenario_parse(const char* text, const char* name,
                            sg_scenario** out) {
  if (sg_status st = require(text && out, "null argument")) return st;
  *out = nullptr;
  return guarded([&] {
    auto handle = std::make_unique<sg_scenario>();
    handle->data = parse_scenario_text(text, name ? name : "<memory>");
    (void)handle->data.assemble();
    *out = handle.release();
  });
}

sg_status sg_scenario_clone(const sg_scenario* scenario, sg_scenario** out) {
  if (sg_status st = require(scenario && out, "null argument")) return st;
  *out = nullptr;
  return guarded([&] { *out = new sg_scenario{scenario->data, {}}; });
}

void sg_scenario_free(sg_scenario* scenario) { delete scenario; }

const char* sg_scenario_name(const sg_scenario* scenario) {
  return scenario ? scenario->data.name.c_str() : "";
}

int sg_scenario_state_dim(const sg_scenario* scenario) {
  if (!scenario) return 0;
  return scenario->data.plant_kind == "scalar_affine"
             ? 1
             : static_cast<int>(scenario->data.A.rows());
}

int sg_scenario_param_dim(const sg_scenario* scenario) {
  if (!scenario) return 0;
  return scenario->data.plant_kind == "scalar_affine"
             ? 1
             : static_cast<int>(scenario->data.g.size());
}

const char* sg_scenario_law_family(const sg_scenario* scenario) {
  return scenario ? scenario->data.family.c_str() : "";
}

const char* sg_scenario_text(sg_scenario* scenario) {
  if (!scenario) return "";
  scenario->cached_text = scenario->data.serialize();
  return scenario->cached_text.c_str();
}

sg_status sg_scenario_override(sg_scenario* scenario, const char* param,
                               double value) {
  if (sg_status st = require(scenario && param, "null argument")) return st;
  return guarded([&] { scenario->data.override_parameter(param, value); });
}

sg_status sg_scenario_set_tail_fraction(sg_scenario* scenario,
                                        double tail_fraction) {
  if (sg_status st = require(scenario != nullptr, "null scenario")) return st;
  return guarded([&] {
    if (!(tail_fraction > 0.0 && tail_fraction < 1.0)) {
      throw Error(ErrorKind::InvalidArgument,
                  "tail_fraction must be in (0,1)");
    }
    scenario->data.sim.tail_fraction = tail_fraction;
  });
}

sg_status sg_scenario_validate(const sg_scenario* scenario) {
  if (sg_status st = require(scenario != nullptr, "null scenario")) return st;
  return guarded([&] { (void)scenario->data.assemble(); });
}

sg_status sg_run(const sg_scenario* scenario, sg_trajectory** traj_out,
                 sg_report** report_out) {
  if (sg_status st = require(scenario != nullptr, "null scenario")) return st;
  if (traj_out) *traj_out = nullptr;
  if (report_out) *report_out = nullptr;
  return guarded([&] {
    ScenarioSpec spec = scenario->data.assemble();
    TrajectoryRecord record = integrate(spec);
    std::unique_ptr<sg_report> rep;
    if (report_out) {
      rep = std::make_unique<sg_report>();
      rep->report = make_bound_report(spec, &record);
    }
    if (traj_out) *traj_out = new sg_trajectory{std::move(record)};
    if (report_out) *report_out = rep.release();
  });
}

void sg_trajectory_free(sg_trajectory* traj) { delete traj; }

size_t sg_trajectory_rows(const sg_trajectory* traj) {
  return traj ? traj->record.size() : 0;
}

size_t sg_trajectory_cols(const sg_trajectory* traj) {
  if (!traj || traj->record.size() == 0) return 0;
  const auto& r = traj->record;
  return 1 + r.states[0].size() + r.params[0].size() + 2 +
         (r.has_lyapunov() ? 1 : 0);
}

double sg_trajectory_cell(const sg_trajectory* traj, size_t row, size_t col) {
  if (!traj || row >= traj->record.size() ||
      col >= sg_trajectory_cols(traj)) {
    return std::nan("");
  }
  const auto& r = traj->record;
  const size_t n = r.states[0].size();
  const size_t m = r.params[0].size();
  if (col == 0) return r.times[row];
  if (col < 1 + n) return r.states[row][static_cast<Eigen::Index>(col - 1)];
  if (col < 1 + n + m) {
    return r.params[row][static_cast<Eigen::Index>(col - 1 - n)];
  }
  if (col == 1 + n + m) return r.goal_values[row];
  if (col == 2 + n + m) return r.speed_values[row];
  return r.lyapunov_values[row];
}

sg_status sg_trajectory_write_csv(const sg_trajectory* traj, const char* path) {
  if (sg_status st = require(traj && path, "null argument")) return st;
  return guarded([&] {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, std::string("cannot open ") + path);
    write_csv(traj->record, out);
    if (!out.good()) {
      throw Error(ErrorKind::Io, std::string("write failed: ") + path);
    }
  });
}

void sg_report_free(sg_report* report) { delete report; }

double sg_report_delta_star(const sg_report* report) {
  return report ? report->report.delta_star : std::nan("");
}

double sg_report_k0(const sg_report* report) {
  return report ? report->report.k0 : std::nan("");
}

double sg_report_corollary_bound(const sg_report* report) {
  return report ? report->report.corollary : std::nan("");
}

double sg_report_error_bound_x(const sg_report* report) {
  return report ? report->report.error_bound_x : std::nan("");
}

double sg_report_tail_sup_q(const sg_report* report) {
  return report ? report->report.tail_sup_q : std::nan("");
}

double sg_report_tail_sup_x_norm(const sg_report* report) {
  return report ? report->report.tail_sup_x_norm : std::nan("");
}

int sg_report_condition_count(const sg_report* report) {
  return report ? static_cast<int>(report->report.conditions.size()) : 0;
}

sg_status sg_report_condition(const sg_report* report, int index,
                              const char** name, int* passed,
                              int* warning_only, double* margin) {
  if (sg_status st = require(report != nullptr, "null report")) return st;
  if (index < 0 || index >= sg_report_condition_count(report)) {
    return set_error(ErrorKind::InvalidArgument, "condition index out of range");
  }
  const CertificateReport& c = report->report.conditions[index];
  if (name) *name = c.name.c_str();
  if (passed) *passed = c.passed ? 1 : 0;
  if (warning_only) *warning_only = c.warning_only ? 1 : 0;
  if (margin) *margin = c.margin;
  return SG_OK;
}

int sg_report_conditions_passed(const sg_report* report, int strict) {
  return report ? report->report.conditions_passed(strict != 0) : 0;
}

int sg_report_conditions_total(const sg_report* report, int strict) {
  return report ? report->report.conditions_total(strict != 0) : 0;
}

int sg_report_all_passed(const sg_report* report, int strict) {
  return report ? (report->report.all_passed(strict != 0) ? 1 : 0) : 0;
}

sg_status sg_report_write_text(const sg_report* report, const char* path) {
  if (sg_status st = require(report && path, "null argument")) return st;
  return guarded([&] {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, std::string("cannot open ") + path);
    write_report(report->report, out);
    if (!out.good()) {
      throw Error(ErrorKind::Io, std::string("write failed: ") + path);
    }
  });
}

}  // extern "C"
