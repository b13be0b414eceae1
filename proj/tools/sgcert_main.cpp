// sgcert command line front end: scenario runner, parameter sweeps and
// summary comparison. Talks to the library exclusively through the C API.
#include "sgcert.h"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace fs = std::filesystem;

namespace {

constexpr int kReportVersion = 1;
constexpr std::size_t kSweepCap = 10000;
const char* kSummaryMagic = "# sgcert-summary v1";

[[noreturn]] void die(const std::string& msg, int code = 1) {
  std::cerr << "sgcert: " << msg << "\n";
  std::exit(code);
}

void check(sg_status st, const std::string& context) {
  if (st == SG_OK) return;
  int code = 1;
  if (st == SG_ERR_PARSE) code = 2;
  if (st == SG_ERR_VALIDATION) code = 3;
  die(context + ": " + sg_last_error(), code);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Run manifest: [run] scenario/out_dir/report_version and [sweep] axes.
// Axis order in the file is the grid order (last axis fastest).

struct Manifest {
  std::string scenario_path;
  std::string out_dir;
  int report_version = kReportVersion;
  std::vector<std::pair<std::string, std::vector<double>>> axes;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

Manifest parse_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) die("cannot open manifest: " + path, 2);
  Manifest m;
  std::string line, section;
  int line_no = 0;
  auto fail = [&](const std::string& why) {
    die(path + ":" + std::to_string(line_no) + ": " + why, 2);
  };
  while (std::getline(in, line)) {
    ++line_no;
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::string body = trim(line);
    if (body.empty()) continue;
    if (body.front() == '[' && body.back() == ']') {
      section = trim(body.substr(1, body.size() - 2));
      if (section != "run" && section != "sweep") {
        fail("unknown section [" + section + "]");
      }
      continue;
    }
    std::size_t eq = body.find('=');
    if (eq == std::string::npos) fail("expected 'key = value'");
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (section == "run") {
      if (key == "scenario") m.scenario_path = value;
      else if (key == "out_dir") m.out_dir = value;
      else if (key == "report_version") m.report_version = std::atoi(value.c_str());
      else fail("unknown key '" + key + "' in [run]");
    } else if (section == "sweep") {
      if (value.size() < 2 || value.front() != '[' || value.back() != ']') {
        fail("sweep axis '" + key + "' must be a [list] of numbers");
      }
      std::vector<double> values;
      std::stringstream cells(value.substr(1, value.size() - 2));
      std::string cell;
      while (std::getline(cells, cell, ',')) {
        cell = trim(cell);
        if (cell.empty()) fail("empty value in sweep axis '" + key + "'");
        char* end = nullptr;
        double v = std::strtod(cell.c_str(), &end);
        if (end == cell.c_str() || *end != '\0') {
          fail("bad number '" + cell + "' in sweep axis '" + key + "'");
        }
        values.push_back(v);
      }
      if (values.empty()) fail("sweep axis '" + key + "' is empty");
      m.axes.emplace_back(key, std::move(values));
    } else {
      fail("key outside of a section");
    }
  }
  if (m.scenario_path.empty()) die(path + ": [run] scenario is required", 2);
  if (m.report_version != kReportVersion) {
    die(path + ": unsupported report_version " +
            std::to_string(m.report_version),
        2);
  }
  return m;
}

// ---------------------------------------------------------------------------
// run verb

struct PointResult {
  std::vector<double> values;  // one per axis
  double delta_star = NAN, k0 = NAN, corollary = NAN, error_bound = NAN;
  double tail_q = NAN, tail_x = NAN;
  int passed = 0, total = 0;
  bool ok = false;  // certificates all green
  bool blowup = false;
  double wall_ms = 0.0;
};

struct RunOptions {
  std::string out_dir;
  int jobs = 1;
  double tail_fraction = -1.0;  // <0: keep scenario value
  bool strict = false;
};

std::string point_id(std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04zu", index);
  return buf;
}

int cmd_run(const std::string& manifest_path, const RunOptions& opt) {
  Manifest m = parse_manifest(manifest_path);
  fs::path scen_path = fs::path(manifest_path).parent_path() / m.scenario_path;

  sg_scenario* base = nullptr;
  check(sg_scenario_load(scen_path.string().c_str(), &base),
        "loading " + scen_path.string());
  if (opt.tail_fraction > 0.0) {
    check(sg_scenario_set_tail_fraction(base, opt.tail_fraction),
          "setting tail fraction");
  }

  std::size_t grid = 1;
  for (const auto& [name, values] : m.axes) {
    grid *= values.size();
    if (grid > kSweepCap) die("sweep grid exceeds cap of 10000 points");
  }

  // Pre-flight the axis names on a throwaway clone before touching the disk.
  {
    sg_scenario* probe = nullptr;
    check(sg_scenario_clone(base, &probe), "clone");
    for (const auto& [name, values] : m.axes) {
      if (sg_scenario_override(probe, name.c_str(), values.front()) != SG_OK) {
        die("sweep axis '" + name + "': " + sg_last_error(), 2);
      }
    }
    sg_scenario_free(probe);
  }

  fs::path out_dir =
      opt.out_dir.empty() ? fs::path(m.out_dir) : fs::path(opt.out_dir);
  if (out_dir.empty()) die("no output directory (manifest out_dir or --out)");
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) die("cannot create output directory " + out_dir.string());

  std::vector<PointResult> results(grid);
  std::atomic<std::size_t> next{0};
  std::mutex io_mutex;

  auto worker = [&] {
    for (;;) {
      std::size_t idx = next.fetch_add(1);
      if (idx >= grid) return;
      PointResult& res = results[idx];

      // Decode the grid index into one value per axis (last axis fastest).
      std::size_t rem = idx;
      res.values.resize(m.axes.size());
      for (std::size_t a = m.axes.size(); a-- > 0;) {
        const auto& vals = m.axes[a].second;
        res.values[a] = vals[rem % vals.size()];
        rem /= vals.size();
      }

      auto t0 = std::chrono::steady_clock::now();
      sg_scenario* point = nullptr;
      if (sg_scenario_clone(base, &point) != SG_OK) {
        std::lock_guard<std::mutex> lock(io_mutex);
        die(std::string("clone failed: ") + sg_last_error());
      }
      for (std::size_t a = 0; a < m.axes.size(); ++a) {
        if (sg_scenario_override(point, m.axes[a].first.c_str(),
                                 res.values[a]) != SG_OK) {
          std::lock_guard<std::mutex> lock(io_mutex);
          die("override " + m.axes[a].first + ": " + sg_last_error());
        }
      }
      sg_trajectory* traj = nullptr;
      sg_report* report = nullptr;
      sg_status st = sg_run(point, &traj, &report);
      if (st == SG_OK) {
        fs::path traj_path = out_dir / ("traj_" + point_id(idx) + ".csv");
        fs::path rep_path = out_dir / ("report_" + point_id(idx) + ".txt");
        if (sg_trajectory_write_csv(traj, traj_path.string().c_str()) != SG_OK ||
            sg_report_write_text(report, rep_path.string().c_str()) != SG_OK) {
          std::lock_guard<std::mutex> lock(io_mutex);
          die(std::string("writing artifacts: ") + sg_last_error());
        }
        res.delta_star = sg_report_delta_star(report);
        res.k0 = sg_report_k0(report);
        res.corollary = sg_report_corollary_bound(report);
        res.error_bound = sg_report_error_bound_x(report);
        res.tail_q = sg_report_tail_sup_q(report);
        res.tail_x = sg_report_tail_sup_x_norm(report);
        res.passed = sg_report_conditions_passed(report, opt.strict ? 1 : 0);
        res.total = sg_report_conditions_total(report, opt.strict ? 1 : 0);
        res.ok = sg_report_all_passed(report, opt.strict ? 1 : 0) != 0;
      } else if (st == SG_ERR_BLOWUP) {
        res.blowup = true;  // recorded; the sweep continues
      } else {
        std::lock_guard<std::mutex> lock(io_mutex);
        die("point " + point_id(idx) + ": " + sg_last_error());
      }
      sg_trajectory_free(traj);
      sg_report_free(report);
      sg_scenario_free(point);
      res.wall_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - t0)
                        .count();
    }
  };

  int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(grid)));
  std::vector<std::thread> pool;
  for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
  sg_scenario_free(base);

  // summary.csv in grid order (single writer).
  std::ofstream summary(out_dir / "summary.csv");
  if (!summary) die("cannot write summary.csv");
  summary << kSummaryMagic << "\n";
  summary << "id";
  for (const auto& [name, values] : m.axes) summary << "," << name;
  summary << ",delta_star,k0,corollary_bound,error_bound_x,tail_sup_Q,"
             "tail_sup_x_norm,conditions_passed,status\n";
  bool all_ok = true;
  for (std::size_t idx = 0; idx < grid; ++idx) {
    const PointResult& r = results[idx];
    summary << point_id(idx);
    for (double v : r.values) summary << "," << fmt(v);
    summary << "," << fmt(r.delta_star) << "," << fmt(r.k0) << ","
            << fmt(r.corollary) << "," << fmt(r.error_bound) << ","
            << fmt(r.tail_q) << "," << fmt(r.tail_x) << "," << r.passed << "/"
            << r.total << "," << (r.blowup ? "blowup" : "ok") << "\n";
    all_ok = all_ok && r.ok && !r.blowup;
  }
  summary.close();

  // Wall-clock timings live outside the CSVs so reruns stay byte-identical.
  std::ofstream log(out_dir / "run.log");
  double total_ms = 0.0;
  for (std::size_t idx = 0; idx < grid; ++idx) {
    log << "point " << point_id(idx) << ": " << results[idx].wall_ms << " ms\n";
    total_ms += results[idx].wall_ms;
  }
  log << "total: " << total_ms << " ms over " << grid << " points\n";

  std::cout << "wrote " << grid << " point(s) to " << out_dir.string() << "; "
            << (all_ok ? "all certificates passed" : "certificate failures")
            << "\n";
  return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------
// compare verb

struct Summary {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::size_t metrics_begin = 0;  // index of delta_star
};

Summary read_summary(const std::string& path) {
  std::ifstream in(path);
  if (!in) die("cannot open summary: " + path, 2);
  std::string line;
  if (!std::getline(in, line) || trim(line) != kSummaryMagic) {
    die(path + ": schema mismatch (expected '" + std::string(kSummaryMagic) +
            "')",
        2);
  }
  Summary s;
  if (!std::getline(in, line)) die(path + ": missing header", 2);
  std::stringstream hs(line);
  std::string cell;
  while (std::getline(hs, cell, ',')) s.columns.push_back(cell);
  for (std::size_t i = 0; i < s.columns.size(); ++i) {
    if (s.columns[i] == "delta_star") s.metrics_begin = i;
  }
  if (s.metrics_begin == 0) die(path + ": no delta_star column", 2);
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> row;
    std::stringstream rs(line);
    while (std::getline(rs, cell, ',')) row.push_back(cell);
    if (row.size() != s.columns.size()) die(path + ": ragged row", 2);
    s.rows.push_back(std::move(row));
  }
  if (s.rows.empty()) die(path + ": no data rows", 2);
  return s;
}

double cell_number(const std::string& text) {
  return std::strtod(text.c_str(), nullptr);
}

int cmd_compare(const std::string& path_a, const std::string& path_b) {
  Summary a = read_summary(path_a);
  Summary b = read_summary(path_b);
  std::vector<std::string> axes_a(a.columns.begin() + 1,
                                  a.columns.begin() + a.metrics_begin);
  std::vector<std::string> axes_b(b.columns.begin() + 1,
                                  b.columns.begin() + b.metrics_begin);
  if (axes_a != axes_b) {
    die("summaries have different sweep axes; cannot join", 2);
  }
  auto col = [&](const Summary& s, const char* name) -> std::size_t {
    for (std::size_t i = 0; i < s.columns.size(); ++i) {
      if (s.columns[i] == name) return i;
    }
    die(std::string("missing column ") + name, 2);
  };
  std::size_t qa = col(a, "tail_sup_Q"), qb = col(b, "tail_sup_Q");
  std::size_t ca = col(a, "corollary_bound"), cb = col(b, "corollary_bound");

  // Join on the sweep-axis columns (falls back to id for axis-free runs).
  auto key_of = [](const Summary& s, const std::vector<std::string>& row) {
    if (s.metrics_begin == 1) return row[0];
    std::string key;
    for (std::size_t i = 1; i < s.metrics_begin; ++i) key += row[i] + "|";
    return key;
  };
  std::size_t matched = 0;
  std::printf("axes | tailQ(a) | tailQ(b) | d_tailQ | corol-tailQ(a) | "
              "corol-tailQ(b)\n");
  for (const auto& ra : a.rows) {
    for (const auto& rb : b.rows) {
      if (key_of(a, ra) != key_of(b, rb)) continue;
      ++matched;
      double tq_a = cell_number(ra[qa]), tq_b = cell_number(rb[qb]);
      double m_a = cell_number(ra[ca]) - tq_a;
      double m_b = cell_number(rb[cb]) - tq_b;
      std::string axes;
      for (std::size_t i = 1; i < a.metrics_begin; ++i) {
        axes += (i > 1 ? " " : "") + a.columns[i] + "=" + ra[i];
      }
      if (axes.empty()) axes = "id=" + ra[0];
      std::printf("%s | %.6g | %.6g | %.6g | %.6g | %.6g\n", axes.c_str(), tq_a,
                  tq_b, tq_b - tq_a, m_a, m_b);
      break;
    }
  }
  if (matched == 0) die("no rows matched between the summaries", 2);
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& path) {
  sg_scenario* scenario = nullptr;
  check(sg_scenario_load(path.c_str(), &scenario), path);
  check(sg_scenario_validate(scenario), path);
  std::cout << "OK: " << sg_scenario_name(scenario)
            << " (n=" << sg_scenario_state_dim(scenario)
            << ", m=" << sg_scenario_param_dim(scenario)
            << ", law=" << sg_scenario_law_family(scenario) << ")\n";
  sg_scenario_free(scenario);
  return 0;
}

void usage() {
  std::cout << "sgcert " << sg_version()
            << " - speed-gradient adaptive control simulation and "
               "certification\n"
               "\n"
               "usage:\n"
               "  sgcert run <manifest.mfs> [--out DIR] [--jobs N]\n"
               "                            [--tail-fraction T] [--strict]\n"
               "  sgcert compare <a/summary.csv> <b/summary.csv>\n"
               "  sgcert validate <scenario.scn>\n";
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty() || args[0] == "--help" || args[0] == "-h") {
    usage();
    return args.empty() ? 1 : 0;
  }
  const std::string verb = args[0];

  std::vector<std::string> positional;
  RunOptions opt;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    auto next_value = [&](const char* flag) -> std::string {
      if (i + 1 >= args.size()) die(std::string(flag) + " needs a value");
      return args[++i];
    };
    if (a == "--out") opt.out_dir = next_value("--out");
    else if (a == "--jobs") opt.jobs = std::atoi(next_value("--jobs").c_str());
    else if (a == "--tail-fraction")
      opt.tail_fraction = std::atof(next_value("--tail-fraction").c_str());
    else if (a == "--strict") opt.strict = true;
    else if (a.rfind("--", 0) == 0) die("unknown flag " + a);
    else positional.push_back(a);
  }
  if (opt.jobs < 1) die("--jobs must be >= 1");

  if (verb == "run") {
    if (positional.size() != 1) die("run needs exactly one manifest path");
    return cmd_run(positional[0], opt);
  }
  if (verb == "compare") {
    if (positional.size() != 2) die("compare needs two summary paths");
    return cmd_compare(positional[0], positional[1]);
  }
  if (verb == "validate") {
    if (positional.size() != 1) die("validate needs one scenario path");
    return cmd_validate(positional[0]);
  }
  usage();
  return 1;
}
