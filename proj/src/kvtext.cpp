#include "kvtext.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace sg {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  std::size_t pos = line.find('#');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

bool parse_number(const std::string& text, double& out) {
  std::string t = trim(text);
  if (t.empty()) return false;
  const char* begin = t.data();
  const char* end = begin + t.size();
  auto res = std::from_chars(begin, end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    // from_chars rejects leading '+'; accept it for hand-written files.
    if (!t.empty() && t[0] == '+') {
      return parse_number(t.substr(1), out);
    }
    if (t == "inf") { out = std::numeric_limits<double>::infinity(); return true; }
    if (t == "nan") { out = std::numeric_limits<double>::quiet_NaN(); return true; }
    return false;
  }
  return true;
}

// Splits "a, b, c" at top-level commas (depth 0 w.r.t. brackets).
std::vector<std::string> split_top_level(const std::string& s) {
  std::vector<std::string> parts;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '[') ++depth;
    if (c == ']') --depth;
    if (c == ',' && depth == 0) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

}  // namespace

KvDoc KvDoc::parse(const std::string& text, const std::string& source_name) {
  KvDoc doc;
  doc.source_ = source_name;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    int start_line = line_no;
    std::string body = trim(strip_comment(line));
    if (body.empty()) continue;

    if (body.front() == '[' && body.back() == ']' &&
        body.find('=') == std::string::npos) {
      section = trim(body.substr(1, body.size() - 2));
      if (section.empty()) doc.fail_at(line_no, "empty section name");
      doc.section_lines_.emplace(section, line_no);
      continue;
    }

    std::size_t eq = body.find('=');
    if (eq == std::string::npos) {
      doc.fail_at(line_no, "expected 'key = value' or '[section]'");
    }
    std::string key = trim(body.substr(0, eq));
    std::string value = trim(body.substr(eq + 1));
    if (key.empty()) doc.fail_at(line_no, "empty key");

    // Bracketed values may continue over following lines.
    auto depth_of = [](const std::string& s) {
      int d = 0;
      for (char c : s) {
        if (c == '[') ++d;
        if (c == ']') --d;
      }
      return d;
    };
    int depth = depth_of(value);
    while (depth > 0 && std::getline(in, line)) {
      ++line_no;
      std::string more = trim(strip_comment(line));
      value += " " + more;
      depth = depth_of(value);
    }
    if (depth != 0) doc.fail_at(start_line, "unbalanced brackets in value");

    Value v;
    v.line = start_line;
    if (value.empty()) doc.fail_at(start_line, "missing value for '" + key + "'");
    if (value.front() == '[') {
      std::string inner = trim(value.substr(1, value.size() - 2));
      if (!inner.empty() && inner.front() == '[') {
        // matrix: rows are bracketed vectors
        std::vector<Eigen::VectorXd> rows;
        for (const std::string& part : split_top_level(inner)) {
          std::string row = trim(part);
          if (row.size() < 2 || row.front() != '[' || row.back() != ']') {
            doc.fail_at(start_line, "malformed matrix row in '" + key + "'");
          }
          std::string row_inner = trim(row.substr(1, row.size() - 2));
          std::vector<std::string> cells =
              row_inner.empty() ? std::vector<std::string>{}
                                : split_top_level(row_inner);
          Eigen::VectorXd r(cells.size());
          for (std::size_t i = 0; i < cells.size(); ++i) {
            if (!parse_number(cells[i], r[i])) {
              doc.fail_at(start_line, "bad number '" + trim(cells[i]) +
                                          "' in '" + key + "'");
            }
          }
          rows.push_back(std::move(r));
        }
        if (rows.empty()) doc.fail_at(start_line, "empty matrix for '" + key + "'");
        Eigen::Index cols = rows[0].size();
        v.matrix.resize(static_cast<Eigen::Index>(rows.size()), cols);
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].size() != cols) {
            doc.fail_at(start_line, "ragged matrix rows in '" + key + "'");
          }
          v.matrix.row(static_cast<Eigen::Index>(i)) = rows[i];
        }
        v.type = Value::Type::Matrix;
      } else {
        std::vector<std::string> cells =
            inner.empty() ? std::vector<std::string>{} : split_top_level(inner);
        v.vector.resize(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i) {
          if (!parse_number(cells[i], v.vector[i])) {
            doc.fail_at(start_line,
                        "bad number '" + trim(cells[i]) + "' in '" + key + "'");
          }
        }
        v.type = Value::Type::Vector;
      }
    } else if (value == "true" || value == "false") {
      v.type = Value::Type::Bool;
      v.boolean = value == "true";
    } else if (parse_number(value, v.number)) {
      v.type = Value::Type::Number;
    } else {
      v.type = Value::Type::String;
      v.text = value;
    }
    auto [it, inserted] = doc.sections_[section].emplace(key, std::move(v));
    if (!inserted) {
      doc.fail_at(start_line, "duplicate key '" + key + "' in section [" +
                                  section + "]");
    }
  }
  return doc;
}

bool KvDoc::has_section(const std::string& section) const {
  return sections_.count(section) > 0;
}

bool KvDoc::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

const KvDoc::Value* KvDoc::find(const std::string& section,
                                const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return nullptr;
  auto jt = it->second.find(key);
  return jt == it->second.end() ? nullptr : &jt->second;
}

const KvDoc::Value& KvDoc::require(const std::string& section,
                                   const std::string& key,
                                   Value::Type type) const {
  const Value* v = find(section, key);
  if (v == nullptr) {
    fail(section, key, "missing required key");
  }
  if (v->type != type) {
    // A 1-element promotion keeps scalar plants pleasant to write.
    static const char* names[] = {"number", "bool", "string", "vector",
                                  "matrix"};
    fail_at(v->line, "key '" + key + "' in [" + section + "] must be a " +
                         names[static_cast<int>(type)]);
  }
  return *v;
}

double KvDoc::number(const std::string& section, const std::string& key) const {
  return require(section, key, Value::Type::Number).number;
}

double KvDoc::number_or(const std::string& section, const std::string& key,
                        double fallback) const {
  return has(section, key) ? number(section, key) : fallback;
}

bool KvDoc::flag_or(const std::string& section, const std::string& key,
                    bool fallback) const {
  if (!has(section, key)) return fallback;
  return require(section, key, Value::Type::Bool).boolean;
}

std::string KvDoc::word(const std::string& section,
                        const std::string& key) const {
  return require(section, key, Value::Type::String).text;
}

std::string KvDoc::word_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  return has(section, key) ? word(section, key) : fallback;
}

Eigen::VectorXd KvDoc::vector(const std::string& section,
                              const std::string& key) const {
  const Value* v = find(section, key);
  if (v != nullptr && v->type == Value::Type::Number) {
    return Eigen::VectorXd::Constant(1, v->number);
  }
  return require(section, key, Value::Type::Vector).vector;
}

Eigen::MatrixXd KvDoc::matrix(const std::string& section,
                              const std::string& key) const {
  const Value* v = find(section, key);
  if (v != nullptr && v->type == Value::Type::Number) {
    return Eigen::MatrixXd::Constant(1, 1, v->number);
  }
  return require(section, key, Value::Type::Matrix).matrix;
}

void KvDoc::check_known(
    const std::map<std::string, std::vector<std::string>>& schema) const {
  for (const auto& [section, entries] : sections_) {
    auto it = schema.find(section);
    if (it == schema.end()) {
      int line = 0;
      auto lt = section_lines_.find(section);
      if (lt != section_lines_.end()) line = lt->second;
      fail_at(line, "unknown section [" + section + "]");
    }
    for (const auto& [key, value] : entries) {
      const auto& allowed = it->second;
      if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
        fail_at(value.line, "unknown key '" + key + "' in [" + section + "]");
      }
    }
  }
}

void KvDoc::fail(const std::string& section, const std::string& key,
                 const std::string& why) const {
  int line = 0;
  if (const Value* v = find(section, key)) line = v->line;
  else {
    auto lt = section_lines_.find(section);
    if (lt != section_lines_.end()) line = lt->second;
  }
  fail_at(line, why + " ('" + key + "' in [" + section + "])");
}

void KvDoc::fail_at(int line, const std::string& why) const {
  throw Error(ErrorKind::Parse,
              source_ + ":" + std::to_string(line) + ": " + why);
}

}  // namespace sg
