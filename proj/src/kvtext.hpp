#pragma once

#include <Eigen/Core>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace sg {

// Line-oriented key-value format with [sections], `key = value` entries,
// `#` comments, and bracketed arrays that may continue across lines:
//
//   [plant]
//   kind = linear_output
//   A = [[0, 1],
//        [-2, -2]]
//
// Values: number | true/false | [v, ...] | [[...], ...] | bare word.
class KvDoc {
 public:
  struct Value {
    enum class Type { Number, Bool, String, Vector, Matrix };
    Type type = Type::String;
    double number = 0.0;
    bool boolean = false;
    std::string text;
    Eigen::VectorXd vector;
    Eigen::MatrixXd matrix;
    int line = 0;
  };

  static KvDoc parse(const std::string& text, const std::string& source_name);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  const Value* find(const std::string& section, const std::string& key) const;

  double number(const std::string& section, const std::string& key) const;
  double number_or(const std::string& section, const std::string& key,
                   double fallback) const;
  bool flag_or(const std::string& section, const std::string& key,
               bool fallback) const;
  std::string word(const std::string& section, const std::string& key) const;
  std::string word_or(const std::string& section, const std::string& key,
                      const std::string& fallback) const;
  Eigen::VectorXd vector(const std::string& section,
                         const std::string& key) const;
  Eigen::MatrixXd matrix(const std::string& section,
                         const std::string& key) const;

  // Rejects sections/keys outside the allowed sets (typo protection).
  void check_known(
      const std::map<std::string, std::vector<std::string>>& schema) const;

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& why) const;
  [[noreturn]] void fail_at(int line, const std::string& why) const;

  const std::string& source() const { return source_; }

 private:
  const Value& require(const std::string& section, const std::string& key,
                       Value::Type type) const;

  std::string source_;
  std::map<std::string, std::map<std::string, Value>> sections_;
  std::map<std::string, int> section_lines_;
};

}  // namespace sg
