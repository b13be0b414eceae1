#pragma once

#include <stdexcept>
#include <string>

namespace sg {

// Error categories mirror the status codes of the C API (sgcert.h).
enum class ErrorKind {
  InvalidArgument,
  Parse,
  Validation,
  Blowup,
  Io,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

// Integration aborted on a non-finite state; carries the time of blow-up.
class BlowupError : public Error {
 public:
  explicit BlowupError(double t)
      : Error(ErrorKind::Blowup,
              "state became non-finite at t=" + std::to_string(t)),
        time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

}  // namespace sg
