#pragma once

#include <stdexcept>
#include <string>

namespace dapc {

// Error classes map onto distinct CLI exit codes.
enum class ErrorKind {
  Io = 3,
  Malformed = 4,
  Parse = 5,
  MissingField = 6,
  Validation = 7,
  Infeasible = 8,
  InsufficientData = 9,
  Domain = 10,
  UndefinedMetric = 11,
  Placement = 12,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }
  int exit_code() const noexcept { return static_cast<int>(kind_); }

 private:
  ErrorKind kind_;
};

const char* to_string(ErrorKind kind) noexcept;

}  // namespace dapc
