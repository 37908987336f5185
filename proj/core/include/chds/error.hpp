#pragma once

#include <stdexcept>
#include <string>

namespace chds {

/// Failure categories. The numeric values double as CLI exit codes.
enum class ErrorKind {
  InvalidArgument = 2,
  Config = 3,
  Mesh = 4,
  Solver = 5,
  Io = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline int exit_code(ErrorKind kind) { return static_cast<int>(kind); }

}  // namespace chds
