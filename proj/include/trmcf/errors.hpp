#pragma once

#include <stdexcept>
#include <string>

namespace trmcf {

enum class ErrorKind {
  InvalidArgument,
  Config,
  ChartGuard,
  Immersion,
  TotallyReal,
  BlowUp,
  Solver,
  Io,
  Format,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Process exit code for an error class: config 2, blow-up 3, solver 4, io 5, other 1.
int exit_code(ErrorKind kind) noexcept;
const char* to_string(ErrorKind kind) noexcept;

}  // namespace trmcf
