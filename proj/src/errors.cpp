#include "trmcf/errors.hpp"

namespace trmcf {

Error::Error(ErrorKind kind, const std::string& message)
    : std::runtime_error(message), kind_(kind) {}

int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::Config: return 2;
    case ErrorKind::BlowUp:
    case ErrorKind::ChartGuard:
    case ErrorKind::Immersion:
    case ErrorKind::TotallyReal: return 3;
    case ErrorKind::Solver: return 4;
    case ErrorKind::Io:
    case ErrorKind::Format: return 5;
    case ErrorKind::InvalidArgument: return 1;
  }
  return 1;
}

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid-argument";
    case ErrorKind::Config: return "config";
    case ErrorKind::ChartGuard: return "chart-guard";
    case ErrorKind::Immersion: return "immersion";
    case ErrorKind::TotallyReal: return "totally-real";
    case ErrorKind::BlowUp: return "blow-up";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::Io: return "io";
    case ErrorKind::Format: return "format";
  }
  return "unknown";
}

}  // namespace trmcf
