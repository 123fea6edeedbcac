#pragma once

#include <stdexcept>
#include <string>

namespace emdim {

enum class ErrorKind {
  InvalidGeometry,
  InvalidParameter,
  Format,
  Topology,
  Classification,
  Coefficient,
  CouplingGeometry,
  Generation,
  Domain,
  Dimension,
  Preconditioner,
  Io,
  Config,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base exception for every failure raised by the library. The kind lets
/// callers (the CLI in particular) map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidGeometry: return "invalid-geometry";
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::Format: return "format";
    case ErrorKind::Topology: return "topology";
    case ErrorKind::Classification: return "classification";
    case ErrorKind::Coefficient: return "coefficient";
    case ErrorKind::CouplingGeometry: return "coupling-geometry";
    case ErrorKind::Generation: return "generation";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Dimension: return "dimension";
    case ErrorKind::Preconditioner: return "preconditioner";
    case ErrorKind::Io: return "io";
    case ErrorKind::Config: return "config";
  }
  return "unknown";
}

}  // namespace emdim
