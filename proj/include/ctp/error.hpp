#pragma once

#include <stdexcept>
#include <string>

namespace ctp {

/// Error categories raised by the engine. The C API maps each one to a
/// status code; the CLI maps them to exit codes.
enum class Errc {
  Config,            ///< bad grid / parameter / incompatible grids
  Validation,        ///< data violates a type invariant (negative density ...)
  Regularity,        ///< input is deterministic where a regular one is required
  Factorization,     ///< factor could not satisfy its support contract
  Domain,            ///< argument outside the operation's domain (tau <= 0 ...)
  Degenerate,        ///< every frequency sample was masked
  InsufficientData,  ///< path too short for the requested edge margins
  Window,            ///< innovations do not cover the predictor kernel
  IllConditioned,    ///< normal equations too ill-conditioned even with jitter
  Usage,             ///< inconsistent operands (mismatched tau ...)
  Truncation,        ///< covariance not decayed within the transform window
  Io,                ///< file could not be read or written
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace ctp
