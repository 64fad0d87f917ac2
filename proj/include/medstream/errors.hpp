#ifndef MEDSTREAM_ERRORS_HPP
#define MEDSTREAM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace medstream {

// Process exit codes. Library errors carry one of these so the CLI can map
// failure categories onto distinct, documented codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,      // malformed input, invalid configuration, parse failure
  kExitNotReady = 3,   // stream has not accumulated enough data yet
  kExitNumerical = 4,  // singular design, non-convergence, separation
  kExitIntegrity = 5,  // checkpoint corruption or format mismatch
};

class Error : public std::runtime_error {
 public:
  Error(int exit_code, const std::string& what)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const noexcept { return exit_code_; }

 private:
  int exit_code_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(kExitInput, what) {}
};

// Bad model dimensions or inconsistent stream configuration.
class ConfigError : public InputError {
 public:
  explicit ConfigError(const std::string& what) : InputError(what) {}
};

class NotReadyError : public Error {
 public:
  explicit NotReadyError(const std::string& what) : Error(kExitNotReady, what) {}
};

class NumericalError : public Error {
 public:
  explicit NumericalError(const std::string& what) : Error(kExitNumerical, what) {}
};

// Accumulated information matrix is singular or too ill-conditioned to trust.
class RankDeficiencyError : public NumericalError {
 public:
  explicit RankDeficiencyError(const std::string& what) : NumericalError(what) {}
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, double last_residual_norm)
      : NumericalError(what), last_residual_norm_(last_residual_norm) {}
  double last_residual_norm() const noexcept { return last_residual_norm_; }

 private:
  double last_residual_norm_;
};

class SeparationError : public NumericalError {
 public:
  explicit SeparationError(const std::string& what) : NumericalError(what) {}
};

// Inference requested on a degenerate fit (zero standard errors).
class DegenerateInferenceError : public NumericalError {
 public:
  explicit DegenerateInferenceError(const std::string& what) : NumericalError(what) {}
};

class IntegrityError : public Error {
 public:
  explicit IntegrityError(const std::string& what) : Error(kExitIntegrity, what) {}
};

}  // namespace medstream

#endif  // MEDSTREAM_ERRORS_HPP
