#pragma once

#include <stdexcept>
#include <string>

namespace npslab {

enum class ErrorCode {
  InvalidArgument = 1,
  Config = 2,
  Io = 3,
  NoConvergence = 4,
  NewtonDivergence = 5,
  PositivityLoss = 6,
  Cfl = 7,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct InvalidArgument : Error {
  explicit InvalidArgument(const std::string& w) : Error(ErrorCode::InvalidArgument, w) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& w) : Error(ErrorCode::Config, w) {}
};

struct IoError : Error {
  explicit IoError(const std::string& w) : Error(ErrorCode::Io, w) {}
};

/// Outer iteration cap reached. Carries the last update size and residual.
struct ConvergenceError : Error {
  ConvergenceError(const std::string& w, double last_update, double last_residual)
      : Error(ErrorCode::NoConvergence, w), last_update(last_update), last_residual(last_residual) {}
  double last_update;
  double last_residual;
};

struct NewtonDivergence : Error {
  explicit NewtonDivergence(const std::string& w) : Error(ErrorCode::NewtonDivergence, w) {}
};

struct PositivityLoss : Error {
  explicit PositivityLoss(const std::string& w) : Error(ErrorCode::PositivityLoss, w) {}
};

struct CflViolation : Error {
  CflViolation(const std::string& w, double admissible_dt)
      : Error(ErrorCode::Cfl, w), admissible_dt(admissible_dt) {}
  double admissible_dt;
};

}  // namespace npslab
