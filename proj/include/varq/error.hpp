#pragma once

#include <stdexcept>
#include <string>

namespace varq {

enum class ErrorCode {
  invalid_argument = 1,
  grid_mismatch,
  invalid_config,
  numerical_failure,
  density_floor,
  phase_unwrap,
  verification_failure,
  io_failure,
};

/// Base of every exception thrown by the library. The C API maps `code()`
/// onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorCode::invalid_argument, what) {}
};

class GridMismatch : public Error {
 public:
  explicit GridMismatch(const std::string& what) : Error(ErrorCode::grid_mismatch, what) {}
};

/// Malformed or physically inconsistent scenario configuration. The message
/// lists every violation with its field path.
class InvalidConfig : public Error {
 public:
  explicit InvalidConfig(const std::string& what) : Error(ErrorCode::invalid_config, what) {}
};

class IoFailure : public Error {
 public:
  explicit IoFailure(const std::string& what) : Error(ErrorCode::io_failure, what) {}
};

class NumericalFailure : public Error {
 public:
  explicit NumericalFailure(const std::string& what) : Error(ErrorCode::numerical_failure, what) {}
};

/// Raised when a density drops below the floor where the (density, phase)
/// equations stop being well posed, e.g. at a node of an excited state.
class DensityFloorBreach : public Error {
 public:
  DensityFloorBreach(const std::string& what, double position, double time)
      : Error(ErrorCode::density_floor, what), position_(position), time_(time) {}
  double position() const noexcept { return position_; }
  double time() const noexcept { return time_; }

 private:
  double position_;
  double time_;
};

class PhaseUnwrapFailure : public Error {
 public:
  PhaseUnwrapFailure(const std::string& what, double position)
      : Error(ErrorCode::phase_unwrap, what), position_(position) {}
  double position() const noexcept { return position_; }

 private:
  double position_;
};

class VerificationFailure : public Error {
 public:
  explicit VerificationFailure(const std::string& what) : Error(ErrorCode::verification_failure, what) {}
};

}  // namespace varq
