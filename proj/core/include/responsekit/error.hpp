#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace responsekit {

enum class ErrorCode {
  invalid_argument,
  non_monotone_times,
  length_mismatch,
  non_finite_value,
  dimension_mismatch,
  out_of_range,
  resource_limit,
  divergence,
  grid_mismatch,
  ill_conditioned,
  not_stationary,
  corrupt_file,
  version_mismatch,
  io_error,
  config_error,
  unknown_command,
};

std::string_view to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a code so the CLI can emit a
// machine-readable report. `field` names the offending config/input field
// when one is known (dotted path, e.g. "srnn.gamma").
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field = {})
      : std::runtime_error(message), code_(code), field_(std::move(field)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field() const noexcept { return field_; }

 private:
  ErrorCode code_;
  std::string field_;
};

// Raised by the simulator when a state leaves the divergence guard.
class DivergenceError : public Error {
 public:
  DivergenceError(std::size_t step, double time)
      : Error(ErrorCode::divergence,
              "trajectory diverged at step " + std::to_string(step) +
                  " (t=" + std::to_string(time) + ")"),
        step_(step) {}

  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

}  // namespace responsekit
