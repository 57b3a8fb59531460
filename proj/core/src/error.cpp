#include "responsekit/error.hpp"

namespace responsekit {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid_argument";
    case ErrorCode::non_monotone_times: return "non_monotone_times";
    case ErrorCode::length_mismatch: return "length_mismatch";
    case ErrorCode::non_finite_value: return "non_finite_value";
    case ErrorCode::dimension_mismatch: return "dimension_mismatch";
    case ErrorCode::out_of_range: return "out_of_range";
    case ErrorCode::resource_limit: return "resource_limit";
    case ErrorCode::divergence: return "divergence";
    case ErrorCode::grid_mismatch: return "grid_mismatch";
    case ErrorCode::ill_conditioned: return "ill_conditioned";
    case ErrorCode::not_stationary: return "not_stationary";
    case ErrorCode::corrupt_file: return "corrupt_file";
    case ErrorCode::version_mismatch: return "version_mismatch";
    case ErrorCode::io_error: return "io_error";
    case ErrorCode::config_error: return "config_error";
    case ErrorCode::unknown_command: return "unknown_command";
  }
  return "unknown";
}

}  // namespace responsekit
