#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hyperfovea {

enum class ErrorCode {
  invalid_params,
  not_converged,
  singular_jacobian,
  degenerate_box,
  empty_input,
  empty_effective_set,
  unknown_class,
  nonpositive_height,
  negative_distance,
  malformed_annotation,
  schema_error,
  unknown_category,
  io_error,
  dimension_mismatch,
};

std::string_view to_string(ErrorCode code) noexcept;

// All library failures are reported through this type; `code()` carries the
// taxonomy, `what()` a human-readable message prefixed with the code name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hyperfovea
