#include "hyperfovea/error.hpp"

namespace hyperfovea {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_params: return "invalid-params";
    case ErrorCode::not_converged: return "not-converged";
    case ErrorCode::singular_jacobian: return "singular-jacobian";
    case ErrorCode::degenerate_box: return "degenerate-box";
    case ErrorCode::empty_input: return "empty-input";
    case ErrorCode::empty_effective_set: return "empty-effective-set";
    case ErrorCode::unknown_class: return "unknown-class";
    case ErrorCode::nonpositive_height: return "nonpositive-height";
    case ErrorCode::negative_distance: return "negative-distance";
    case ErrorCode::malformed_annotation: return "malformed-annotation";
    case ErrorCode::schema_error: return "schema-error";
    case ErrorCode::unknown_category: return "unknown-category";
    case ErrorCode::io_error: return "io-error";
    case ErrorCode::dimension_mismatch: return "dimension-mismatch";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace hyperfovea
