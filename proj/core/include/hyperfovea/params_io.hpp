#pragma once

#include <filesystem>
#include <string>

#include "hyperfovea/geometry.hpp"

namespace hyperfovea {

// {"ox":..,"oy":..,"R":..,"alpha":..,"p":..}; doubles are written with enough
// digits to round-trip exactly.
std::string params_to_json(const FoveationParams& params);
// Throws Error(schema_error) on missing/non-numeric keys and
// Error(invalid_params) if the decoded tuple fails validate().
FoveationParams params_from_json(const std::string& text);

FoveationParams load_params(const std::filesystem::path& path);
void save_params(const std::filesystem::path& path, const FoveationParams& params);

}  // namespace hyperfovea
