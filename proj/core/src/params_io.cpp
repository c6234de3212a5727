#include "hyperfovea/params_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hyperfovea/error.hpp"

namespace hyperfovea {

namespace {

double required_number(const nlohmann::json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) {
    throw Error(ErrorCode::schema_error, std::string("params: missing key \"") + key + "\"");
  }
  if (!it->is_number()) {
    throw Error(ErrorCode::schema_error, std::string("params: \"") + key + "\" is not a number");
  }
  return it->get<double>();
}

}  // namespace

std::string params_to_json(const FoveationParams& params) {
  nlohmann::ordered_json doc;
  doc["ox"] = params.origin.x;
  doc["oy"] = params.origin.y;
  doc["R"] = params.radius;
  doc["alpha"] = params.alpha;
  doc["p"] = params.blend_exp;
  return doc.dump();
}

FoveationParams params_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::schema_error, std::string("params: ") + e.what());
  }
  if (!doc.is_object()) throw Error(ErrorCode::schema_error, "params: expected a JSON object");
  FoveationParams params;
  params.origin = {required_number(doc, "ox"), required_number(doc, "oy")};
  params.radius = required_number(doc, "R");
  params.alpha = required_number(doc, "alpha");
  params.blend_exp = required_number(doc, "p");
  validate(params);
  return params;
}

FoveationParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return params_from_json(buffer.str());
}

void save_params(const std::filesystem::path& path, const FoveationParams& params) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::io_error, "cannot write " + path.string());
  out << params_to_json(params) << '\n';
}

}  // namespace hyperfovea
