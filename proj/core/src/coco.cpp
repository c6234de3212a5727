#include "hyperfovea/coco.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hyperfovea/error.hpp"

namespace hyperfovea {

using nlohmann::json;

namespace {

json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::schema_error, path.string() + ": " + e.what());
  }
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) throw Error(ErrorCode::schema_error, where + ": expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw Error(ErrorCode::schema_error, where + "." + key + ": missing");
  }
  return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_number()) throw Error(ErrorCode::schema_error, where + "." + key + ": not a number");
  return v.get<double>();
}

long long integer(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_number_integer()) {
    throw Error(ErrorCode::schema_error, where + "." + key + ": not an integer");
  }
  return v.get<long long>();
}

const json& array_member(const json& obj, const char* key, const std::string& where) {
  const json& v = member(obj, key, where);
  if (!v.is_array()) throw Error(ErrorCode::schema_error, where + "." + key + ": not an array");
  return v;
}

std::array<double, 4> bbox(const json& obj, const std::string& where) {
  const json& v = member(obj, "bbox", where);
  if (!v.is_array() || v.size() != 4) {
    throw Error(ErrorCode::schema_error, where + ".bbox: expected [x, y, w, h]");
  }
  std::array<double, 4> out{};
  for (std::size_t i = 0; i < 4; ++i) {
    if (!v[i].is_number()) {
      throw Error(ErrorCode::schema_error, where + ".bbox[" + std::to_string(i) + "]: not a number");
    }
    out[i] = v[i].get<double>();
  }
  if (!(out[2] > 0.0 && out[3] > 0.0)) {
    throw Error(ErrorCode::malformed_annotation, where + ".bbox: width and height must be positive");
  }
  return out;
}

int resolve_class(const CocoDataset& dataset, long long category_id, const std::string& where) {
  const auto it = dataset.category_to_class.find(category_id);
  if (it != dataset.category_to_class.end()) return it->second;
  const auto cat = std::find_if(dataset.categories.begin(), dataset.categories.end(),
                                [&](const CocoCategory& c) { return c.id == category_id; });
  if (cat == dataset.categories.end()) {
    throw Error(ErrorCode::malformed_annotation,
                where + ".category_id: undeclared category " + std::to_string(category_id));
  }
  throw Error(ErrorCode::unknown_category,
              "category \"" + cat->name + "\" has no entry in the class height table");
}

void write_optional(std::ostream& out, const std::optional<double>& v) {
  if (v) out << *v;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

const CocoImage* CocoDataset::find_image(long long id) const {
  const auto it = std::find_if(images.begin(), images.end(),
                               [id](const CocoImage& img) { return img.id == id; });
  return it == images.end() ? nullptr : &*it;
}

CocoDataset load_coco_annotations(const std::filesystem::path& path,
                                  const ClassHeightTable& heights, const CameraSpec& camera) {
  const json doc = parse_file(path);
  if (!doc.is_object()) throw Error(ErrorCode::schema_error, "$: expected an object");
  CocoDataset dataset;

  if (doc.contains("images")) {
    const json& images = array_member(doc, "images", "$");
    for (std::size_t i = 0; i < images.size(); ++i) {
      const std::string where = "images[" + std::to_string(i) + "]";
      CocoImage img;
      img.id = integer(images[i], "id", where);
      const long long w = integer(images[i], "width", where);
      const long long h = integer(images[i], "height", where);
      if (w <= 0 || h <= 0) {
        throw Error(ErrorCode::malformed_annotation, where + ": image size must be positive");
      }
      img.width = static_cast<std::size_t>(w);
      img.height = static_cast<std::size_t>(h);
      dataset.images.push_back(img);
    }
  }

  if (doc.contains("categories")) {
    const json& cats = array_member(doc, "categories", "$");
    for (std::size_t i = 0; i < cats.size(); ++i) {
      const std::string where = "categories[" + std::to_string(i) + "]";
      const json& name = member(cats[i], "name", where);
      if (!name.is_string()) throw Error(ErrorCode::schema_error, where + ".name: not a string");
      CocoCategory cat{integer(cats[i], "id", where), name.get<std::string>()};
      if (const auto cls = heights.find(cat.name)) dataset.category_to_class[cat.id] = *cls;
      dataset.categories.push_back(std::move(cat));
    }
  }

  if (doc.contains("annotations")) {
    const json& anns = array_member(doc, "annotations", "$");
    for (std::size_t i = 0; i < anns.size(); ++i) {
      const std::string where = "annotations[" + std::to_string(i) + "]";
      RangedDetection d;
      d.image_id = integer(anns[i], "image_id", where);
      d.class_id = resolve_class(dataset, integer(anns[i], "category_id", where), where);
      const auto b = bbox(anns[i], where);
      d.x_min = b[0];
      d.y_min = b[1];
      d.w_px = b[2];
      d.h_px = b[3];
      d.score = 1.0;
      d.distance_m = estimate_distance(d.h_px, d.class_id, heights, camera);
      dataset.gts.push_back(d);
    }
  }
  return dataset;
}

std::vector<RangedDetection> load_coco_results(const std::filesystem::path& path,
                                               const CocoDataset& dataset,
                                               const ClassHeightTable& heights,
                                               const CameraSpec& camera) {
  const json doc = parse_file(path);
  if (!doc.is_array()) throw Error(ErrorCode::schema_error, "$: expected an array of results");
  std::vector<RangedDetection> preds;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "[" + std::to_string(i) + "]";
    RangedDetection d;
    d.image_id = integer(doc[i], "image_id", where);
    d.class_id = resolve_class(dataset, integer(doc[i], "category_id", where), where);
    const auto b = bbox(doc[i], where);
    d.score = number(doc[i], "score", where);
    if (!(d.score >= 0.0 && d.score <= 1.0)) {
      throw Error(ErrorCode::malformed_annotation, where + ".score: must lie in [0, 1]");
    }
    double x0 = b[0], y0 = b[1], x1 = b[0] + b[2], y1 = b[1] + b[3];
    if (const CocoImage* img = dataset.find_image(d.image_id)) {
      x0 = std::clamp(x0, 0.0, static_cast<double>(img->width));
      x1 = std::clamp(x1, 0.0, static_cast<double>(img->width));
      y0 = std::clamp(y0, 0.0, static_cast<double>(img->height));
      y1 = std::clamp(y1, 0.0, static_cast<double>(img->height));
    }
    if (!(x1 > x0 && y1 > y0)) {
      throw Error(ErrorCode::malformed_annotation, where + ".bbox: empty after clamping to image");
    }
    d.x_min = x0;
    d.y_min = y0;
    d.w_px = x1 - x0;
    d.h_px = y1 - y0;
    d.distance_m = estimate_distance(d.h_px, d.class_id, heights, camera);
    preds.push_back(d);
  }
  return preds;
}

Detections ingest_coco(const std::filesystem::path& annotations,
                       const std::optional<std::filesystem::path>& results,
                       const ClassHeightTable& heights, const CameraSpec& camera) {
  CocoDataset dataset = load_coco_annotations(annotations, heights, camera);
  Detections out;
  if (results) out.preds = load_coco_results(*results, dataset, heights, camera);
  out.gts = std::move(dataset.gts);
  return out;
}

std::vector<EuclideanBox> load_normalized_boxes(const std::filesystem::path& path) {
  const json doc = parse_file(path);
  if (!doc.is_object()) throw Error(ErrorCode::schema_error, "$: expected an object");
  std::map<long long, std::pair<std::size_t, std::size_t>> sizes;
  if (doc.contains("images")) {
    const json& images = array_member(doc, "images", "$");
    for (std::size_t i = 0; i < images.size(); ++i) {
      const std::string where = "images[" + std::to_string(i) + "]";
      const long long w = integer(images[i], "width", where);
      const long long h = integer(images[i], "height", where);
      if (w <= 0 || h <= 0) {
        throw Error(ErrorCode::malformed_annotation, where + ": image size must be positive");
      }
      sizes[integer(images[i], "id", where)] = {static_cast<std::size_t>(w),
                                                static_cast<std::size_t>(h)};
    }
  }
  std::vector<EuclideanBox> boxes;
  if (!doc.contains("annotations")) return boxes;
  const json& anns = array_member(doc, "annotations", "$");
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const std::string where = "annotations[" + std::to_string(i) + "]";
    const long long image_id = integer(anns[i], "image_id", where);
    const auto it = sizes.find(image_id);
    if (it == sizes.end()) {
      throw Error(ErrorCode::malformed_annotation,
                  where + ".image_id: no image " + std::to_string(image_id));
    }
    const auto b = bbox(anns[i], where);
    boxes.push_back(pixel_box_to_norm(b[0], b[1], b[2], b[3], it->second.first, it->second.second));
  }
  return boxes;
}

ClassHeightTable load_class_heights(const std::filesystem::path& path) {
  const nlohmann::ordered_json doc = [&] {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
    try {
      return nlohmann::ordered_json::parse(in);
    } catch (const json::parse_error& e) {
      throw Error(ErrorCode::schema_error, path.string() + ": " + e.what());
    }
  }();
  if (!doc.is_object()) throw Error(ErrorCode::schema_error, "$: expected {name: height}");
  std::vector<ClassHeight> classes;
  for (const auto& [name, value] : doc.items()) {
    if (!value.is_number()) throw Error(ErrorCode::schema_error, "$." + name + ": not a number");
    classes.push_back({name, value.get<double>()});
  }
  return ClassHeightTable(std::move(classes));
}

EuclideanBox pixel_box_to_norm(double x_min, double y_min, double w, double h,
                               std::size_t image_width, std::size_t image_height) {
  const double sx = 2.0 / static_cast<double>(image_width);
  const double sy = 2.0 / static_cast<double>(image_height);
  return {{(x_min + 0.5 * w) * sx - 1.0, (y_min + 0.5 * h) * sy - 1.0}, w * sx, h * sy};
}

std::array<double, 4> norm_box_to_pixel(const EuclideanBox& box, std::size_t image_width,
                                        std::size_t image_height) {
  const double sx = 0.5 * static_cast<double>(image_width);
  const double sy = 0.5 * static_cast<double>(image_height);
  const double w = box.w * sx;
  const double h = box.h * sy;
  return {(box.center.x + 1.0) * sx - 0.5 * w, (box.center.y + 1.0) * sy - 0.5 * h, w, h};
}

std::string report_to_json(const EvalReport& report, const std::string& method) {
  nlohmann::ordered_json doc;
  doc["method"] = method;
  doc["mAP"] = optional_json(report.map);
  for (std::size_t b = 0; b < kDistanceBins; ++b) {
    doc[std::string(bin_label(static_cast<int>(b)))] = optional_json(report.map_by_bin[b]);
  }
  doc["mAP50"] = optional_json(report.map50);
  doc["mAP75"] = optional_json(report.map75);
  nlohmann::ordered_json per_class = nlohmann::ordered_json::object();
  for (const ClassAp& c : report.per_class) per_class[c.name] = optional_json(c.ap);
  doc["per_class"] = per_class;
  return doc.dump(2);
}

void write_report_csv(std::ostream& out, const EvalReport& report, const std::string& method,
                      bool header) {
  if (header) {
    out << "method,mAP";
    for (std::size_t b = 0; b < kDistanceBins; ++b) out << ',' << bin_label(static_cast<int>(b));
    out << ",mAP50,mAP75";
    for (const ClassAp& c : report.per_class) out << ',' << c.name;
    out << '\n';
  }
  const auto flags = out.flags();
  const auto precision = out.precision();
  out << std::fixed << std::setprecision(6) << method << ',';
  write_optional(out, report.map);
  for (const auto& v : report.map_by_bin) {
    out << ',';
    write_optional(out, v);
  }
  out << ',';
  write_optional(out, report.map50);
  out << ',';
  write_optional(out, report.map75);
  for (const ClassAp& c : report.per_class) {
    out << ',';
    write_optional(out, c.ap);
  }
  out << '\n';
  out.flags(flags);
  out.precision(precision);
}

}  // namespace hyperfovea
