#pragma once

#include <filesystem>
#include <iosfwd>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hyperfovea/box.hpp"
#include "hyperfovea/range_eval.hpp"

namespace hyperfovea {

struct CocoImage {
  long long id = 0;
  std::size_t width = 0;
  std::size_t height = 0;
};

struct CocoCategory {
  long long id = 0;
  std::string name;
};

// Parsed COCO annotation file with categories resolved against a class table.
struct CocoDataset {
  std::vector<CocoImage> images;
  std::vector<CocoCategory> categories;
  std::map<long long, int> category_to_class;
  std::vector<RangedDetection> gts;

  const CocoImage* find_image(long long id) const;
};

// Throws Error(io_error), Error(schema_error) naming the JSON path, or
// Error(unknown_category) for categories used but missing from `heights`.
CocoDataset load_coco_annotations(const std::filesystem::path& path,
                                  const ClassHeightTable& heights, const CameraSpec& camera);

// COCO result list: [{"image_id", "category_id", "bbox", "score"}, ...].
// Boxes are clamped to their image before distances are estimated.
std::vector<RangedDetection> load_coco_results(const std::filesystem::path& path,
                                               const CocoDataset& dataset,
                                               const ClassHeightTable& heights,
                                               const CameraSpec& camera);

struct Detections {
  std::vector<RangedDetection> gts;
  std::vector<RangedDetection> preds;
};

Detections ingest_coco(const std::filesystem::path& annotations,
                       const std::optional<std::filesystem::path>& results,
                       const ClassHeightTable& heights, const CameraSpec& camera);

// Every annotation box of a COCO file in normalized center form, using the
// size of its image. Categories are not resolved.
std::vector<EuclideanBox> load_normalized_boxes(const std::filesystem::path& path);

// {"Person": 0.70, ...}; file order becomes class id order.
ClassHeightTable load_class_heights(const std::filesystem::path& path);

// COCO [x_min, y_min, w, h] pixels <-> normalized center form.
EuclideanBox pixel_box_to_norm(double x_min, double y_min, double w, double h,
                               std::size_t image_width, std::size_t image_height);
std::array<double, 4> norm_box_to_pixel(const EuclideanBox& box, std::size_t image_width,
                                        std::size_t image_height);

std::string report_to_json(const EvalReport& report, const std::string& method);
// method,mAP,mAP_0_50,mAP_50_150,mAP_150_250,mAP_250plus,mAP50,mAP75,<classes...>
void write_report_csv(std::ostream& out, const EvalReport& report, const std::string& method,
                      bool header = true);

}  // namespace hyperfovea
