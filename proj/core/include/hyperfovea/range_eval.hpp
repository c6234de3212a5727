#pragma once

// Range-aware detection evaluation. Object distance comes from the pinhole
// relation d = f * H_c / h_px with per-class average heights, and average
// precision is reported overall, per distance bin and per class.

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hyperfovea {

struct ClassHeight {
  std::string name;
  double height_m = 0.0;
};

// Ordered class list; a detection's class_id indexes into it.
class ClassHeightTable {
 public:
  ClassHeightTable() = default;
  explicit ClassHeightTable(std::vector<ClassHeight> classes);

  // Person 0.70, Bike 0.71, Car 1.89, Sign 1.26, Truck 2.90, Debris 0.41 (meters).
  static ClassHeightTable defaults();

  std::size_t size() const noexcept { return classes_.size(); }
  const ClassHeight& at(int class_id) const;
  // Case-insensitive lookup by name.
  std::optional<int> find(std::string_view name) const;
  const std::vector<ClassHeight>& classes() const noexcept { return classes_; }

 private:
  std::vector<ClassHeight> classes_;
};

struct CameraSpec {
  double focal_px = 0.0;

  static constexpr CameraSpec truckdrive() { return {3304.0}; }
  static constexpr CameraSpec argoverse2() { return {1682.0}; }
};

// Pixel box in COCO convention plus the derived distance.
struct RangedDetection {
  long long image_id = 0;
  int class_id = 0;
  double x_min = 0.0;
  double y_min = 0.0;
  double w_px = 0.0;
  double h_px = 0.0;
  double score = 1.0;
  double distance_m = 0.0;
};

inline constexpr std::size_t kDistanceBins = 4;
// Lower edges of the half-open bins [0,50) [50,150) [150,250) [250,inf).
inline constexpr std::array<double, kDistanceBins> kBinLowerEdges{0.0, 50.0, 150.0, 250.0};

double estimate_distance(double h_px, int class_id, const ClassHeightTable& heights,
                         const CameraSpec& camera);
int assign_bin(double distance_m);
std::string_view bin_label(int bin);

// Fills distance_m from the box height.
void annotate_distance(std::span<RangedDetection> detections, const ClassHeightTable& heights,
                       const CameraSpec& camera);

double box_iou(const RangedDetection& a, const RangedDetection& b) noexcept;

// Precision/recall summaries over a score-ranked list of TP (true) / FP (false)
// decisions with `positives` ground truths.
double ap_101_point(const std::vector<bool>& ranked_tp, std::size_t positives);
double ap_all_points(const std::vector<bool>& ranked_tp, std::size_t positives);

struct ClassAp {
  std::string name;
  std::optional<double> ap;  // empty when the class has no ground truth
};

// Values are empty where no ground truth exists for the slice.
struct EvalReport {
  std::optional<double> map;  // IoU 0.50:0.05:0.95, 101-point
  std::array<std::optional<double>, kDistanceBins> map_by_bin{};
  std::optional<double> map50;  // all-point
  std::optional<double> map75;
  std::vector<ClassAp> per_class;
};

// Greedy matching per image and class: predictions in descending score order
// (input order on ties) take the unmatched ground truth of highest IoU (lowest
// index on ties) at or above the threshold. In a distance bin, predictions
// matched to out-of-bin ground truth are ignored and unmatched predictions
// count as false positives only in their own bin.
EvalReport evaluate(std::span<const RangedDetection> gts, std::span<const RangedDetection> preds,
                    const ClassHeightTable& classes);

std::array<double, 10> coco_iou_thresholds() noexcept;

}  // namespace hyperfovea
