#include "hyperfovea/range_eval.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "hyperfovea/error.hpp"

namespace hyperfovea {

namespace {

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
           return std::tolower(x) == std::tolower(y);
         });
}

// Precision/recall curve for a ranked TP/FP list.
void pr_curve(const std::vector<bool>& ranked_tp, std::size_t positives, std::vector<double>& recall,
              std::vector<double>& precision) {
  recall.resize(ranked_tp.size());
  precision.resize(ranked_tp.size());
  std::size_t tp = 0;
  for (std::size_t i = 0; i < ranked_tp.size(); ++i) {
    if (ranked_tp[i]) ++tp;
    recall[i] = static_cast<double>(tp) / static_cast<double>(positives);
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
  }
  // Monotone envelope from the right.
  for (std::size_t i = precision.size(); i-- > 1;) {
    precision[i - 1] = std::max(precision[i - 1], precision[i]);
  }
}

std::optional<double> mean_of(const std::vector<double>& values) {
  if (values.empty()) return std::nullopt;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

enum class Outcome { true_positive, false_positive, ignored };

struct MatchResult {
  std::vector<int> matched_gt;  // per prediction, -1 when unmatched
};

}  // namespace

ClassHeightTable::ClassHeightTable(std::vector<ClassHeight> classes) : classes_(std::move(classes)) {
  for (const ClassHeight& c : classes_) {
    if (!(c.height_m > 0.0) || !std::isfinite(c.height_m)) {
      throw Error(ErrorCode::invalid_params, "class height for " + c.name + " must be positive");
    }
  }
}

ClassHeightTable ClassHeightTable::defaults() {
  return ClassHeightTable({{"Person", 0.70},
                           {"Bike", 0.71},
                           {"Car", 1.89},
                           {"Sign", 1.26},
                           {"Truck", 2.90},
                           {"Debris", 0.41}});
}

const ClassHeight& ClassHeightTable::at(int class_id) const {
  if (class_id < 0 || static_cast<std::size_t>(class_id) >= classes_.size()) {
    throw Error(ErrorCode::unknown_class, "class id " + std::to_string(class_id));
  }
  return classes_[static_cast<std::size_t>(class_id)];
}

std::optional<int> ClassHeightTable::find(std::string_view name) const {
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    if (iequals(classes_[i].name, name)) return static_cast<int>(i);
  }
  return std::nullopt;
}

double estimate_distance(double h_px, int class_id, const ClassHeightTable& heights,
                         const CameraSpec& camera) {
  if (!(h_px > 0.0) || !std::isfinite(h_px)) {
    std::ostringstream msg;
    msg << "box height must be positive, got " << h_px;
    throw Error(ErrorCode::nonpositive_height, msg.str());
  }
  if (!(camera.focal_px > 0.0)) {
    throw Error(ErrorCode::invalid_params, "focal length must be positive");
  }
  return camera.focal_px * heights.at(class_id).height_m / h_px;
}

int assign_bin(double distance_m) {
  if (!(distance_m >= 0.0)) {
    std::ostringstream msg;
    msg << "distance must be non-negative, got " << distance_m;
    throw Error(ErrorCode::negative_distance, msg.str());
  }
  int bin = 0;
  for (std::size_t b = 1; b < kDistanceBins; ++b) {
    if (distance_m >= kBinLowerEdges[b]) bin = static_cast<int>(b);
  }
  return bin;
}

std::string_view bin_label(int bin) {
  static constexpr std::array<std::string_view, kDistanceBins> labels{
      "mAP_0_50", "mAP_50_150", "mAP_150_250", "mAP_250plus"};
  return labels.at(static_cast<std::size_t>(bin));
}

void annotate_distance(std::span<RangedDetection> detections, const ClassHeightTable& heights,
                       const CameraSpec& camera) {
  for (RangedDetection& d : detections) {
    d.distance_m = estimate_distance(d.h_px, d.class_id, heights, camera);
  }
}

double box_iou(const RangedDetection& a, const RangedDetection& b) noexcept {
  const double ix = std::max(0.0, std::min(a.x_min + a.w_px, b.x_min + b.w_px) -
                                      std::max(a.x_min, b.x_min));
  const double iy = std::max(0.0, std::min(a.y_min + a.h_px, b.y_min + b.h_px) -
                                      std::max(a.y_min, b.y_min));
  const double inter = ix * iy;
  const double uni = a.w_px * a.h_px + b.w_px * b.h_px - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

double ap_101_point(const std::vector<bool>& ranked_tp, std::size_t positives) {
  if (positives == 0) throw Error(ErrorCode::empty_input, "AP needs at least one positive");
  std::vector<double> recall, precision;
  pr_curve(ranked_tp, positives, recall, precision);
  double sum = 0.0;
  for (int k = 0; k <= 100; ++k) {
    const double threshold = static_cast<double>(k) / 100.0;
    const auto it = std::lower_bound(recall.begin(), recall.end(), threshold);
    if (it != recall.end()) sum += precision[static_cast<std::size_t>(it - recall.begin())];
  }
  return sum / 101.0;
}

double ap_all_points(const std::vector<bool>& ranked_tp, std::size_t positives) {
  if (positives == 0) throw Error(ErrorCode::empty_input, "AP needs at least one positive");
  std::vector<double> recall, precision;
  pr_curve(ranked_tp, positives, recall, precision);
  double ap = 0.0;
  double previous_recall = 0.0;
  for (std::size_t i = 0; i < recall.size(); ++i) {
    ap += (recall[i] - previous_recall) * precision[i];
    previous_recall = recall[i];
  }
  return ap;
}

std::array<double, 10> coco_iou_thresholds() noexcept {
  std::array<double, 10> t{};
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.5 + 0.05 * static_cast<double>(i);
  return t;
}

namespace {

// Indices into the input spans, grouped by (class, image), predictions sorted
// by descending score with input order kept on ties.
struct Group {
  std::vector<std::size_t> gts;
  std::vector<std::size_t> preds;
};

using GroupMap = std::map<std::pair<int, long long>, Group>;

MatchResult match_greedy(std::span<const RangedDetection> gts,
                         std::span<const RangedDetection> preds, const GroupMap& groups,
                         double threshold) {
  MatchResult result;
  result.matched_gt.assign(preds.size(), -1);
  for (const auto& [key, group] : groups) {
    std::vector<bool> taken(group.gts.size(), false);
    for (const std::size_t p : group.preds) {
      int best = -1;
      double best_iou = threshold;
      for (std::size_t g = 0; g < group.gts.size(); ++g) {
        if (taken[g]) continue;
        const double v = box_iou(preds[p], gts[group.gts[g]]);
        if (v >= best_iou && (best < 0 || v > best_iou)) {
          best = static_cast<int>(g);
          best_iou = v;
        }
      }
      if (best >= 0) {
        taken[static_cast<std::size_t>(best)] = true;
        result.matched_gt[p] = static_cast<int>(group.gts[static_cast<std::size_t>(best)]);
      }
    }
  }
  return result;
}

struct ClassSlice {
  std::vector<bool> ranked_tp;
  std::size_t positives = 0;
};

}  // namespace

EvalReport evaluate(std::span<const RangedDetection> gts, std::span<const RangedDetection> preds,
                    const ClassHeightTable& classes) {
  const std::size_t n_classes = classes.size();
  GroupMap groups;
  std::vector<int> gt_bin(gts.size());
  for (std::size_t i = 0; i < gts.size(); ++i) {
    classes.at(gts[i].class_id);
    gt_bin[i] = assign_bin(gts[i].distance_m);
    groups[{gts[i].class_id, gts[i].image_id}].gts.push_back(i);
  }
  std::vector<int> pred_bin(preds.size());
  for (std::size_t i = 0; i < preds.size(); ++i) {
    classes.at(preds[i].class_id);
    pred_bin[i] = assign_bin(preds[i].distance_m);
    groups[{preds[i].class_id, preds[i].image_id}].preds.push_back(i);
  }
  const auto by_score = [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; };
  for (auto& [key, group] : groups) {
    std::stable_sort(group.preds.begin(), group.preds.end(), by_score);
  }
  // Class-wide ranking, again stable on input order.
  std::vector<std::vector<std::size_t>> ranked(n_classes);
  for (std::size_t i = 0; i < preds.size(); ++i) {
    ranked[static_cast<std::size_t>(preds[i].class_id)].push_back(i);
  }
  for (auto& list : ranked) std::stable_sort(list.begin(), list.end(), by_score);

  std::vector<std::size_t> positives(n_classes, 0);
  std::vector<std::array<std::size_t, kDistanceBins>> bin_positives(n_classes);
  for (std::size_t i = 0; i < gts.size(); ++i) {
    const auto c = static_cast<std::size_t>(gts[i].class_id);
    ++positives[c];
    ++bin_positives[c][static_cast<std::size_t>(gt_bin[i])];
  }

  // Slice -1 is the whole set, 0..3 the distance bins.
  const auto slice_for = [&](const MatchResult& m, std::size_t c, int bin) {
    ClassSlice slice;
    slice.positives = bin < 0 ? positives[c] : bin_positives[c][static_cast<std::size_t>(bin)];
    for (const std::size_t p : ranked[c]) {
      Outcome outcome;
      const int g = m.matched_gt[p];
      if (bin < 0) {
        outcome = g >= 0 ? Outcome::true_positive : Outcome::false_positive;
      } else if (g >= 0) {
        outcome = gt_bin[static_cast<std::size_t>(g)] == bin ? Outcome::true_positive
                                                             : Outcome::ignored;
      } else {
        outcome = pred_bin[p] == bin ? Outcome::false_positive : Outcome::ignored;
      }
      if (outcome != Outcome::ignored) slice.ranked_tp.push_back(outcome == Outcome::true_positive);
    }
    return slice;
  };

  const auto thresholds = coco_iou_thresholds();
  std::vector<std::vector<double>> class_ap(n_classes);
  std::vector<std::array<std::vector<double>, kDistanceBins>> class_bin_ap(n_classes);
  for (const double threshold : thresholds) {
    const MatchResult m = match_greedy(gts, preds, groups, threshold);
    for (std::size_t c = 0; c < n_classes; ++c) {
      if (const ClassSlice all = slice_for(m, c, -1); all.positives > 0) {
        class_ap[c].push_back(ap_101_point(all.ranked_tp, all.positives));
      }
      for (int b = 0; b < static_cast<int>(kDistanceBins); ++b) {
        if (const ClassSlice s = slice_for(m, c, b); s.positives > 0) {
          class_bin_ap[c][static_cast<std::size_t>(b)].push_back(
              ap_101_point(s.ranked_tp, s.positives));
        }
      }
    }
  }

  const auto pascal_map = [&](double threshold) {
    const MatchResult m = match_greedy(gts, preds, groups, threshold);
    std::vector<double> aps;
    for (std::size_t c = 0; c < n_classes; ++c) {
      if (const ClassSlice all = slice_for(m, c, -1); all.positives > 0) {
        aps.push_back(ap_all_points(all.ranked_tp, all.positives));
      }
    }
    return mean_of(aps);
  };

  EvalReport report;
  std::vector<double> per_class_means;
  std::array<std::vector<double>, kDistanceBins> per_bin_means;
  for (std::size_t c = 0; c < n_classes; ++c) {
    const std::optional<double> ap = mean_of(class_ap[c]);
    report.per_class.push_back({classes.classes()[c].name, ap});
    if (ap) per_class_means.push_back(*ap);
    for (std::size_t b = 0; b < kDistanceBins; ++b) {
      if (const auto bin_ap = mean_of(class_bin_ap[c][b])) per_bin_means[b].push_back(*bin_ap);
    }
  }
  report.map = mean_of(per_class_means);
  for (std::size_t b = 0; b < kDistanceBins; ++b) report.map_by_bin[b] = mean_of(per_bin_means[b]);
  report.map50 = pascal_map(0.5);
  report.map75 = pascal_map(0.75);
  return report;
}

}  // namespace hyperfovea
