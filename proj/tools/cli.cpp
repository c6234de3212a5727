#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>

#include "hyperfovea/box.hpp"
#include "hyperfovea/coco.hpp"
#include "hyperfovea/error.hpp"
#include "hyperfovea/image.hpp"
#include "hyperfovea/params_io.hpp"
#include "hyperfovea/range_eval.hpp"
#include "hyperfovea/search.hpp"
#include "hyperfovea/warp.hpp"

namespace hyperfovea::cli {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

// Raised for bad flag combinations or unusable inputs; maps to kExitUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double elapsed_ms(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

double parse_double(const std::string& text, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw UsageError("cannot parse " + what + " from \"" + text + "\"");
  }
}

NormPoint parse_point(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 2) throw UsageError("expected a point as x,y but got \"" + text + "\"");
  return {parse_double(parts[0], "x"), parse_double(parts[1], "y")};
}

// "a,b,c" or "start:stop:step" (inclusive of stop up to rounding).
std::vector<double> parse_grid(const std::string& text, const std::string& what) {
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError(what + ": expected start:stop:step");
    const double start = parse_double(parts[0], what);
    const double stop = parse_double(parts[1], what);
    const double step = parse_double(parts[2], what);
    if (!(step > 0.0) || stop < start) throw UsageError(what + ": empty or invalid range");
    const auto count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (long i = 0; i < count; ++i) values.push_back(start + step * static_cast<double>(i));
  } else {
    for (const auto& part : split(text, ',')) values.push_back(parse_double(part, what));
  }
  return values;
}

struct ParamsFlags {
  std::string source;  // JSON file or key=value list
  std::string origin;
  std::optional<double> radius;
  std::optional<double> alpha;
  std::optional<double> p;

  void add_to(CLI::App& app) {
    app.add_option("--params", source,
                   "Foveation params: JSON file {ox,oy,R,alpha,p} or key=value list, e.g. R=0");
    app.add_option("--origin", origin, "Foveation origin as x,y (normalized)");
    app.add_option("--R", radius, "Radial scale R (0 disables the transform)");
    app.add_option("--alpha", alpha, "Contraction strength alpha");
    app.add_option("--p", p, "Blending exponent p");
  }

  bool inline_given() const { return !origin.empty() || radius || alpha || p; }
  bool given() const { return !source.empty() || inline_given(); }

  FoveationParams resolve(const FoveationParams& fallback = {}) const {
    if (!source.empty() && inline_given()) {
      throw UsageError("--params cannot be combined with --origin/--R/--alpha/--p");
    }
    FoveationParams params = fallback;
    if (!source.empty()) {
      if (fs::exists(source)) return load_params(source);
      if (source.find('=') == std::string::npos) {
        throw UsageError("params file not found: " + source);
      }
      for (const auto& item : split(source, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw UsageError("bad params entry \"" + item + "\"");
        const std::string key = item.substr(0, eq);
        const double value = parse_double(item.substr(eq + 1), key);
        if (key == "ox") params.origin.x = value;
        else if (key == "oy") params.origin.y = value;
        else if (key == "R") params.radius = value;
        else if (key == "alpha") params.alpha = value;
        else if (key == "p") params.blend_exp = value;
        else throw UsageError("unknown params key \"" + key + "\"");
      }
    } else {
      if (!origin.empty()) params.origin = parse_point(origin);
      if (radius) params.radius = *radius;
      if (alpha) params.alpha = *alpha;
      if (p) params.blend_exp = *p;
    }
    validate(params);
    return params;
  }
};

struct CameraFlags {
  std::string preset = "truckdrive";
  std::optional<double> focal;
  std::string heights;

  void add_to(CLI::App& app) {
    app.add_option("--camera", preset, "Camera preset: truckdrive (f=3304) or argoverse2 (f=1682)")
        ->check(CLI::IsMember({"truckdrive", "argoverse2"}));
    app.add_option("--focal", focal, "Focal length in pixels (overrides --camera)");
    app.add_option("--heights", heights, "JSON {class: average height in meters}");
  }

  CameraSpec camera() const {
    if (focal) {
      if (!(*focal > 0.0)) throw UsageError("--focal must be positive");
      return {*focal};
    }
    return preset == "argoverse2" ? CameraSpec::argoverse2() : CameraSpec::truckdrive();
  }

  ClassHeightTable table() const {
    return heights.empty() ? ClassHeightTable::defaults() : load_class_heights(heights);
  }
};

void require_file(const std::string& path, const std::string& what) {
  if (path.empty()) throw UsageError(what + " path is required");
  if (!fs::exists(path)) throw UsageError(what + " not found: " + path);
}

std::pair<std::size_t, std::size_t> parse_dims(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw UsageError("expected dimensions as WxH, got \"" + text + "\"");
  const double w = parse_double(text.substr(0, x), "width");
  const double h = parse_double(text.substr(x + 1), "height");
  if (w < 1 || h < 1) throw UsageError("dimensions must be at least 1x1");
  return {static_cast<std::size_t>(w), static_cast<std::size_t>(h)};
}

// ---------------------------------------------------------------------------
// warp

struct WarpOptions {
  std::string input;
  std::string output;
  bool inverse = false;
  std::string resize;
  std::string order = "warp-first";
  double tol = kDefaultTolerance;
};

int cmd_warp(const WarpOptions& opt, const ParamsFlags& pf, unsigned threads, std::ostream& out,
             std::ostream& err) {
  require_file(opt.input, "input image");
  if (opt.output.empty()) throw UsageError("--output is required");
  const FoveationParams params = pf.resolve();
  ImageBuffer image = load_image(opt.input);

  std::optional<std::pair<std::size_t, std::size_t>> dims;
  if (!opt.resize.empty()) dims = parse_dims(opt.resize);
  if (dims && opt.order == "resize-first") image = resize_bilinear(image, dims->first, dims->second);

  auto start = Clock::now();
  WarpGrid grid = opt.inverse ? build_forward_grid(image.width(), image.height(), params, threads)
                              : build_inverse_grid(image.width(), image.height(), params, opt.tol,
                                                   threads);
  const double grid_ms = elapsed_ms(start);
  if (!grid.failures.empty()) {
    err << "error: inverse solve failed at " << grid.failures.size() << " pixel(s), first index "
        << grid.failures.front() << '\n';
    return kExitInternal;
  }
  start = Clock::now();
  ImageBuffer result = warp_image(image, grid, threads);
  const double resample_ms = elapsed_ms(start);

  if (dims && opt.order == "warp-first") result = resize_bilinear(result, dims->first, dims->second);
  save_image(opt.output, result);
  out << std::fixed << std::setprecision(3) << "grid build: " << grid_ms << " ms\n"
      << "resample:   " << resample_ms << " ms\n"
      << "valid pixels: " << grid.valid_count() << "/" << grid.valid.size() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// boxes

struct BoxesOptions {
  std::string input;
  std::string output;
  std::string direction = "to-riemannian";
  std::string csv;
  // Normalized units; tight enough that pixel coordinates of large images
  // survive a round trip to well below 1e-6 px.
  double tol = 1e-12;
};

int cmd_boxes(const BoxesOptions& opt, const ParamsFlags& pf, std::ostream& out) {
  require_file(opt.input, "annotation file");
  if (opt.output.empty()) throw UsageError("--output is required");
  nlohmann::ordered_json doc;
  {
    std::ifstream in(opt.input);
    try {
      doc = nlohmann::ordered_json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::schema_error, opt.input + ": " + e.what());
    }
  }
  if (!doc.is_object()) throw Error(ErrorCode::schema_error, "$: expected an object");

  const bool forward = opt.direction == "to-riemannian";
  FoveationParams params;
  if (!forward && !pf.given() && doc.contains("foveation")) {
    params = params_from_json(doc["foveation"].dump());
  } else {
    params = pf.resolve();
  }

  std::map<long long, std::pair<std::size_t, std::size_t>> sizes;
  const auto images = doc.value("images", nlohmann::ordered_json::array());
  for (std::size_t i = 0; i < images.size(); ++i) {
    try {
      const auto& img = images.at(i);
      sizes[img.at("id").get<long long>()] = {img.at("width").get<std::size_t>(),
                                              img.at("height").get<std::size_t>()};
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::schema_error, "images[" + std::to_string(i) + "]: " + e.what());
    }
  }

  std::ofstream csv;
  if (!opt.csv.empty()) {
    csv.open(opt.csv);
    if (!csv) throw Error(ErrorCode::io_error, "cannot write " + opt.csv);
    csv << "annotation_id,image_id,amplification\n" << std::setprecision(17);
  }

  auto& anns = doc["annotations"];
  if (!anns.is_array()) throw Error(ErrorCode::schema_error, "$.annotations: not an array");
  double amp_sum = 0.0;
  for (std::size_t i = 0; i < anns.size(); ++i) {
    auto& ann = anns[i];
    const std::string where = "annotations[" + std::to_string(i) + "]";
    try {
      const long long image_id = ann.at("image_id").get<long long>();
      const auto it = sizes.find(image_id);
      if (it == sizes.end()) {
        throw Error(ErrorCode::malformed_annotation, where + ".image_id: unknown image");
      }
      const auto [w, h] = it->second;
      double amplification = 0.0;
      if (forward) {
        const auto& b = ann.at("bbox");
        const EuclideanBox box =
            pixel_box_to_norm(b.at(0).get<double>(), b.at(1).get<double>(),
                              b.at(2).get<double>(), b.at(3).get<double>(), w, h);
        const RiemannianBox rb = to_riemannian(box, params);
        amplification = rb.tx_mag * rb.ty_mag / box.area();
        ann["riemannian"] = {rb.center.x, rb.center.y, rb.tx_mag, rb.ty_mag};
        ann["amplification"] = amplification;
      } else {
        if (!ann.contains("riemannian") || ann["riemannian"].size() != 4) {
          throw Error(ErrorCode::schema_error, where + ".riemannian: expected [cx, cy, tx, ty]");
        }
        const auto& r = ann["riemannian"];
        const RiemannianBox rb{{r[0].get<double>(), r[1].get<double>()}, r[2].get<double>(),
                               r[3].get<double>()};
        const EuclideanBox box = to_euclidean(rb, params, opt.tol);
        amplification = rb.tx_mag * rb.ty_mag / box.area();
        const auto px = norm_box_to_pixel(box, w, h);
        ann["bbox"] = {px[0], px[1], px[2], px[3]};
        ann.erase("riemannian");
        ann.erase("amplification");
      }
      amp_sum += amplification;
      if (csv.is_open()) {
        csv << ann.value("id", static_cast<long long>(i)) << ',' << image_id << ',' << amplification
            << '\n';
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::schema_error, where + ": " + e.what());
    }
  }
  if (forward) {
    doc["foveation"] = nlohmann::ordered_json::parse(params_to_json(params));
  } else {
    doc.erase("foveation");
  }
  std::ofstream file(opt.output);
  if (!file) throw Error(ErrorCode::io_error, "cannot write " + opt.output);
  file << std::setprecision(17) << doc.dump(2) << '\n';

  out << "boxes: " << anns.size();
  if (!anns.empty()) {
    out << ", mean area amplification " << std::setprecision(6)
        << amp_sum / static_cast<double>(anns.size());
  }
  out << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// search

struct SearchOptions {
  std::string input;
  std::string csv;
  std::string best;
  std::string alpha_grid = "0.5:4:0.25";
  std::string p_grid = "0.5:4:0.25";
  std::string radius_grid = "1";
  std::string origins = "0,0";
  std::string objective = "mean-amplification";
  std::string range_weights;
};

int cmd_search(const SearchOptions& opt, const CameraFlags& cam, unsigned threads,
               std::ostream& out) {
  require_file(opt.input, "annotation file");
  SearchSpec spec;
  spec.alpha_grid = parse_grid(opt.alpha_grid, "--alpha-grid");
  spec.p_grid = parse_grid(opt.p_grid, "--p-grid");
  spec.radius_grid = parse_grid(opt.radius_grid, "--R-grid");
  spec.origin_grid.clear();
  for (const auto& o : split(opt.origins, ';')) spec.origin_grid.push_back(parse_point(o));
  spec.objective = objective_kind_from_string(opt.objective);

  SearchResult result;
  if (opt.range_weights.empty()) {
    const std::vector<EuclideanBox> boxes = load_normalized_boxes(opt.input);
    result = grid_search(boxes, spec, threads);
  } else {
    const auto w = parse_grid(opt.range_weights, "--range-weights");
    if (w.size() != kDistanceBins) throw UsageError("--range-weights needs 4 values");
    const std::array<double, 4> weights{w[0], w[1], w[2], w[3]};
    const ClassHeightTable table = cam.table();
    const CocoDataset dataset = load_coco_annotations(opt.input, table, cam.camera());
    const std::vector<EuclideanBox> boxes = load_normalized_boxes(opt.input);
    std::vector<RangedBox> ranged;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
      ranged.push_back({boxes[i], dataset.gts[i].distance_m});
    }
    if (ranged.empty()) throw Error(ErrorCode::empty_input, "annotation file has no boxes");
    result = grid_search(
        spec, [&](const FoveationParams& p) { return weighted_objective(ranged, p, weights); },
        threads);
  }

  if (!opt.csv.empty()) {
    std::ofstream csv(opt.csv);
    if (!csv) throw Error(ErrorCode::io_error, "cannot write " + opt.csv);
    write_search_csv(csv, result);
  }
  if (!opt.best.empty()) save_params(opt.best, result.best);
  out << std::setprecision(17) << "best: " << params_to_json(result.best) << '\n'
      << "objective: " << result.objective << '\n'
      << "vertices: " << result.table.size() << '\n';
  return kExitOk;
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string gt;
  std::string pred;
  std::string method = "method";
  std::string json;
  std::string csv;
};

int cmd_eval(const EvalOptions& opt, const CameraFlags& cam, std::ostream& out) {
  require_file(opt.gt, "ground-truth file");
  std::optional<fs::path> pred;
  if (!opt.pred.empty()) {
    require_file(opt.pred, "prediction file");
    pred = opt.pred;
  }
  const ClassHeightTable table = cam.table();
  const Detections det = ingest_coco(opt.gt, pred, table, cam.camera());
  const EvalReport report = evaluate(det.gts, det.preds, table);

  if (!opt.json.empty()) {
    std::ofstream file(opt.json);
    if (!file) throw Error(ErrorCode::io_error, "cannot write " + opt.json);
    file << report_to_json(report, opt.method) << '\n';
  }
  if (!opt.csv.empty()) {
    std::ofstream file(opt.csv);
    if (!file) throw Error(ErrorCode::io_error, "cannot write " + opt.csv);
    write_report_csv(file, report, opt.method);
  }
  write_report_csv(out, report, opt.method);
  return kExitOk;
}

// ---------------------------------------------------------------------------
// bench

Timing summarize(const std::vector<double>& samples) {
  Timing t;
  if (samples.empty()) return t;
  const double n = static_cast<double>(samples.size());
  t.mean_ms = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double var = 0.0;
  for (const double s : samples) var += (s - t.mean_ms) * (s - t.mean_ms);
  t.stddev_ms = samples.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
  return t;
}

int cmd_bench(const BenchConfig& config, std::ostream& out) {
  const BenchReport r = run_bench(config);
  const std::size_t total = config.boxes * config.batch;
  out << std::fixed << std::setprecision(4) << "boxes per run: " << total << ", runs: "
      << config.runs << ", tol: " << std::scientific << std::setprecision(1) << config.tol
      << std::fixed << '\n'
      << std::setprecision(4) << "forward: " << r.forward.mean_ms << " +/- " << r.forward.stddev_ms
      << " ms, mean iterations " << std::setprecision(2) << r.forward_mean_iterations << '\n'
      << std::setprecision(4) << "inverse: " << r.inverse.mean_ms << " +/- " << r.inverse.stddev_ms
      << " ms, mean Newton iterations " << std::setprecision(2) << r.newton_mean_iterations << '\n'
      << "damped residual iteration (eta " << std::setprecision(3) << r.fixed_point_eta
      << "): mean iterations " << std::setprecision(2) << r.fixed_point_mean_iterations << '\n'
      << "max round-trip error: " << std::scientific << std::setprecision(3)
      << r.max_roundtrip_error << '\n';
  return kExitOk;
}

int dispatch_error(const std::exception& e, int code, std::ostream& err) {
  err << "error: " << e.what() << '\n';
  return code;
}

}  // namespace

BenchReport run_bench(const BenchConfig& config) {
  validate(config.params);
  const std::size_t total = config.boxes * config.batch;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> center(-0.9, 0.9);
  std::uniform_real_distribution<double> size(0.01, 0.2);
  std::vector<EuclideanBox> boxes(total);
  for (auto& b : boxes) b = {{center(rng), center(rng)}, size(rng), size(rng)};

  std::vector<RiemannianBox> warped(total);
  std::vector<EuclideanBox> recovered(total);
  std::vector<double> forward_ms, inverse_ms;
  for (std::size_t run = 0; run < config.runs; ++run) {
    auto start = Clock::now();
    for (std::size_t i = 0; i < total; ++i) warped[i] = to_riemannian(boxes[i], config.params);
    forward_ms.push_back(elapsed_ms(start));
    start = Clock::now();
    for (std::size_t i = 0; i < total; ++i) {
      recovered[i] = to_euclidean(warped[i], config.params, config.tol);
    }
    inverse_ms.push_back(elapsed_ms(start));
  }

  BenchReport report;
  report.forward = summarize(forward_ms);
  report.inverse = summarize(inverse_ms);
  report.fixed_point_eta = default_fixed_point_step(config.params);
  double newton_iters = 0.0;
  double fixed_iters = 0.0;
  for (std::size_t i = 0; i < total; ++i) {
    newton_iters += inverse_newton(warped[i].center, config.params, config.tol).iterations;
    fixed_iters += inverse_fixed_point(warped[i].center, config.params, report.fixed_point_eta,
                                       config.tol, 1000)
                       .iterations;
    const EuclideanBox& a = boxes[i];
    const EuclideanBox& b = recovered[i];
    report.max_roundtrip_error =
        std::max({report.max_roundtrip_error, std::abs(a.center.x - b.center.x),
                  std::abs(a.center.y - b.center.y), std::abs(a.w - b.w), std::abs(a.h - b.h)});
  }
  if (total > 0) {
    report.newton_mean_iterations = newton_iters / static_cast<double>(total);
    report.fixed_point_mean_iterations = fixed_iters / static_cast<double>(total);
  }
  return report;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hyperbolic foveated transform toolkit", "hyperfovea"};
  app.require_subcommand(1);
  app.fallthrough();  // global options may also follow the subcommand
  unsigned threads = 1;
  std::uint64_t seed = 0;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_option("--seed", seed, "Random seed");

  WarpOptions warp_opt;
  ParamsFlags warp_params;
  auto* warp = app.add_subcommand("warp", "Render a foveated (or, with --inverse, unwarped) image");
  warp->add_option("--input,-i", warp_opt.input, "Input image (.png, .pgm, .ppm)");
  warp->add_option("--output,-o", warp_opt.output, "Output image");
  warp->add_flag("--inverse", warp_opt.inverse, "Undo a foveation instead of applying it");
  warp->add_option("--resize", warp_opt.resize, "Also resample to WxH");
  warp->add_option("--order", warp_opt.order, "Where --resize happens relative to the warp")
      ->check(CLI::IsMember({"warp-first", "resize-first"}));
  warp->add_option("--tol", warp_opt.tol, "Inverse solver tolerance");
  warp_params.add_to(*warp);

  BoxesOptions boxes_opt;
  ParamsFlags boxes_params;
  auto* boxes = app.add_subcommand("boxes", "Convert COCO boxes to or from the foveated form");
  boxes->add_option("--input,-i", boxes_opt.input, "COCO annotation JSON");
  boxes->add_option("--output,-o", boxes_opt.output, "Output JSON");
  boxes->add_option("--direction", boxes_opt.direction)
      ->check(CLI::IsMember({"to-riemannian", "to-euclidean"}));
  boxes->add_option("--csv", boxes_opt.csv, "Per-box amplification CSV");
  boxes->add_option("--tol", boxes_opt.tol, "Inverse solver tolerance (normalized units)");
  boxes_params.add_to(*boxes);

  SearchOptions search_opt;
  CameraFlags search_cam;
  auto* search = app.add_subcommand("search", "Grid search over (alpha, p, origin, R)");
  search->add_option("--input,-i", search_opt.input, "COCO annotation JSON");
  search->add_option("--csv", search_opt.csv, "Write the full table as CSV");
  search->add_option("--best", search_opt.best, "Write the best params as JSON");
  search->add_option("--alpha-grid", search_opt.alpha_grid, "a,b,c or start:stop:step");
  search->add_option("--p-grid", search_opt.p_grid, "a,b,c or start:stop:step");
  search->add_option("--R-grid", search_opt.radius_grid, "a,b,c or start:stop:step");
  search->add_option("--origins", search_opt.origins, "x,y;x,y;...");
  search->add_option("--objective", search_opt.objective)
      ->check(CLI::IsMember({"mean-amplification", "mean-area", "total-area"}));
  search->add_option("--range-weights", search_opt.range_weights,
                     "Weights for the 4 distance bins (uses --camera/--heights)");
  search_cam.add_to(*search);

  EvalOptions eval_opt;
  CameraFlags eval_cam;
  auto* eval = app.add_subcommand("eval", "Distance-binned COCO/PASCAL evaluation");
  eval->add_option("--gt", eval_opt.gt, "COCO annotation JSON");
  eval->add_option("--pred", eval_opt.pred, "COCO result JSON");
  eval->add_option("--method", eval_opt.method, "Row label");
  eval->add_option("--json", eval_opt.json, "Write the report as JSON");
  eval->add_option("--csv", eval_opt.csv, "Write the report as CSV");
  eval_cam.add_to(*eval);

  BenchConfig bench_cfg;
  ParamsFlags bench_params;
  auto* bench = app.add_subcommand("bench", "Time the box transform and its inverse");
  bench->add_option("--boxes", bench_cfg.boxes, "Boxes per batch item");
  bench->add_option("--batch", bench_cfg.batch, "Batch size");
  bench->add_option("--runs", bench_cfg.runs, "Repetitions");
  bench->add_option("--tol", bench_cfg.tol, "Inverse solver tolerance");
  bench_params.add_to(*bench);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) reversed.pop_back();
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*warp) return cmd_warp(warp_opt, warp_params, threads, out, err);
    if (*boxes) return cmd_boxes(boxes_opt, boxes_params, out);
    if (*search) return cmd_search(search_opt, search_cam, threads, out);
    if (*eval) return cmd_eval(eval_opt, eval_cam, out);
    if (*bench) {
      bench_cfg.params = bench_params.resolve();
      bench_cfg.seed = seed;
      return cmd_bench(bench_cfg, out);
    }
  } catch (const UsageError& e) {
    return dispatch_error(e, kExitUsage, err);
  } catch (const Error& e) {
    const bool internal =
        e.code() == ErrorCode::not_converged || e.code() == ErrorCode::singular_jacobian;
    return dispatch_error(e, internal ? kExitInternal : kExitUsage, err);
  } catch (const nlohmann::json::exception& e) {
    return dispatch_error(e, kExitUsage, err);
  } catch (const std::exception& e) {
    return dispatch_error(e, kExitInternal, err);
  }
  return kExitUsage;
}

}  // namespace hyperfovea::cli
