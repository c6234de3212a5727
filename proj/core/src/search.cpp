#include "hyperfovea/search.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <tuple>

#include "hyperfovea/error.hpp"
#include "hyperfovea/parallel.hpp"
#include "hyperfovea/range_eval.hpp"

namespace hyperfovea {

std::string_view to_string(ObjectiveKind kind) noexcept {
  switch (kind) {
    case ObjectiveKind::mean_amplification: return "mean-amplification";
    case ObjectiveKind::mean_area: return "mean-area";
    case ObjectiveKind::total_area: return "total-area";
  }
  return "mean-amplification";
}

ObjectiveKind objective_kind_from_string(std::string_view name) {
  for (const auto kind :
       {ObjectiveKind::mean_amplification, ObjectiveKind::mean_area, ObjectiveKind::total_area}) {
    if (to_string(kind) == name) return kind;
  }
  throw Error(ErrorCode::invalid_params, "unknown objective: " + std::string(name));
}

SearchSpec SearchSpec::defaults() {
  SearchSpec spec;
  for (int i = 0; i <= 14; ++i) {
    spec.alpha_grid.push_back(0.5 + 0.25 * i);
    spec.p_grid.push_back(0.5 + 0.25 * i);
  }
  return spec;
}

namespace {

void require_ascending(const std::vector<double>& grid, const char* name, bool allow_zero) {
  if (grid.empty()) throw Error(ErrorCode::invalid_params, std::string(name) + " grid is empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double v = grid[i];
    if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0)) {
      std::ostringstream msg;
      msg << name << " grid value " << v << " is out of range";
      throw Error(ErrorCode::invalid_params, msg.str());
    }
    if (i > 0 && !(grid[i - 1] < v)) {
      throw Error(ErrorCode::invalid_params, std::string(name) + " grid must be ascending");
    }
  }
}

}  // namespace

void validate(const SearchSpec& spec) {
  require_ascending(spec.alpha_grid, "alpha", false);
  require_ascending(spec.p_grid, "p", false);
  require_ascending(spec.radius_grid, "R", true);
  if (spec.origin_grid.empty()) throw Error(ErrorCode::invalid_params, "origin grid is empty");
  for (const NormPoint& o : spec.origin_grid) {
    validate(FoveationParams{o, 1.0, 1.0, 1.0});
  }
}

double objective(std::span<const EuclideanBox> boxes, const FoveationParams& params) {
  return objective(boxes, params, ObjectiveKind::mean_amplification);
}

double objective(std::span<const EuclideanBox> boxes, const FoveationParams& params,
                 ObjectiveKind kind) {
  if (boxes.empty()) throw Error(ErrorCode::empty_input, "objective needs at least one box");
  double sum = 0.0;
  for (const EuclideanBox& b : boxes) {
    const RiemannianBox r = to_riemannian(b, params);
    const double area = r.tx_mag * r.ty_mag;
    sum += kind == ObjectiveKind::mean_amplification ? area / b.area() : area;
  }
  return kind == ObjectiveKind::total_area ? sum : sum / static_cast<double>(boxes.size());
}

bool tie_break_less(const FoveationParams& a, const FoveationParams& b) noexcept {
  return std::tie(a.alpha, a.blend_exp, a.origin.x, a.origin.y, a.radius) <
         std::tie(b.alpha, b.blend_exp, b.origin.x, b.origin.y, b.radius);
}

std::size_t best_row(std::span<const SearchRow> rows) {
  if (rows.empty()) throw Error(ErrorCode::empty_input, "no rows to choose from");
  std::size_t best = 0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const SearchRow& cand = rows[i];
    const SearchRow& cur = rows[best];
    if (cand.objective > cur.objective ||
        (cand.objective == cur.objective && tie_break_less(cand.params, cur.params))) {
      best = i;
    }
  }
  return best;
}

SearchResult grid_search(const SearchSpec& spec,
                         const std::function<double(const FoveationParams&)>& objective,
                         unsigned threads) {
  validate(spec);
  SearchResult result;
  for (const double alpha : spec.alpha_grid) {
    for (const double p : spec.p_grid) {
      for (const NormPoint& o : spec.origin_grid) {
        for (const double radius : spec.radius_grid) {
          result.table.push_back({FoveationParams{o, radius, alpha, p}, 0.0});
        }
      }
    }
  }
  parallel_for(result.table.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      result.table[i].objective = objective(result.table[i].params);
    }
  });
  const SearchRow& best = result.table[best_row(result.table)];
  result.best = best.params;
  result.objective = best.objective;
  return result;
}

SearchResult grid_search(std::span<const EuclideanBox> boxes, const SearchSpec& spec,
                         unsigned threads) {
  validate(spec);
  if (boxes.empty()) throw Error(ErrorCode::empty_input, "grid search needs at least one box");
  for (const EuclideanBox& b : boxes) validate(b);
  return grid_search(
      spec, [&](const FoveationParams& params) { return objective(boxes, params, spec.objective); },
      threads);
}

double weighted_objective(std::span<const RangedBox> boxes, const FoveationParams& params,
                          const std::array<double, 4>& range_weights) {
  if (boxes.empty()) throw Error(ErrorCode::empty_input, "weighted objective needs boxes");
  double total_weight = 0.0;
  for (const double w : range_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::invalid_params, "range weights must be finite and non-negative");
    }
    total_weight += w;
  }
  if (total_weight == 0.0) throw Error(ErrorCode::invalid_params, "range weights are all zero");

  double sum = 0.0;
  double weight_sum = 0.0;
  for (const RangedBox& rb : boxes) {
    const double w = range_weights[static_cast<std::size_t>(assign_bin(rb.distance_m))];
    if (w == 0.0) continue;
    sum += w * area_amplification(rb.box, params);
    weight_sum += w;
  }
  if (weight_sum == 0.0) {
    throw Error(ErrorCode::empty_effective_set, "no box falls in a positively weighted bin");
  }
  return sum / weight_sum;
}

void write_search_csv(std::ostream& out, const SearchResult& result) {
  out << "alpha,p,ox,oy,R,objective\n";
  out << std::setprecision(17);
  for (const SearchRow& row : result.table) {
    out << row.params.alpha << ',' << row.params.blend_exp << ',' << row.params.origin.x << ','
        << row.params.origin.y << ',' << row.params.radius << ',' << row.objective << '\n';
  }
}

}  // namespace hyperfovea
