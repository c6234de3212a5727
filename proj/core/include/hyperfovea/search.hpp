#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "hyperfovea/box.hpp"
#include "hyperfovea/geometry.hpp"

namespace hyperfovea {

enum class ObjectiveKind {
  mean_amplification,  // mean of (tx*ty)/(w*h)
  mean_area,           // mean of tx*ty
  total_area,          // sum of tx*ty
};

std::string_view to_string(ObjectiveKind kind) noexcept;
ObjectiveKind objective_kind_from_string(std::string_view name);

struct SearchSpec {
  std::vector<double> alpha_grid;
  std::vector<double> p_grid;
  std::vector<NormPoint> origin_grid{NormPoint{}};
  std::vector<double> radius_grid{1.0};
  ObjectiveKind objective = ObjectiveKind::mean_amplification;

  // alpha, p in {0.5, 0.75, ..., 4.0}; origin (0,0); R = 1.
  static SearchSpec defaults();
};

// Throws Error(invalid_params) if a grid is empty, not ascending, or holds a
// value outside the FoveationParams domain.
void validate(const SearchSpec& spec);

struct SearchRow {
  FoveationParams params;
  double objective = 0.0;
};

struct SearchResult {
  FoveationParams best;
  double objective = 0.0;
  std::vector<SearchRow> table;  // enumeration order: alpha, p, origin, R (R fastest)
};

// Mean per-box area amplification under to_riemannian. Throws
// Error(empty_input) for an empty box list.
double objective(std::span<const EuclideanBox> boxes, const FoveationParams& params);
double objective(std::span<const EuclideanBox> boxes, const FoveationParams& params,
                 ObjectiveKind kind);

// True if `a` should be preferred over `b` at equal objective: smaller alpha,
// then smaller p, then lexicographically smaller origin, then smaller R.
bool tie_break_less(const FoveationParams& a, const FoveationParams& b) noexcept;

// Index of the best row: largest objective, ties resolved by tie_break_less.
// Independent of row order.
std::size_t best_row(std::span<const SearchRow> rows);

SearchResult grid_search(std::span<const EuclideanBox> boxes, const SearchSpec& spec,
                         unsigned threads = 1);

// Evaluates an arbitrary objective at every vertex of `spec` (the objective
// kind in `spec` is ignored).
SearchResult grid_search(const SearchSpec& spec,
                         const std::function<double(const FoveationParams&)>& objective,
                         unsigned threads = 1);

struct RangedBox {
  EuclideanBox box;
  double distance_m = 0.0;
};

// Weighted mean amplification where each box weighs range_weights[bin] of its
// distance bin. Throws Error(empty_effective_set) when every box has zero weight.
double weighted_objective(std::span<const RangedBox> boxes, const FoveationParams& params,
                          const std::array<double, 4>& range_weights);

// Header: alpha,p,ox,oy,R,objective
void write_search_csv(std::ostream& out, const SearchResult& result);

}  // namespace hyperfovea
