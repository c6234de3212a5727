#include "hyperfovea/box.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hyperfovea/error.hpp"

namespace hyperfovea {

namespace {

// Smallest positive extent a noised box may shrink to, relative to its size.
constexpr double kMinNoisedScale = 1e-6;

double column_norm_x(const Jacobian2& j) noexcept { return std::hypot(j.xx, j.yx); }
double column_norm_y(const Jacobian2& j) noexcept { return std::hypot(j.xy, j.yy); }

double overlap(double lo_a, double hi_a, double lo_b, double hi_b) noexcept {
  return std::max(0.0, std::min(hi_a, hi_b) - std::max(lo_a, lo_b));
}

}  // namespace

void validate(const EuclideanBox& box) {
  if (!(box.w > 0.0 && box.h > 0.0 && std::isfinite(box.w) && std::isfinite(box.h) &&
        is_finite(box.center))) {
    std::ostringstream msg;
    msg << "box needs finite center and w, h > 0 (got w=" << box.w << ", h=" << box.h << ")";
    throw Error(ErrorCode::degenerate_box, msg.str());
  }
}

RiemannianBox to_riemannian(const EuclideanBox& box, const FoveationParams& params) {
  validate(box);
  const Jacobian2 j = jacobian(box.center, params);
  return {forward_map(box.center, params), norm(j.apply({box.w, 0.0})),
          norm(j.apply({0.0, box.h}))};
}

EuclideanBox to_euclidean(const RiemannianBox& box, const FoveationParams& params, double tol) {
  if (!(box.tx_mag > 0.0 && box.ty_mag > 0.0) || !is_finite(box.center)) {
    throw Error(ErrorCode::degenerate_box, "riemannian box needs positive tangent magnitudes");
  }
  validate(params);
  if (params.is_identity()) return {box.center, box.tx_mag, box.ty_mag};

  const InverseReport inv = inverse_newton(box.center, params, tol, kDefaultNewtonMaxIter);
  if (!inv.converged) {
    std::ostringstream msg;
    msg << "center inverse stopped at residual " << inv.residual << " after " << inv.iterations
        << " iterations";
    throw Error(ErrorCode::not_converged, msg.str());
  }
  const Jacobian2 j = jacobian(inv.solution, params);
  return {inv.solution, box.tx_mag / column_norm_x(j), box.ty_mag / column_norm_y(j)};
}

double area_amplification(const EuclideanBox& box, const FoveationParams& params) {
  const RiemannianBox r = to_riemannian(box, params);
  return (r.tx_mag * r.ty_mag) / (box.w * box.h);
}

double iou(const EuclideanBox& a, const EuclideanBox& b) {
  validate(a);
  validate(b);
  const double inter = overlap(a.x_min(), a.x_max(), b.x_min(), b.x_max()) *
                       overlap(a.y_min(), a.y_max(), b.y_min(), b.y_max());
  return inter / (a.area() + b.area() - inter);
}

double giou(const EuclideanBox& a, const EuclideanBox& b) {
  validate(a);
  validate(b);
  const double inter = overlap(a.x_min(), a.x_max(), b.x_min(), b.x_max()) *
                       overlap(a.y_min(), a.y_max(), b.y_min(), b.y_max());
  const double uni = a.area() + b.area() - inter;
  const double hull = (std::max(a.x_max(), b.x_max()) - std::min(a.x_min(), b.x_min())) *
                      (std::max(a.y_max(), b.y_max()) - std::min(a.y_min(), b.y_min()));
  return inter / uni - (hull - uni) / hull;
}

double l1_loss(const EuclideanBox& a, const EuclideanBox& b) noexcept {
  return std::abs(a.center.x - b.center.x) + std::abs(a.center.y - b.center.y) +
         std::abs(a.w - b.w) + std::abs(a.h - b.h);
}

BoxNoiser::BoxNoiser(double center_scale, double size_scale, std::uint64_t seed)
    : center_scale_(center_scale), size_scale_(size_scale), rng_(seed) {
  if (!(center_scale >= 0.0) || !(size_scale >= 0.0)) {
    throw Error(ErrorCode::invalid_params, "noise scales must be non-negative");
  }
}

EuclideanBox BoxNoiser::operator()(const EuclideanBox& box) {
  validate(box);
  if (center_scale_ == 0.0 && size_scale_ == 0.0) return box;
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double jx = unit(rng_);
  const double jy = unit(rng_);
  const double sw = unit(rng_);
  const double sh = unit(rng_);
  EuclideanBox out = box;
  out.center.x += jx * center_scale_ * 0.5 * box.w;
  out.center.y += jy * center_scale_ * 0.5 * box.h;
  out.w = box.w * std::max(1.0 + sw * size_scale_, kMinNoisedScale);
  out.h = box.h * std::max(1.0 + sh * size_scale_, kMinNoisedScale);
  return out;
}

EuclideanBox noise_box(const EuclideanBox& box, double center_scale, double size_scale,
                       std::uint64_t seed) {
  BoxNoiser noiser(center_scale, size_scale, seed);
  return noiser(box);
}

}  // namespace hyperfovea
