#pragma once

#include <cstdint>
#include <random>

#include "hyperfovea/geometry.hpp"

namespace hyperfovea {

// Axis-aligned box in normalized coordinates; w and h are full extents.
struct EuclideanBox {
  NormPoint center{};
  double w = 0.0;
  double h = 0.0;

  double area() const noexcept { return w * h; }
  double x_min() const noexcept { return center.x - 0.5 * w; }
  double x_max() const noexcept { return center.x + 0.5 * w; }
  double y_min() const noexcept { return center.y - 0.5 * h; }
  double y_max() const noexcept { return center.y + 0.5 * h; }

  friend bool operator==(const EuclideanBox&, const EuclideanBox&) = default;
};

// Box in the foveated space: warped center plus the lengths of the two
// tangent vectors J(c) (w,0)^T and J(c) (0,h)^T.
struct RiemannianBox {
  NormPoint center{};
  double tx_mag = 0.0;
  double ty_mag = 0.0;

  friend bool operator==(const RiemannianBox&, const RiemannianBox&) = default;
};

struct LabeledBox {
  EuclideanBox box{};
  int class_id = 0;
  double score = 1.0;
};

// Throws Error(degenerate_box) unless w > 0, h > 0 and all fields are finite.
void validate(const EuclideanBox& box);

RiemannianBox to_riemannian(const EuclideanBox& box, const FoveationParams& params);

// Inverts to_riemannian: Newton solve for the center, then divides each
// tangent magnitude by the norm of the Jacobian column at that center.
// Throws Error(not_converged) if the center solve fails.
EuclideanBox to_euclidean(const RiemannianBox& box, const FoveationParams& params,
                          double tol = kDefaultTolerance);

// (tx_mag * ty_mag) / (w * h)
double area_amplification(const EuclideanBox& box, const FoveationParams& params);

double iou(const EuclideanBox& a, const EuclideanBox& b);
// IoU minus the fraction of the enclosing box not covered by the union.
double giou(const EuclideanBox& a, const EuclideanBox& b);
// |dcx| + |dcy| + |dw| + |dh|
double l1_loss(const EuclideanBox& a, const EuclideanBox& b) noexcept;

// Denoising-style box jitter. Center moves by U(-1,1) * center_scale * (w,h)/2,
// sizes are scaled by U(1 - size_scale, 1 + size_scale). Not thread safe; use
// one instance per thread.
class BoxNoiser {
 public:
  BoxNoiser(double center_scale, double size_scale, std::uint64_t seed);

  EuclideanBox operator()(const EuclideanBox& box);

 private:
  double center_scale_;
  double size_scale_;
  std::mt19937_64 rng_;
};

EuclideanBox noise_box(const EuclideanBox& box, double center_scale, double size_scale,
                       std::uint64_t seed);

}  // namespace hyperfovea
