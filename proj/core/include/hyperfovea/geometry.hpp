#pragma once

// Hyperbolic foveated map: a radial blend between a Poincare-disk style
// tanh contraction about an origin `o` and the identity. The map fixes `o`,
// magnifies its neighbourhood by `alpha`, and is exactly the identity for
// points at distance >= radius from `o`.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace hyperfovea {

// Normalized image coordinates; the image occupies [-1,1]^2 but every finite
// point of the plane is accepted.
struct NormPoint {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const NormPoint&, const NormPoint&) = default;
};

inline NormPoint operator+(NormPoint a, NormPoint b) { return {a.x + b.x, a.y + b.y}; }
inline NormPoint operator-(NormPoint a, NormPoint b) { return {a.x - b.x, a.y - b.y}; }
inline NormPoint operator*(double s, NormPoint a) { return {s * a.x, s * a.y}; }

double norm(NormPoint v) noexcept;
bool is_finite(NormPoint v) noexcept;
bool in_image_square(NormPoint v) noexcept;

struct FoveationParams {
  NormPoint origin{};
  double radius = 1.0;    // R; 0 disables the transform
  double alpha = 2.0;     // contraction strength
  double blend_exp = 2.0; // p

  bool is_identity() const noexcept { return radius == 0.0; }

  static FoveationParams identity() noexcept { return {NormPoint{}, 0.0, 1.0, 1.0}; }

  friend bool operator==(const FoveationParams&, const FoveationParams&) = default;
};

// Throws Error(invalid_params) unless alpha > 0, p > 0, R >= 0 (all finite)
// and the origin lies in [-1,1]^2.
void validate(const FoveationParams& params);

// Row-major 2x2 matrix.
struct Jacobian2 {
  double xx = 1.0, xy = 0.0;
  double yx = 0.0, yy = 1.0;

  double determinant() const noexcept { return xx * yy - xy * yx; }
  NormPoint apply(NormPoint v) const noexcept {
    return {xx * v.x + xy * v.y, yx * v.x + yy * v.y};
  }
};

enum class InverseMethod { newton, fixed_point };

std::string_view to_string(InverseMethod method) noexcept;

struct InverseReport {
  NormPoint solution{};
  int iterations = 0;
  double residual = 0.0;  // ||forward_map(solution) - y||
  bool converged = false;
  InverseMethod method = InverseMethod::newton;
  // Newton stalled and the result came from a bisection along the ray through y.
  bool radial_fallback = false;
};

inline constexpr double kDefaultTolerance = 1e-8;
inline constexpr int kDefaultNewtonMaxIter = 25;
inline constexpr int kDefaultFixedPointMaxIter = 200;
// Below this radius tanh(alpha r)/r is evaluated by its Taylor series.
inline constexpr double kSeriesRadius = 1e-6;
inline constexpr double kSingularDeterminant = 1e-12;

// w(r) = (1 - min(r/R, 1))^p. Requires R > 0.
double radial_weight(double r, const FoveationParams& params);

// o + tanh(alpha r)/r * (x - o), r = ||x - o||.
NormPoint poincare_contraction(NormPoint x, const FoveationParams& params);

// Phi(x) = (1 - w) x + w h(x).
NormPoint forward_map(NormPoint x, const FoveationParams& params);

// Analytic Jacobian of forward_map. Identity for r >= R (one-sided at r = R).
Jacobian2 jacobian(NormPoint x, const FoveationParams& params);

// Newton-Raphson inverse started at x0 = y, with step halving whenever the
// full step does not reduce the residual. A near-singular Jacobian falls back
// to a single damped fixed-point step; if a step still makes no progress the
// solve finishes with a bisection along the ray through y.
InverseReport inverse_newton(NormPoint y, const FoveationParams& params,
                             double tol = kDefaultTolerance,
                             int max_iter = kDefaultNewtonMaxIter);

// Step used by inverse_fixed_point when eta is not given: 2/(1+alpha) clamped
// to 1, which keeps the update contracting at the fovea where J = alpha I.
double default_fixed_point_step(const FoveationParams& params) noexcept;

// Damped residual iteration x <- x + eta (y - Phi(x)), x0 = y, eta in (0, 1].
InverseReport inverse_fixed_point(NormPoint y, const FoveationParams& params, double eta,
                                  double tol = kDefaultTolerance,
                                  int max_iter = kDefaultFixedPointMaxIter);

// Records every Newton iterate (starting with x0 = y) for convergence studies.
std::vector<NormPoint> newton_trajectory(NormPoint y, const FoveationParams& params,
                                         double tol, int max_iter);

// Minimum of d/dr ||Phi(x) - o|| over (0, R), sampled on `samples` points.
// The map is a diffeomorphism iff this stays positive.
double radial_derivative_min(const FoveationParams& params, int samples = 4096);
bool is_diffeomorphic(const FoveationParams& params, int samples = 4096);

struct SolverSettings {
  InverseMethod method = InverseMethod::newton;
  double tol = kDefaultTolerance;
  int max_iter = kDefaultNewtonMaxIter;
  double eta = 0.0;  // fixed point only; <= 0 selects default_fixed_point_step
};

InverseReport inverse_map(NormPoint y, const FoveationParams& params,
                          const SolverSettings& settings = {});

std::vector<NormPoint> forward_map_batch(std::span<const NormPoint> points,
                                         const FoveationParams& params,
                                         unsigned threads = 1);

struct BatchInverseResult {
  std::vector<InverseReport> reports;
  std::vector<std::size_t> failures;  // indices with converged == false, ascending

  bool all_converged() const noexcept { return failures.empty(); }
};

BatchInverseResult inverse_batch(std::span<const NormPoint> points,
                                 const FoveationParams& params,
                                 const SolverSettings& settings = {}, unsigned threads = 1);

// Pixel (i, j) of a width x height image has its center at
// (2(i+0.5)/width - 1, 2(j+0.5)/height - 1).
NormPoint pixel_center_to_norm(std::size_t i, std::size_t j, std::size_t width,
                               std::size_t height) noexcept;
// Continuous pixel coordinate (u, v), where pixel centers sit at integer + 0.5.
NormPoint pixel_to_norm(double u, double v, std::size_t width, std::size_t height) noexcept;
struct PixelPoint {
  double u = 0.0;
  double v = 0.0;
};
PixelPoint norm_to_pixel(NormPoint p, std::size_t width, std::size_t height) noexcept;

}  // namespace hyperfovea
