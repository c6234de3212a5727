#include "hyperfovea/geometry.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "hyperfovea/error.hpp"
#include "hyperfovea/parallel.hpp"

namespace hyperfovea {

namespace {

// Scalar gain s(r) with Phi(x) = o + s(r) (x - o), and its derivative s'(r).
struct RadialGain {
  double s;
  double ds;
};

// tanh(alpha r)/r and its derivative, with the removable singularity at 0
// replaced by the Taylor expansion alpha - alpha^3 r^2 / 3.
RadialGain contraction_gain(double r, double alpha) {
  if (r < kSeriesRadius) {
    const double a3 = alpha * alpha * alpha;
    return {alpha - a3 * r * r / 3.0, -2.0 * a3 * r / 3.0};
  }
  const double t = std::tanh(alpha * r);
  const double sech2 = 1.0 - t * t;
  return {t / r, (alpha * sech2 * r - t) / (r * r)};
}

// Valid only for 0 <= r < R.
RadialGain radial_gain(double r, const FoveationParams& params) {
  const double u = 1.0 - r / params.radius;
  const double w = std::pow(u, params.blend_exp);
  const double dw = -params.blend_exp / params.radius * std::pow(u, params.blend_exp - 1.0);
  const RadialGain g = contraction_gain(r, params.alpha);
  return {(1.0 - w) + w * g.s, dw * (g.s - 1.0) + w * g.ds};
}

void require_solver_settings(double tol, int max_iter) {
  if (!(tol > 0.0) || max_iter < 1) {
    std::ostringstream msg;
    msg << "solver needs tol > 0 and max_iter >= 1 (got tol=" << tol
        << ", max_iter=" << max_iter << ")";
    throw Error(ErrorCode::invalid_params, msg.str());
  }
}

InverseReport non_finite_query(NormPoint y, InverseMethod method) {
  InverseReport report;
  report.solution = y;
  report.residual = std::numeric_limits<double>::quiet_NaN();
  report.method = method;
  return report;
}

}  // namespace

double norm(NormPoint v) noexcept { return std::hypot(v.x, v.y); }

bool is_finite(NormPoint v) noexcept { return std::isfinite(v.x) && std::isfinite(v.y); }

bool in_image_square(NormPoint v) noexcept {
  return v.x >= -1.0 && v.x <= 1.0 && v.y >= -1.0 && v.y <= 1.0;
}

void validate(const FoveationParams& params) {
  std::ostringstream msg;
  if (!(std::isfinite(params.alpha) && params.alpha > 0.0)) {
    msg << "alpha must be positive, got " << params.alpha;
  } else if (!(std::isfinite(params.blend_exp) && params.blend_exp > 0.0)) {
    msg << "p must be positive, got " << params.blend_exp;
  } else if (!(std::isfinite(params.radius) && params.radius >= 0.0)) {
    msg << "R must be non-negative, got " << params.radius;
  } else if (!is_finite(params.origin) || !in_image_square(params.origin)) {
    msg << "origin must lie in [-1,1]^2, got (" << params.origin.x << ", " << params.origin.y
        << ")";
  } else {
    return;
  }
  throw Error(ErrorCode::invalid_params, msg.str());
}

std::string_view to_string(InverseMethod method) noexcept {
  return method == InverseMethod::newton ? "newton" : "fixed_point";
}

double radial_weight(double r, const FoveationParams& params) {
  validate(params);
  if (!(params.radius > 0.0)) {
    throw Error(ErrorCode::invalid_params, "radial weight needs R > 0");
  }
  if (!(r >= 0.0)) throw Error(ErrorCode::invalid_params, "radial weight needs r >= 0");
  return std::pow(1.0 - std::min(r / params.radius, 1.0), params.blend_exp);
}

NormPoint poincare_contraction(NormPoint x, const FoveationParams& params) {
  validate(params);
  const NormPoint d = x - params.origin;
  const double r = norm(d);
  return params.origin + contraction_gain(r, params.alpha).s * d;
}

NormPoint forward_map(NormPoint x, const FoveationParams& params) {
  validate(params);
  if (params.is_identity()) return x;
  const NormPoint d = x - params.origin;
  const double r = norm(d);
  if (!(r < params.radius)) return x;
  if (r == 0.0) return params.origin;
  return params.origin + radial_gain(r, params).s * d;
}

Jacobian2 jacobian(NormPoint x, const FoveationParams& params) {
  validate(params);
  if (params.is_identity()) return {};
  const NormPoint d = x - params.origin;
  const double r = norm(d);
  if (!(r < params.radius)) return {};
  const RadialGain g = radial_gain(r, params);
  if (r == 0.0) return {g.s, 0.0, 0.0, g.s};
  // d/dx [s(r) d] = s I + s'(r) d d^T / r
  const double k = g.ds / r;
  return {g.s + k * d.x * d.x, k * d.x * d.y, k * d.x * d.y, g.s + k * d.y * d.y};
}

namespace {

struct Iterate {
  NormPoint x;
  double residual;
};

// Halvings tried before a step that does not reduce the residual is taken anyway.
constexpr int kMaxBacktracks = 30;

// One Newton update with backtracking on the residual norm. Started at x0 = y
// the full step overshoots when alpha is large (the tanh profile flattens fast),
// so the step is halved until the residual decreases; near the root the full
// step is always accepted and convergence stays quadratic.
Iterate newton_step(const Iterate& cur, NormPoint y, const FoveationParams& params) {
  const NormPoint residual = forward_map(cur.x, params) - y;
  const Jacobian2 j = jacobian(cur.x, params);
  const double det = j.determinant();
  if (!(std::abs(det) >= kSingularDeterminant)) {
    const NormPoint x = cur.x - default_fixed_point_step(params) * residual;
    return {x, norm(forward_map(x, params) - y)};
  }
  const NormPoint delta{(j.yy * residual.x - j.xy * residual.y) / det,
                        (-j.yx * residual.x + j.xx * residual.y) / det};
  double t = 1.0;
  Iterate next{cur.x - delta, 0.0};
  next.residual = norm(forward_map(next.x, params) - y);
  for (int k = 0; k < kMaxBacktracks && !(next.residual < cur.residual); ++k) {
    t *= 0.5;
    next.x = cur.x - t * delta;
    next.residual = norm(forward_map(next.x, params) - y);
  }
  return next;
}

// Phi maps each ray from the origin onto itself, so the preimage of y lies on
// the ray through y at the radius where the radial profile reaches |y - o|.
// Bracketed by [0, R]; used when Newton stops making progress (the profile
// has a vertical tangent at r = R when p < 1).
Iterate radial_bisection(NormPoint y, const FoveationParams& params, double tol) {
  const NormPoint d = y - params.origin;
  const double target = norm(d);
  if (target == 0.0 || target >= params.radius) return {y, norm(forward_map(y, params) - y)};
  const NormPoint u = (1.0 / target) * d;
  double lo = 0.0;
  double hi = params.radius;
  Iterate best{params.origin, target};
  for (int k = 0; k < 200 && best.residual > tol; ++k) {
    const double mid = 0.5 * (lo + hi);
    if (!(lo < mid && mid < hi)) break;
    const NormPoint x = params.origin + mid * u;
    const NormPoint fx = forward_map(x, params);
    const double along = (fx.x - params.origin.x) * u.x + (fx.y - params.origin.y) * u.y;
    (along < target ? lo : hi) = mid;
    const double residual = norm(fx - y);
    if (residual < best.residual) best = {x, residual};
  }
  return best;
}

}  // namespace

InverseReport inverse_newton(NormPoint y, const FoveationParams& params, double tol,
                             int max_iter) {
  validate(params);
  require_solver_settings(tol, max_iter);
  if (!is_finite(y)) return non_finite_query(y, InverseMethod::newton);

  InverseReport report;
  report.method = InverseMethod::newton;
  Iterate it{y, norm(forward_map(y, params) - y)};
  int k = 0;
  while (it.residual > tol && k < max_iter) {
    const Iterate next = newton_step(it, y, params);
    ++k;
    if (!(next.residual < it.residual)) {
      const Iterate radial = radial_bisection(y, params, tol);
      report.radial_fallback = true;
      it = radial.residual < it.residual ? radial : it;
      break;
    }
    it = next;
  }
  report.solution = it.x;
  report.iterations = k;
  report.residual = it.residual;
  report.converged = it.residual <= tol;
  return report;
}

std::vector<NormPoint> newton_trajectory(NormPoint y, const FoveationParams& params, double tol,
                                         int max_iter) {
  validate(params);
  require_solver_settings(tol, max_iter);
  std::vector<NormPoint> path{y};
  Iterate it{y, norm(forward_map(y, params) - y)};
  for (int k = 0; k < max_iter && it.residual > tol; ++k) {
    it = newton_step(it, y, params);
    path.push_back(it.x);
  }
  return path;
}

double default_fixed_point_step(const FoveationParams& params) noexcept {
  return std::min(1.0, 2.0 / (1.0 + params.alpha));
}

InverseReport inverse_fixed_point(NormPoint y, const FoveationParams& params, double eta,
                                  double tol, int max_iter) {
  validate(params);
  require_solver_settings(tol, max_iter);
  if (!(eta > 0.0 && eta <= 1.0)) {
    std::ostringstream msg;
    msg << "fixed-point step must lie in (0, 1], got " << eta;
    throw Error(ErrorCode::invalid_params, msg.str());
  }
  if (!is_finite(y)) return non_finite_query(y, InverseMethod::fixed_point);

  InverseReport report;
  report.method = InverseMethod::fixed_point;
  NormPoint x = y;
  NormPoint residual = y - forward_map(x, params);
  int k = 0;
  while (norm(residual) > tol && k < max_iter) {
    x = x + eta * residual;
    residual = y - forward_map(x, params);
    ++k;
  }
  report.solution = x;
  report.iterations = k;
  report.residual = norm(residual);
  report.converged = report.residual <= tol;
  return report;
}

InverseReport inverse_map(NormPoint y, const FoveationParams& params,
                          const SolverSettings& settings) {
  if (settings.method == InverseMethod::newton) {
    return inverse_newton(y, params, settings.tol, settings.max_iter);
  }
  const double eta = settings.eta > 0.0 ? settings.eta : default_fixed_point_step(params);
  return inverse_fixed_point(y, params, eta, settings.tol, settings.max_iter);
}

double radial_derivative_min(const FoveationParams& params, int samples) {
  validate(params);
  if (params.is_identity()) return 1.0;
  if (samples < 1) throw Error(ErrorCode::invalid_params, "need at least one sample");
  double lowest = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double r = params.radius * (i + 0.5) / samples;
    const RadialGain g = radial_gain(r, params);
    // d/dr [r s(r)]
    lowest = std::min(lowest, g.s + r * g.ds);
  }
  return lowest;
}

bool is_diffeomorphic(const FoveationParams& params, int samples) {
  return radial_derivative_min(params, samples) > 0.0;
}

std::vector<NormPoint> forward_map_batch(std::span<const NormPoint> points,
                                         const FoveationParams& params, unsigned threads) {
  validate(params);
  std::vector<NormPoint> out(points.size());
  parallel_for(points.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = forward_map(points[i], params);
  });
  return out;
}

BatchInverseResult inverse_batch(std::span<const NormPoint> points,
                                 const FoveationParams& params, const SolverSettings& settings,
                                 unsigned threads) {
  validate(params);
  require_solver_settings(settings.tol, settings.max_iter);
  BatchInverseResult result;
  result.reports.resize(points.size());
  parallel_for(points.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      result.reports[i] = inverse_map(points[i], params, settings);
    }
  });
  for (std::size_t i = 0; i < result.reports.size(); ++i) {
    if (!result.reports[i].converged) result.failures.push_back(i);
  }
  return result;
}

NormPoint pixel_center_to_norm(std::size_t i, std::size_t j, std::size_t width,
                               std::size_t height) noexcept {
  return pixel_to_norm(static_cast<double>(i) + 0.5, static_cast<double>(j) + 0.5, width,
                       height);
}

NormPoint pixel_to_norm(double u, double v, std::size_t width, std::size_t height) noexcept {
  return {2.0 * u / static_cast<double>(width) - 1.0,
          2.0 * v / static_cast<double>(height) - 1.0};
}

PixelPoint norm_to_pixel(NormPoint p, std::size_t width, std::size_t height) noexcept {
  return {(p.x + 1.0) * 0.5 * static_cast<double>(width),
          (p.y + 1.0) * 0.5 * static_cast<double>(height)};
}

}  // namespace hyperfovea
