#include "hyperfovea/warp.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hyperfovea/error.hpp"
#include "hyperfovea/parallel.hpp"

namespace hyperfovea {

namespace {

// Positions this close to a pixel center are sampled at the center, so an
// identity grid reproduces the source bit for bit.
constexpr double kSnap = 1e-9;

bool inside_guard_band(NormPoint p, std::size_t width, std::size_t height) noexcept {
  const double gx = 2.0 / static_cast<double>(width);
  const double gy = 2.0 / static_cast<double>(height);
  return p.x >= -1.0 - gx && p.x <= 1.0 + gx && p.y >= -1.0 - gy && p.y <= 1.0 + gy;
}

double snap(double f) noexcept {
  const double nearest = std::round(f);
  return std::abs(f - nearest) <= kSnap ? nearest : f;
}

void require_dims(std::size_t width, std::size_t height) {
  if (width == 0 || height == 0) {
    throw Error(ErrorCode::dimension_mismatch, "grid dimensions must be at least 1x1");
  }
}

}  // namespace

std::size_t WarpGrid::valid_count() const noexcept {
  return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), std::uint8_t{1}));
}

WarpGrid build_inverse_grid(std::size_t width, std::size_t height, const FoveationParams& params,
                            double tol, unsigned threads) {
  validate(params);
  require_dims(width, height);
  WarpGrid grid;
  grid.width = width;
  grid.height = height;
  grid.source.resize(width * height);
  grid.valid.assign(width * height, 0);
  std::vector<double> residual(width * height, 0.0);
  std::vector<std::uint8_t> failed(width * height, 0);

  parallel_for(height, threads, [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t j = row_begin; j < row_end; ++j) {
      for (std::size_t i = 0; i < width; ++i) {
        const std::size_t idx = j * width + i;
        const NormPoint y = pixel_center_to_norm(i, j, width, height);
        if (params.is_identity() || norm(y - params.origin) >= params.radius) {
          grid.source[idx] = y;
          grid.valid[idx] = 1;
          continue;
        }
        const InverseReport inv = inverse_newton(y, params, tol, kDefaultNewtonMaxIter);
        grid.source[idx] = inv.solution;
        if (!inv.converged) {
          failed[idx] = 1;
          continue;
        }
        residual[idx] = inv.residual;
        grid.valid[idx] = inside_guard_band(inv.solution, width, height) ? 1 : 0;
      }
    }
  });

  for (std::size_t idx = 0; idx < failed.size(); ++idx) {
    if (failed[idx]) grid.failures.push_back(idx);
    if (grid.valid[idx]) grid.max_residual = std::max(grid.max_residual, residual[idx]);
  }
  return grid;
}

WarpGrid build_forward_grid(std::size_t width, std::size_t height, const FoveationParams& params,
                            unsigned threads) {
  validate(params);
  require_dims(width, height);
  WarpGrid grid;
  grid.width = width;
  grid.height = height;
  grid.source.resize(width * height);
  grid.valid.assign(width * height, 0);
  parallel_for(height, threads, [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t j = row_begin; j < row_end; ++j) {
      for (std::size_t i = 0; i < width; ++i) {
        const std::size_t idx = j * width + i;
        const NormPoint x = forward_map(pixel_center_to_norm(i, j, width, height), params);
        grid.source[idx] = x;
        grid.valid[idx] = inside_guard_band(x, width, height) ? 1 : 0;
      }
    }
  });
  return grid;
}

ImageBuffer warp_image(const ImageBuffer& src, const WarpGrid& grid, unsigned threads) {
  if (src.empty()) throw Error(ErrorCode::dimension_mismatch, "source image is empty");
  if (src.width() != grid.width || src.height() != grid.height ||
      grid.source.size() != grid.width * grid.height) {
    std::ostringstream msg;
    msg << "image is " << src.width() << "x" << src.height() << " but grid is " << grid.width
        << "x" << grid.height;
    throw Error(ErrorCode::dimension_mismatch, msg.str());
  }
  const std::size_t w = src.width();
  const std::size_t h = src.height();
  const std::size_t channels = src.channels();
  const double max_x = static_cast<double>(w - 1);
  const double max_y = static_cast<double>(h - 1);
  ImageBuffer out(w, h, channels);

  parallel_for(h, threads, [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t j = row_begin; j < row_end; ++j) {
      for (std::size_t i = 0; i < w; ++i) {
        const std::size_t idx = j * w + i;
        if (!grid.valid[idx]) continue;
        const PixelPoint px = norm_to_pixel(grid.source[idx], w, h);
        const double fx = std::clamp(snap(px.u - 0.5), 0.0, max_x);
        const double fy = std::clamp(snap(px.v - 0.5), 0.0, max_y);
        const auto x0 = static_cast<std::size_t>(fx);
        const auto y0 = static_cast<std::size_t>(fy);
        const std::size_t x1 = std::min(x0 + 1, w - 1);
        const std::size_t y1 = std::min(y0 + 1, h - 1);
        const double tx = fx - static_cast<double>(x0);
        const double ty = fy - static_cast<double>(y0);
        for (std::size_t c = 0; c < channels; ++c) {
          if (tx == 0.0 && ty == 0.0) {
            out.at(i, j, c) = src.at(x0, y0, c);
            continue;
          }
          const double top = (1.0 - tx) * src.at(x0, y0, c) + tx * src.at(x1, y0, c);
          const double bottom = (1.0 - tx) * src.at(x0, y1, c) + tx * src.at(x1, y1, c);
          out.at(i, j, c) = static_cast<float>((1.0 - ty) * top + ty * bottom);
        }
      }
    }
  });
  return out;
}

ImageBuffer unwarp_image(const ImageBuffer& foveated, const FoveationParams& params,
                         unsigned threads) {
  if (foveated.empty()) throw Error(ErrorCode::dimension_mismatch, "source image is empty");
  return warp_image(foveated, build_forward_grid(foveated.width(), foveated.height(), params, threads),
                    threads);
}

std::shared_ptr<const WarpGrid> GridCache::inverse_grid(std::size_t width, std::size_t height,
                                                        const FoveationParams& params,
                                                        double tol, unsigned threads) {
  const Key key{width,        height,       params.origin.x, params.origin.y,
                params.radius, params.alpha, params.blend_exp, tol};
  {
    std::lock_guard lock(mutex_);
    if (const auto it = grids_.find(key); it != grids_.end()) return it->second;
  }
  auto grid = std::make_shared<const WarpGrid>(build_inverse_grid(width, height, params, tol, threads));
  std::lock_guard lock(mutex_);
  return grids_.try_emplace(key, std::move(grid)).first->second;
}

std::size_t GridCache::size() const {
  std::lock_guard lock(mutex_);
  return grids_.size();
}

}  // namespace hyperfovea
