#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

#include "hyperfovea/geometry.hpp"
#include "hyperfovea/image.hpp"

namespace hyperfovea {

// Per-pixel sampling positions (normalized coordinates in the source image)
// for an output raster of width x height.
struct WarpGrid {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<NormPoint> source;
  std::vector<std::uint8_t> valid;
  // Row-major pixel indices whose inverse solve did not converge.
  std::vector<std::size_t> failures;
  // Largest ||Phi(source) - pixel center|| over valid inverse-grid entries.
  double max_residual = 0.0;

  std::size_t valid_count() const noexcept;
};

// For every output pixel center y stores x = Phi^{-1}(y). Entries are invalid
// when the solve fails or x leaves the image by more than one pixel.
WarpGrid build_inverse_grid(std::size_t width, std::size_t height, const FoveationParams& params,
                            double tol = kDefaultTolerance, unsigned threads = 1);

// For every output pixel center x stores Phi(x); the sampling grid that undoes
// a warp built from build_inverse_grid.
WarpGrid build_forward_grid(std::size_t width, std::size_t height, const FoveationParams& params,
                            unsigned threads = 1);

// Bilinear gather; clamp-to-edge inside the guard band, 0 for invalid entries.
// Source and grid must have the same dimensions.
ImageBuffer warp_image(const ImageBuffer& src, const WarpGrid& grid, unsigned threads = 1);

ImageBuffer unwarp_image(const ImageBuffer& foveated, const FoveationParams& params,
                         unsigned threads = 1);

// Shares grids across images with the same (dims, params, tol).
class GridCache {
 public:
  std::shared_ptr<const WarpGrid> inverse_grid(std::size_t width, std::size_t height,
                                               const FoveationParams& params,
                                               double tol = kDefaultTolerance,
                                               unsigned threads = 1);
  std::size_t size() const;

 private:
  using Key = std::tuple<std::size_t, std::size_t, double, double, double, double, double, double>;
  mutable std::mutex mutex_;
  std::map<Key, std::shared_ptr<const WarpGrid>> grids_;
};

}  // namespace hyperfovea
