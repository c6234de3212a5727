#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <thread>

#include "hyperfovea/error.hpp"
#include "hyperfovea/image.hpp"
#include "hyperfovea/warp.hpp"

using namespace hyperfovea;

namespace {

const FoveationParams kDefault{{0.0, 0.0}, 1.0, 2.0, 2.0};

ImageBuffer gradient_image(std::size_t w, std::size_t h) {
  ImageBuffer img(w, h, 1);
  for (std::size_t j = 0; j < h; ++j)
    for (std::size_t i = 0; i < w; ++i) {
      const double x = static_cast<double>(i) / static_cast<double>(w);
      const double y = static_cast<double>(j) / static_cast<double>(h);
      img.at(i, j, 0) = static_cast<float>(0.5 + 0.25 * std::sin(2.0 * x) + 0.2 * y * y);
    }
  return img;
}

// Bounding-box area of pixels above 0.5.
std::size_t bright_bbox_area(const ImageBuffer& img) {
  std::size_t x0 = img.width(), y0 = img.height(), x1 = 0, y1 = 0;
  for (std::size_t j = 0; j < img.height(); ++j)
    for (std::size_t i = 0; i < img.width(); ++i)
      if (img.at(i, j, 0) > 0.5f) {
        x0 = std::min(x0, i);
        y0 = std::min(y0, j);
        x1 = std::max(x1, i);
        y1 = std::max(y1, j);
      }
  return x1 < x0 ? 0 : (x1 - x0 + 1) * (y1 - y0 + 1);
}

}  // namespace

TEST(InverseGrid, IdentitySentinelIsPixelLattice) {
  const WarpGrid g = build_inverse_grid(17, 9, FoveationParams::identity());
  EXPECT_EQ(g.valid_count(), 17u * 9u);
  for (std::size_t j = 0; j < 9; ++j)
    for (std::size_t i = 0; i < 17; ++i)
      EXPECT_EQ(g.source[j * 17 + i], pixel_center_to_norm(i, j, 17, 9));
}

TEST(InverseGrid, ResidualAndRoundTrip) {
  const WarpGrid g = build_inverse_grid(64, 64, kDefault);
  EXPECT_TRUE(g.failures.empty());
  EXPECT_EQ(g.valid_count(), 64u * 64u);
  EXPECT_LT(g.max_residual, 1e-6);
  double worst = 0.0;
  for (std::size_t j = 0; j < 64; ++j)
    for (std::size_t i = 0; i < 64; ++i) {
      const NormPoint y = pixel_center_to_norm(i, j, 64, 64);
      worst = std::max(worst, norm(forward_map(g.source[j * 64 + i], kDefault) - y));
    }
  EXPECT_LT(worst, 1e-6);
}

TEST(InverseGrid, IdentityRegionCopiesSelf) {
  const WarpGrid g = build_inverse_grid(32, 32, kDefault);
  for (std::size_t j = 0; j < 32; ++j)
    for (std::size_t i = 0; i < 32; ++i) {
      const NormPoint y = pixel_center_to_norm(i, j, 32, 32);
      if (norm(y) >= 1.0) EXPECT_EQ(g.source[j * 32 + i], y);
    }
  EXPECT_EQ(g.source[0], pixel_center_to_norm(0, 0, 32, 32));
}

TEST(InverseGrid, RejectsEmptyDims) {
  EXPECT_THROW(build_inverse_grid(0, 4, kDefault), Error);
}

TEST(InverseGrid, ValidAcrossSweepForMagnifyingParams) {
  // alpha >= 1 only: for alpha < 1 the map contracts and preimages of border
  // pixels can leave the frame by more than the guard band.
  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> o(-0.9, 0.9), a(1.0, 4.0), p(0.5, 4.0), R(0.2, 1.4);
  for (int t = 0; t < 40; ++t) {
    const FoveationParams prm{{o(rng), o(rng)}, R(rng), a(rng), p(rng)};
    const WarpGrid g = build_inverse_grid(48, 40, prm);
    EXPECT_TRUE(g.failures.empty());
    EXPECT_EQ(g.valid_count(), 48u * 40u)
        << "alpha=" << prm.alpha << " p=" << prm.blend_exp << " R=" << prm.radius;
    EXPECT_LT(g.max_residual, 1e-5);
  }
}

TEST(InverseGrid, ContractingParamsCanInvalidateBorderPixels) {
  const WarpGrid g = build_inverse_grid(64, 64, {{0.9, 0.9}, 1.4, 0.5, 2.0});
  EXPECT_LT(g.valid_count(), 64u * 64u);
}

TEST(InverseGrid, ThreadCountDoesNotChangeResult) {
  const FoveationParams prm{{0.2, -0.1}, 0.8, 3.0, 2.5};
  const WarpGrid a = build_inverse_grid(50, 30, prm, kDefaultTolerance, 1);
  const WarpGrid b = build_inverse_grid(50, 30, prm, kDefaultTolerance, 7);
  EXPECT_EQ(a.source, b.source);
  EXPECT_EQ(a.valid, b.valid);
  EXPECT_EQ(a.max_residual, b.max_residual);
}

TEST(WarpImage, IdentityGridIsExact) {
  const ImageBuffer chart = make_test_chart(40, 30);
  EXPECT_EQ(warp_image(chart, build_inverse_grid(40, 30, FoveationParams::identity())), chart);
}

TEST(WarpImage, ConstantStaysConstant) {
  const ImageBuffer flat(32, 24, 3, 0.375f);
  const WarpGrid g = build_inverse_grid(32, 24, {{0.3, 0.1}, 0.9, 3.0, 2.0});
  const ImageBuffer out = warp_image(flat, g);
  for (std::size_t idx = 0; idx < g.valid.size(); ++idx) {
    if (!g.valid[idx]) continue;
    for (std::size_t c = 0; c < 3; ++c) EXPECT_FLOAT_EQ(out.data()[idx * 3 + c], 0.375f);
  }
}

TEST(WarpImage, InvalidPixelsAreZero) {
  const ImageBuffer flat(64, 64, 1, 0.8f);
  const WarpGrid g = build_inverse_grid(64, 64, {{0.9, 0.9}, 1.4, 0.5, 2.0});
  const ImageBuffer out = warp_image(flat, g);
  for (std::size_t idx = 0; idx < g.valid.size(); ++idx)
    if (!g.valid[idx]) EXPECT_EQ(out.data()[idx], 0.0f);
}

TEST(WarpImage, DimensionMismatch) {
  try {
    warp_image(ImageBuffer(8, 8, 1), build_inverse_grid(8, 9, kDefault));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension_mismatch);
  }
  EXPECT_THROW(warp_image(ImageBuffer(), build_inverse_grid(8, 8, kDefault)), Error);
}

TEST(WarpImage, FoveaSquareGrows) {
  ImageBuffer img(96, 96, 1, 0.0f);
  for (std::size_t j = 40; j < 56; ++j)
    for (std::size_t i = 40; i < 56; ++i) img.at(i, j, 0) = 1.0f;
  const ImageBuffer out = warp_image(img, build_inverse_grid(96, 96, kDefault));
  EXPECT_GT(bright_bbox_area(out), bright_bbox_area(img));
}

TEST(WarpImage, BrightnessBoundAndDeterminism) {
  const ImageBuffer chart = make_test_chart(64, 48);
  const auto [lo, hi] = std::minmax_element(chart.data().begin(), chart.data().end());
  const WarpGrid g = build_inverse_grid(64, 48, {{-0.2, 0.3}, 1.1, 2.5, 2.0});
  const ImageBuffer a = warp_image(chart, g, 1);
  const ImageBuffer b = warp_image(chart, g, 5);
  EXPECT_EQ(a, b);
  for (std::size_t idx = 0; idx < g.valid.size(); ++idx) {
    if (!g.valid[idx]) continue;
    for (std::size_t c = 0; c < 3; ++c) {
      EXPECT_GE(a.data()[idx * 3 + c], *lo);
      EXPECT_LE(a.data()[idx * 3 + c], *hi);
    }
  }
}

TEST(WarpImage, GrayAndThreeChannelAgree) {
  const ImageBuffer gray = gradient_image(40, 32);
  ImageBuffer rgb(40, 32, 3);
  for (std::size_t i = 0; i < gray.data().size(); ++i)
    for (std::size_t c = 0; c < 3; ++c) rgb.data()[i * 3 + c] = gray.data()[i];
  const WarpGrid g = build_inverse_grid(40, 32, kDefault);
  const ImageBuffer a = warp_image(gray, g);
  const ImageBuffer b = warp_image(rgb, g);
  for (std::size_t i = 0; i < a.data().size(); ++i)
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(a.data()[i], b.data()[i * 3 + c]);
}

TEST(Unwarp, IdentitySentinel) {
  const ImageBuffer chart = make_test_chart(24, 24);
  EXPECT_EQ(unwarp_image(chart, FoveationParams::identity()), chart);
}

TEST(Unwarp, RecoversSmoothImage) {
  const std::size_t n = 128;
  const ImageBuffer src = gradient_image(n, n);
  const ImageBuffer back = unwarp_image(warp_image(src, build_inverse_grid(n, n, kDefault)), kDefault);
  double max_err = 0.0, mse = 0.0;
  std::size_t count = 0;
  for (std::size_t j = 2; j < n - 2; ++j)
    for (std::size_t i = 2; i < n - 2; ++i) {
      const double e = std::abs(back.at(i, j, 0) - src.at(i, j, 0));
      max_err = std::max(max_err, e);
      mse += e * e;
      ++count;
    }
  const double psnr = 10.0 * std::log10(1.0 / (mse / static_cast<double>(count)));
  EXPECT_LT(max_err, 0.02);
  EXPECT_GE(psnr, 30.0);
}

TEST(GridCache, SharesGrids) {
  GridCache cache;
  const auto a = cache.inverse_grid(16, 16, kDefault);
  const auto b = cache.inverse_grid(16, 16, kDefault);
  EXPECT_EQ(a.get(), b.get());
  const auto c = cache.inverse_grid(16, 16, {{0.1, 0.0}, 1.0, 2.0, 2.0});
  EXPECT_NE(a.get(), c.get());
  EXPECT_EQ(cache.size(), 2u);
}

TEST(GridCache, ConcurrentRequestsAgree) {
  GridCache cache;
  std::vector<std::shared_ptr<const WarpGrid>> got(4);
  {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < got.size(); ++t)
      pool.emplace_back([&, t] { got[t] = cache.inverse_grid(24, 24, kDefault); });
  }
  for (const auto& g : got) EXPECT_EQ(g.get(), got[0].get());
}

TEST(Image, ByteRoundTripAndCodecs) {
  const ImageBuffer chart = make_test_chart(33, 21);
  const ImageBuffer q = from_bytes(33, 21, 3, to_bytes(chart));
  const auto dir = std::filesystem::temp_directory_path() / "hyperfovea_image_test";
  std::filesystem::create_directories(dir);
  for (const char* name : {"a.png", "a.ppm"}) {
    save_image(dir / name, q);
    EXPECT_EQ(load_image(dir / name), q) << name;
  }
  ImageBuffer gray(5, 4, 1, 0.2f);
  gray = from_bytes(5, 4, 1, to_bytes(gray));
  for (const char* name : {"g.png", "g.pgm"}) {
    save_image(dir / name, gray);
    EXPECT_EQ(load_image(dir / name), gray) << name;
  }
  try {
    load_image(dir / "missing.png");
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::io_error);
  }
  std::filesystem::remove_all(dir);
}

TEST(Image, ResizeIdentityAndConstant) {
  const ImageBuffer chart = make_test_chart(20, 10);
  EXPECT_EQ(resize_bilinear(chart, 20, 10), chart);
  const ImageBuffer flat(20, 10, 1, 0.25f);
  const ImageBuffer small = resize_bilinear(flat, 7, 3);
  EXPECT_EQ(small.width(), 7u);
  for (float v : small.data()) EXPECT_FLOAT_EQ(v, 0.25f);
}
