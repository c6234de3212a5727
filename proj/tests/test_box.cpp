#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hyperfovea/box.hpp"
#include "hyperfovea/error.hpp"

using namespace hyperfovea;

namespace {

const FoveationParams kDefault{{0.0, 0.0}, 1.0, 2.0, 2.0};

double max_component_error(const EuclideanBox& a, const EuclideanBox& b) {
  return std::max({std::abs(a.center.x - b.center.x), std::abs(a.center.y - b.center.y),
                   std::abs(a.w - b.w), std::abs(a.h - b.h)});
}

}  // namespace

TEST(Box, ValidateRejectsDegenerate) {
  EXPECT_NO_THROW(validate(EuclideanBox{{0, 0}, 0.1, 0.1}));
  for (const EuclideanBox b : {EuclideanBox{{0, 0}, 0.0, 0.1}, EuclideanBox{{0, 0}, 0.1, -1.0},
                               EuclideanBox{{NAN, 0}, 0.1, 0.1}}) {
    try {
      validate(b);
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::degenerate_box);
    }
  }
}

TEST(ToRiemannian, BoxAtFovea) {
  const RiemannianBox r = to_riemannian({{0, 0}, 0.1, 0.1}, kDefault);
  EXPECT_EQ(r.center, (NormPoint{0, 0}));
  EXPECT_NEAR(r.tx_mag, 0.2, 1e-12);
  EXPECT_NEAR(r.ty_mag, 0.2, 1e-12);
  EXPECT_NEAR(area_amplification({{0, 0}, 0.1, 0.1}, kDefault), 4.0, 1e-12);
}

TEST(ToRiemannian, FoveaMagnificationEqualsAlpha) {
  for (double a : {0.5, 1.0, 2.5, 4.0}) {
    const FoveationParams prm{{0.3, -0.4}, 0.6, a, 3.0};
    const RiemannianBox r = to_riemannian({prm.origin, 0.05, 0.02}, prm);
    EXPECT_NEAR(r.tx_mag / 0.05, a, 1e-9);
    EXPECT_NEAR(r.ty_mag / 0.02, a, 1e-9);
  }
}

TEST(ToRiemannian, IdentitySentinelAndIdentityRegion) {
  const EuclideanBox b{{0.2, 0.3}, 0.1, 0.05};
  const RiemannianBox a = to_riemannian(b, FoveationParams::identity());
  EXPECT_EQ(a, (RiemannianBox{b.center, b.w, b.h}));
  const EuclideanBox far{{0.9, 0.9}, 0.1, 0.05};
  const RiemannianBox c = to_riemannian(far, kDefault);
  EXPECT_EQ(c, (RiemannianBox{far.center, far.w, far.h}));
  EXPECT_EQ(area_amplification(far, kDefault), 1.0);
}

TEST(ToRiemannian, TangentMagnitudesAreLinear) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.0, 1.0), s(0.01, 0.3);
  for (int i = 0; i < 500; ++i) {
    const EuclideanBox b{{u(rng), u(rng)}, s(rng), s(rng)};
    const RiemannianBox one = to_riemannian(b, kDefault);
    const RiemannianBox two = to_riemannian({b.center, 2 * b.w, 2 * b.h}, kDefault);
    EXPECT_NEAR(two.tx_mag, 2 * one.tx_mag, 1e-12);
    EXPECT_NEAR(two.ty_mag, 2 * one.ty_mag, 1e-12);
  }
}

TEST(ToRiemannian, NearFoveaBoxesGrow) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int i = 0; i < 200; ++i) {
    const EuclideanBox b{{u(rng), u(rng)}, 0.05, 0.08};
    const RiemannianBox r = to_riemannian(b, kDefault);
    EXPECT_GT(r.tx_mag * r.ty_mag, b.w * b.h);
  }
}

TEST(ToEuclidean, InvertsFoveaExample) {
  const EuclideanBox b = to_euclidean({{0, 0}, 0.2, 0.2}, kDefault);
  EXPECT_NEAR(b.center.x, 0.0, 1e-12);
  EXPECT_NEAR(b.w, 0.1, 1e-12);
  EXPECT_NEAR(b.h, 0.1, 1e-12);
}

TEST(ToEuclidean, IdentityPassThrough) {
  const RiemannianBox r{{0.4, -0.2}, 0.3, 0.1};
  EXPECT_EQ(to_euclidean(r, FoveationParams::identity()), (EuclideanBox{r.center, 0.3, 0.1}));
}

TEST(ToEuclidean, RoundTripRandomBoxesAndParams) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> o(-1, 1), a(0.5, 4), p(2, 4), R(0.2, 1.4), s(0.005, 0.4);
  double worst = 0.0;
  for (int i = 0; i < 2000; ++i) {
    const FoveationParams prm{{o(rng), o(rng)}, R(rng), a(rng), p(rng)};
    const EuclideanBox b{{o(rng), o(rng)}, s(rng), s(rng)};
    worst = std::max(worst, max_component_error(to_euclidean(to_riemannian(b, prm), prm), b));
  }
  EXPECT_LE(worst, 1e-6);
}

TEST(ToEuclidean, RejectsBadInput) {
  EXPECT_THROW(to_euclidean({{0, 0}, 0.0, 0.1}, kDefault), Error);
  EXPECT_THROW(to_euclidean({{0, 0}, 0.1, 0.1}, kDefault, 0.0), Error);
}

TEST(Giou, WorkedExamples) {
  const EuclideanBox a{{0, 0}, 1, 1}, b{{10, 0}, 1, 1};
  EXPECT_EQ(iou(a, b), 0.0);
  EXPECT_NEAR(giou(a, b), -9.0 / 11.0, 1e-12);
  EXPECT_EQ(giou(a, a), 1.0);
  EXPECT_EQ(iou(a, a), 1.0);
}

TEST(Giou, GradientWhenDisjoint) {
  const EuclideanBox a{{0, 0}, 1, 1};
  const double h = 1e-4;
  const double left = giou(a, {{10 - h, 0}, 1, 1});
  const double right = giou(a, {{10 + h, 0}, 1, 1});
  EXPECT_GT(left, right);
  EXPECT_GT(std::abs((right - left) / (2 * h)), 1e-3);
  EXPECT_EQ(iou(a, {{10 - h, 0}, 1, 1}), iou(a, {{10 + h, 0}, 1, 1}));
}

TEST(Giou, BoundsAndSymmetry) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> c(-2, 2), s(0.01, 2);
  for (int i = 0; i < 5000; ++i) {
    const EuclideanBox a{{c(rng), c(rng)}, s(rng), s(rng)};
    const EuclideanBox b{{c(rng), c(rng)}, s(rng), s(rng)};
    const double g = giou(a, b);
    EXPECT_GT(g, -1.0);
    EXPECT_LE(g, 1.0);
    EXPECT_LE(g, iou(a, b) + 1e-15);
    EXPECT_DOUBLE_EQ(g, giou(b, a));
    EXPECT_EQ(l1_loss(a, b), l1_loss(b, a));
  }
  // Nested boxes: hull equals union, so gIoU == IoU.
  const EuclideanBox outer{{0, 0}, 2, 2}, inner{{0.2, 0.1}, 0.5, 0.5};
  EXPECT_DOUBLE_EQ(giou(outer, inner), iou(outer, inner));
}

TEST(Giou, RejectsDegenerate) {
  EXPECT_THROW(giou({{0, 0}, 0, 1}, {{0, 0}, 1, 1}), Error);
}

TEST(L1Loss, Examples) {
  const EuclideanBox a{{0.1, 0.2}, 0.3, 0.4};
  EXPECT_EQ(l1_loss(a, a), 0.0);
  EXPECT_NEAR(l1_loss(a, {{0.2, 0.2}, 0.3, 0.4}), 0.1, 1e-15);
  const EuclideanBox b{{-0.3, 0.5}, 0.1, 0.9};
  EXPECT_DOUBLE_EQ(l1_loss(a, b), 0.4 + 0.3 + 0.2 + 0.5);
}

TEST(Noise, ZeroScalesLeaveBoxUnchanged) {
  const EuclideanBox b{{0.1, -0.2}, 0.3, 0.2};
  EXPECT_EQ(noise_box(b, 0.0, 0.0, 99), b);
}

TEST(Noise, DeterministicGivenSeed) {
  const EuclideanBox b{{0.1, -0.2}, 0.3, 0.2};
  EXPECT_EQ(noise_box(b, 0.4, 0.4, 7), noise_box(b, 0.4, 0.4, 7));
  EXPECT_NE(noise_box(b, 0.4, 0.4, 7), noise_box(b, 0.4, 0.4, 8));
  BoxNoiser n1(0.4, 0.4, 5), n2(0.4, 0.4, 5);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(n1(b), n2(b));
}

TEST(Noise, OffsetsAndScalesBounded) {
  const EuclideanBox b{{0.0, 0.0}, 0.3, 0.2};
  BoxNoiser noiser(0.4, 0.4, 123);
  double max_dx = 0.0, max_dy = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const EuclideanBox n = noiser(b);
    max_dx = std::max(max_dx, std::abs(n.center.x));
    max_dy = std::max(max_dy, std::abs(n.center.y));
    EXPECT_LE(std::abs(n.center.x), 0.2 * b.w);
    EXPECT_LE(std::abs(n.center.y), 0.2 * b.h);
    EXPECT_GE(n.w, 0.6 * b.w - 1e-15);
    EXPECT_LE(n.w, 1.4 * b.w + 1e-15);
    EXPECT_GT(n.h, 0.0);
  }
  // The bound is attained, not just respected.
  EXPECT_GT(max_dx, 0.19 * b.w);
  EXPECT_GT(max_dy, 0.19 * b.h);
}

TEST(Noise, LargeSizeScaleStaysPositive) {
  BoxNoiser noiser(0.0, 5.0, 1);
  for (int i = 0; i < 1000; ++i) {
    const EuclideanBox n = noiser({{0, 0}, 0.1, 0.1});
    EXPECT_GT(n.w, 0.0);
    EXPECT_GT(n.h, 0.0);
  }
  EXPECT_THROW(BoxNoiser(-0.1, 0.0, 1), Error);
}
