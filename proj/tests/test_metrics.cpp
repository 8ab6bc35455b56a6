#include "mhdm/errors.hpp"
#include "mhdm/io.hpp"
#include "mhdm/metrics.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace mhdm;

namespace {

Image data_image(const char* name) { return io::read_image(std::string(MHDM_TEST_DATA) + "/" + name); }

Image gamma(const Image& x, double g) {
  Image y = x;
  for (double& v : y.values()) v = std::pow(v, g);
  return y;
}

// Per-window SSIM with the window applied as two 1-D passes.
double separable_ssim(const Image& x, const Image& y) {
  double w1[11];
  double total = 0.0;
  for (int i = 0; i < 11; ++i) {
    w1[i] = std::exp(-(i - 5) * (i - 5) / (2.0 * 1.5 * 1.5));
    total += w1[i];
  }
  for (double& v : w1) v /= total;
  const double c1 = 1e-4, c2 = 9e-4;
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t r = 0; r + 11 <= x.rows(); ++r) {
    for (std::size_t c = 0; c + 11 <= x.cols(); ++c) {
      double mx = 0, my = 0;
      for (int i = 0; i < 11; ++i) {
        for (int j = 0; j < 11; ++j) {
          mx += w1[i] * w1[j] * x(r + i, c + j);
          my += w1[i] * w1[j] * y(r + i, c + j);
        }
      }
      double vx = 0, vy = 0, cov = 0;
      for (int i = 0; i < 11; ++i) {
        for (int j = 0; j < 11; ++j) {
          const double dx = x(r + i, c + j) - mx;
          const double dy = y(r + i, c + j) - my;
          vx += w1[i] * w1[j] * dx * dx;
          vy += w1[i] * w1[j] * dy * dy;
          cov += w1[i] * w1[j] * dx * dy;
        }
      }
      acc += (2 * mx * my + c1) * (2 * cov + c2) / ((mx * mx + my * my + c1) * (vx + vy + c2));
      ++count;
    }
  }
  return acc / static_cast<double>(count);
}

} // namespace

TEST(Psnr, IdenticalIsInfinite) {
  const Image x = testing_support::random_image(8, 8, 1);
  EXPECT_EQ(psnr(x, x), std::numeric_limits<double>::infinity());
}

TEST(Psnr, ConstantOffset) {
  const Image ref(10, 10, 0.5);
  const Image x(10, 10, 0.6);
  EXPECT_NEAR(psnr(x, ref), 20.0, 1e-12);
  EXPECT_NEAR(psnr(x, ref, 255.0), 20.0 * std::log10(2550.0), 1e-10);
}

TEST(Psnr, Errors) {
  EXPECT_THROW(psnr(Image(2, 2), Image(2, 3)), DimensionMismatch);
  EXPECT_THROW(psnr(Image(2, 2), Image(2, 2), 0.0), InvalidArgument);
}

TEST(Psnr, MatchesReferenceImplementation) {
  const Image a = data_image("camera64.pgm");
  EXPECT_NEAR(psnr(gamma(a, 0.8), a), 24.84907999184587, 1e-9);
}

TEST(Ssim, IdenticalIsOne) {
  const Image a = data_image("camera64.pgm");
  EXPECT_NEAR(ssim(a, a), 1.0, 1e-12);
}

TEST(Ssim, MatchesReferenceImplementation) {
  const Image cam = data_image("camera64.pgm");
  const Image moon = data_image("moon64.pgm");
  // Gaussian-weighted SSIM (sigma 1.5, population covariance, range 1) as
  // computed by scikit-image 0.25.
  EXPECT_NEAR(ssim(gamma(cam, 0.8), cam), 0.9656724815715868, 1e-10);
  EXPECT_NEAR(ssim(moon, cam), 0.2860733908520875, 1e-10);
}

TEST(Ssim, MatchesSeparableFormulation) {
  const Image x = testing_support::random_image(20, 17, 3);
  Image y = x;
  for (double& v : y.values()) v = 0.5 * v + 0.1;
  EXPECT_NEAR(ssim(x, y), separable_ssim(x, y), 1e-12);
}

TEST(Ssim, Errors) {
  EXPECT_THROW(ssim(Image(10, 20), Image(10, 20)), TooSmall);
  EXPECT_THROW(ssim(Image(11, 11), Image(11, 12)), DimensionMismatch);
}

TEST(RelL2Error, Values) {
  const Image ref(4, 4, 2.0);
  const Image x(4, 4, 3.0);
  EXPECT_DOUBLE_EQ(rel_l2_error(x, ref), 0.5);
  EXPECT_DOUBLE_EQ(rel_l2_error(ref, ref), 0.0);
  EXPECT_THROW(rel_l2_error(x, Image(4, 4)), ZeroReference);
}

TEST(CenterForDisplay, MovesOriginToCenter) {
  Image k(4, 5);
  k(0, 0) = 1.0;
  k(3, 4) = 0.5;
  const Image c = center_for_display(k);
  EXPECT_EQ(c(2, 2), 1.0);
  EXPECT_EQ(c(1, 1), 0.5);
  EXPECT_DOUBLE_EQ(c.sum(), 1.5);
}
