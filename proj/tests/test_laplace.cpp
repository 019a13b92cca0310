#include <gtest/gtest.h>

#include "maskopt/laplace.hpp"
#include "maskopt/metrics.hpp"
#include "support.hpp"

namespace maskopt {
namespace {

std::vector<double> matvec(const std::vector<std::vector<double>>& a, std::span<const double> x) {
  std::vector<double> y(a.size(), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < x.size(); ++j) y[i] += a[i][j] * x[j];
  return y;
}

TEST(Laplacian, ConstantsAreHarmonic) {
  const GrayImage lap = laplacian_apply(GrayImage(9, 5, 42.0));
  for (double v : lap.values()) EXPECT_EQ(v, 0.0);
}

TEST(Laplacian, MirroredStencilOnRow) {
  const GrayImage lap = laplacian_apply(GrayImage(3, 1, {0, 6, 0}));
  EXPECT_EQ(lap[0], 6.0);
  EXPECT_EQ(lap[1], -12.0);
  EXPECT_EQ(lap[2], 6.0);
}

TEST(Laplacian, MatchesDenseAssembly) {
  const auto a = testing::dense_laplacian(7, 5);
  const GrayImage u = testing::random_image(7, 5, 11);
  const auto dense = matvec(a, u.values());
  const GrayImage lap = laplacian_apply(u);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_NEAR(lap[i], dense[i], 1e-9);
}

TEST(Laplacian, DenseMatrixIsSymmetricWithZeroRowSums) {
  const auto a = testing::dense_laplacian(8, 8);
  for (std::size_t i = 0; i < a.size(); ++i) {
    double row = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      EXPECT_EQ(a[i][j], a[j][i]);
      row += a[i][j];
    }
    EXPECT_EQ(row, 0.0);
  }
}

TEST(Laplacian, NegativeSemidefinite) {
  auto neg = testing::dense_laplacian(6, 5);
  for (std::size_t i = 0; i < neg.size(); ++i) {
    for (auto& v : neg[i]) v = -v;
    neg[i][i] += 1e-6;
  }
  EXPECT_TRUE(testing::cholesky_ok(neg));
  // Shifting the other way must fail: the constant vector is in the kernel.
  for (std::size_t i = 0; i < neg.size(); ++i) neg[i][i] -= 2e-6;
  EXPECT_FALSE(testing::cholesky_ok(neg));
}

TEST(Laplacian, SymmetricInnerProduct) {
  for (std::uint64_t s = 0; s < 10; ++s) {
    const GrayImage u = testing::random_image(8, 8, 3 * s);
    const GrayImage v = testing::random_image(8, 8, 3 * s + 1);
    const GrayImage au = laplacian_apply(u);
    const GrayImage av = laplacian_apply(v);
    double uav = 0.0, auv = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      auv += au[i] * v[i];
      uav += u[i] * av[i];
    }
    EXPECT_NEAR(auv, uav, 1e-10 * std::max(1.0, std::abs(auv)));
  }
}

TEST(Residual, ExactDataFullConfidence) {
  const GrayImage f = testing::random_image(6, 4, 7);
  const GrayImage r = inpainting_residual(f, f, ProbMask(6, 4, 1.0));
  for (double v : r.values()) EXPECT_EQ(v, 0.0);
}

TEST(Residual, ConstantWithoutConfidence) {
  const GrayImage f = testing::random_image(6, 4, 8);
  const GrayImage r = inpainting_residual(GrayImage(6, 4, 13.0), f, ProbMask(6, 4, 0.0));
  for (double v : r.values()) EXPECT_EQ(v, 0.0);
}

TEST(Residual, HarmonicMidpoint) {
  const GrayImage r = inpainting_residual(GrayImage(3, 1, {0, 50, 100}), GrayImage(3, 1, {0, 7, 100}),
                                          ProbMask(3, 1, {1, 0, 1}));
  for (double v : r.values()) EXPECT_EQ(v, 0.0);
}

TEST(Residual, LossIsMeanSquare) {
  const GrayImage f(2, 2, 10.0);
  const GrayImage u(2, 2, 8.0);
  const ProbMask c(2, 2, 1.0);
  const GrayImage r = inpainting_residual(u, f, c);
  for (double v : r.values()) EXPECT_EQ(v, 2.0);
  EXPECT_DOUBLE_EQ(residual_loss(u, f, c), 4.0);
  EXPECT_DOUBLE_EQ(residual_loss(u, f, c), mse(r, GrayImage(2, 2, 0.0)));
}

TEST(Residual, AffineInU) {
  const GrayImage f = testing::random_image(5, 5, 1);
  Rng rng(2);
  std::vector<double> cv(25);
  for (auto& x : cv) x = rng.unit();
  const ProbMask c(5, 5, cv);
  const GrayImage u1 = testing::random_image(5, 5, 3);
  const GrayImage u2 = testing::random_image(5, 5, 4);
  GrayImage sum(5, 5);
  for (std::size_t i = 0; i < 25; ++i) sum[i] = 2.0 * u1[i] - 0.5 * u2[i];
  const GrayImage r0 = inpainting_residual(GrayImage(5, 5, 0.0), f, c);
  const GrayImage r1 = inpainting_residual(u1, f, c);
  const GrayImage r2 = inpainting_residual(u2, f, c);
  const GrayImage rs = inpainting_residual(sum, f, c);
  for (std::size_t i = 0; i < 25; ++i) {
    EXPECT_NEAR(rs[i] - r0[i], 2.0 * (r1[i] - r0[i]) - 0.5 * (r2[i] - r0[i]), 1e-9);
  }
}

TEST(Residual, BinaryMaskReducesToDataOrDiffusionTerm) {
  const GrayImage f = testing::random_image(6, 6, 21);
  const GrayImage u = testing::random_image(6, 6, 22);
  const BinaryMask m = testing::random_mask(6, 6, 0.4, 23);
  const GrayImage r = inpainting_residual(u, f, m);
  const GrayImage lap = laplacian_apply(u);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (m[i]) {
      EXPECT_DOUBLE_EQ(r[i], -(u[i] - f[i]));
    } else {
      EXPECT_DOUBLE_EQ(r[i], lap[i]);
    }
  }
}

TEST(Residual, DimensionMismatch) {
  EXPECT_THROW(inpainting_residual(GrayImage(2, 2), GrayImage(2, 2), ProbMask(1, 4)),
               DimensionError);
  EXPECT_THROW(residual_loss(GrayImage(2, 2), GrayImage(3, 2), ProbMask(2, 2)), DimensionError);
}

}  // namespace
}  // namespace maskopt
