#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "donor/sampling.hpp"

namespace donor {
namespace {

TEST(Sampling, DerivedSeedsAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 0; s < 4; ++s) {
    for (std::uint64_t k = 0; k < 256; ++k) seen.insert(derive_seed(s, k));
  }
  EXPECT_EQ(seen.size(), 4u * 256u);
}

TEST(Sampling, UniformIsOpenUnitInterval) {
  Rng rng(7);
  double sum = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const double u = rng.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / 100000.0, 0.5, 0.005);
}

TEST(Sampling, SameSeedSameStream) {
  Rng a(42), b(42);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.uniform(), b.uniform());
}

TEST(Sampling, RadialMomentsMatchGammaLaw) {
  // |r| ~ Gamma(3, 1/(2s)): mean 3/(2s), variance 3/(4s^2).
  const double s = 0.8;
  const DonorCloudDensity density({0.0}, s);
  Rng rng(3);
  const int n = 200000;
  double m1 = 0.0, m2 = 0.0;
  for (int k = 0; k < n; ++k) {
    const double r = density.sample(rng).norm();
    m1 += r;
    m2 += r * r;
  }
  m1 /= n;
  m2 /= n;
  EXPECT_NEAR(m1, 1.5 / s, 0.01 * 1.5 / s);
  EXPECT_NEAR(m2 - m1 * m1, 0.75 / (s * s), 0.02 * 0.75 / (s * s));
}

TEST(Sampling, DensityIsNormalized) {
  // Radial integral of (s^3/pi) e^{-2 s r} 4 pi r^2 on a fine trapezoid grid.
  const double s = 1.3;
  const DonorCloudDensity density({0.0}, s);
  double sum = 0.0;
  const double h = 1e-3;
  for (int k = 1; k < 40000; ++k) {
    const double r = k * h;
    sum += density.density(Eigen::Vector3d(r, 0, 0)) * 4.0 * M_PI * r * r * h;
  }
  EXPECT_NEAR(sum, 1.0, 1e-6);
}

TEST(Sampling, TwoCentreMixtureSplitsEvenly) {
  const DonorCloudDensity density({0.0, 20.0}, 1.0);
  Rng rng(11);
  int right = 0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) right += density.sample(rng).x() > 10.0 ? 1 : 0;
  EXPECT_NEAR(static_cast<double>(right) / n, 0.5, 0.01);
  // Far from both centres the mixture weights are equal.
  EXPECT_NEAR(density.density(Eigen::Vector3d(10.0, 0.0, 0.0)),
              2.0 * 0.5 / M_PI * std::exp(-20.0), 1e-20);
}

}  // namespace
}  // namespace donor
