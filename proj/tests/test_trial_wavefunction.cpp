#include <array>
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "donor/trial_wavefunction.hpp"

namespace donor {
namespace {

Eigen::Vector3d random_point(std::mt19937_64& gen, double centre_x, double spread) {
  std::normal_distribution<double> n(0.0, spread);
  return {centre_x + n(gen), n(gen), n(gen)};
}

/// Direct transcription of the symmetrized Chandrasekhar form, used as an
/// independent oracle for evaluate().
double chandrasekhar(TrialKind kind, const VariationalParams& p, double R, const ElectronPair& e) {
  const Eigen::Vector3d L(0, 0, 0), Rv(R, 0, 0);
  Eigen::Vector3d A = L, B = L;
  if (kind == TrialKind::kLR) B = Rv;
  if (kind == TrialKind::kRR) A = B = Rv;
  const double term1 = std::exp(-p.alpha * (e.r1 - A).norm() - p.beta * (e.r2 - B).norm());
  const double term2 = std::exp(-p.beta * (e.r1 - B).norm() - p.alpha * (e.r2 - A).norm());
  return (term1 + term2) * (1.0 + p.lambda * (e.r1 - e.r2).norm());
}

double fd_local_energy(const TrialWavefunction& wf, const ElectronPair& e, double field, double h) {
  const double psi = wf.evaluate(e);
  double lap = 0.0;
  for (int electron = 0; electron < 2; ++electron) {
    for (int d = 0; d < 3; ++d) {
      ElectronPair plus = e, minus = e;
      (electron == 0 ? plus.r1 : plus.r2)(d) += h;
      (electron == 0 ? minus.r1 : minus.r2)(d) -= h;
      lap += (wf.evaluate(plus) - 2.0 * psi + wf.evaluate(minus)) / (h * h);
    }
  }
  return -lap / psi + two_donor_potential(e, wf.separation()) + field * (e.r1.x() + e.r2.x());
}

bool clear_of_cusps(const ElectronPair& e, double R, double margin) {
  for (const auto* r : {&e.r1, &e.r2}) {
    if (r->norm() < margin || (*r - Eigen::Vector3d(R, 0, 0)).norm() < margin) return false;
  }
  return (e.r1 - e.r2).norm() > margin;
}

TEST(TrialWavefunction, LRAtDonorCentres) {
  const double R = 10.0;
  const TrialWavefunction wf(TrialKind::kLR, {1.0, 1.0, 0.0}, R);
  const ElectronPair e{Eigen::Vector3d::Zero(), Eigen::Vector3d(R, 0, 0)};
  // Direct term is exactly 1; the exchanged term puts each electron a distance R
  // from its orbital centre.
  EXPECT_NEAR(wf.evaluate(e), 1.0 + std::exp(-2.0 * R), 1e-15);
  // With the electrons swapped only the exchanged term is unity.
  EXPECT_NEAR(wf.evaluate({e.r2, e.r1}), 1.0 + std::exp(-2.0 * R), 1e-15);
}

TEST(TrialWavefunction, LLWithEqualExponentsDegenerates) {
  const TrialWavefunction wf(TrialKind::kLL, {0.9, 0.9, 0.0}, 10.0);
  std::mt19937_64 gen(1);
  for (int k = 0; k < 20; ++k) {
    const ElectronPair e{random_point(gen, 0.0, 1.0), random_point(gen, 0.0, 1.0)};
    EXPECT_NEAR(wf.evaluate(e), 2.0 * std::exp(-0.9 * (e.r1.norm() + e.r2.norm())), 1e-14);
  }
}

TEST(TrialWavefunction, MatchesIndependentTranscription) {
  const VariationalParams p{1.068, 0.484, 0.303};
  std::mt19937_64 gen(2);
  for (TrialKind kind : {TrialKind::kLL, TrialKind::kLR, TrialKind::kRR}) {
    VariationalParams q = p;
    if (kind == TrialKind::kLR) q = {0.99, 1.01, 0.0};
    const TrialWavefunction wf(kind, q, 10.0);
    for (int k = 0; k < 50; ++k) {
      const ElectronPair e{random_point(gen, 5.0, 4.0), random_point(gen, 5.0, 4.0)};
      const double ref = chandrasekhar(kind, q, 10.0, e);
      EXPECT_NEAR(wf.evaluate(e), ref, 1e-13 * std::abs(ref));
    }
  }
}

TEST(TrialWavefunction, ExchangeSymmetric) {
  std::mt19937_64 gen(3);
  for (TrialKind kind : {TrialKind::kLL, TrialKind::kLR, TrialKind::kRR}) {
    const TrialWavefunction wf(kind, {1.1, 0.5, kind == TrialKind::kLR ? 0.0 : 0.3}, 8.0);
    for (int k = 0; k < 100; ++k) {
      const ElectronPair e{random_point(gen, 4.0, 3.0), random_point(gen, 4.0, 3.0)};
      const double a = wf.evaluate(e), b = wf.evaluate({e.r2, e.r1});
      EXPECT_NEAR(a, b, 1e-12 * std::abs(a));
    }
  }
}

TEST(TrialWavefunction, HydrogenicLocalEnergyIsMinusOne) {
  const std::array<SlaterOrbital, 1> orbital{SlaterOrbital{0.0, 1.0}};
  const std::array<double, 1> coeff{1.0};
  const std::array<double, 1> donors{0.0};
  std::mt19937_64 gen(4);
  for (int k = 0; k < 1000; ++k) {
    const Eigen::Vector3d r = random_point(gen, 0.0, 2.0);
    EXPECT_NEAR(one_electron_local_energy(orbital, coeff, donors, r, 0.0), -1.0, 1e-8);
  }
}

TEST(TrialWavefunction, MirrorSymmetryAtZeroField) {
  const double R = 9.0;
  const TrialWavefunction ll(TrialKind::kLL, {1.05, 0.47, 0.29}, R);
  const TrialWavefunction rr = ll.mirrored();
  EXPECT_EQ(rr.kind(), TrialKind::kRR);
  std::mt19937_64 gen(5);
  const auto reflect = [R](const Eigen::Vector3d& r) { return Eigen::Vector3d(R - r.x(), r.y(), r.z()); };
  for (int k = 0; k < 100; ++k) {
    const ElectronPair e{random_point(gen, 1.0, 2.0), random_point(gen, 1.0, 2.0)};
    const ElectronPair m{reflect(e.r1), reflect(e.r2)};
    const double a = ll.local_energy(e, 0.0), b = rr.local_energy(m, 0.0);
    EXPECT_NEAR(a, b, 1e-10 * std::max(1.0, std::abs(a)));
  }
}

TEST(TrialWavefunction, LocalEnergyMatchesFiniteDifferences) {
  std::mt19937_64 gen(6);
  const double R = 6.0;
  for (TrialKind kind : {TrialKind::kLL, TrialKind::kLR, TrialKind::kRR}) {
    const TrialWavefunction wf(kind, {1.07, 0.48, kind == TrialKind::kLR ? 0.0 : 0.31}, R);
    int tested = 0;
    while (tested < 100) {
      const ElectronPair e{random_point(gen, 3.0, 3.0), random_point(gen, 3.0, 3.0)};
      if (!clear_of_cusps(e, R, 0.1)) continue;
      const double exact = wf.local_energy(e, 0.01);
      const double fd = fd_local_energy(wf, e, 0.01, 1e-3);
      EXPECT_NEAR(exact, fd, 1e-5 * std::max(1.0, std::abs(exact)));
      ++tested;
    }
  }
}

TEST(TrialWavefunction, IsolatedDonorPotential) {
  const ElectronPair e{Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0, 2, 0)};
  const double r12 = std::sqrt(5.0);
  EXPECT_NEAR(two_donor_potential(e, kIsolatedSeparation), -2.0 - 1.0 + 2.0 / r12, 1e-15);
}

TEST(TrialWavefunction, RejectsInvalidParameters) {
  EXPECT_THROW(TrialWavefunction(TrialKind::kLL, {0.0, 1.0, 0.0}, 10.0), std::invalid_argument);
  EXPECT_THROW(TrialWavefunction(TrialKind::kLL, {1.0, -1.0, 0.0}, 10.0), std::invalid_argument);
  EXPECT_THROW(TrialWavefunction(TrialKind::kLL, {1.0, 1.0, -0.1}, 10.0), std::invalid_argument);
  EXPECT_THROW(TrialWavefunction(TrialKind::kLR, {1.0, 1.0, 0.2}, 10.0), std::invalid_argument);
  EXPECT_THROW(TrialWavefunction(TrialKind::kLL, {1.0, 1.0, 0.0}, 0.0), std::invalid_argument);
  EXPECT_THROW(TrialWavefunction(TrialKind::kRR, {1.0, 1.0, 0.0}, kIsolatedSeparation), std::invalid_argument);
  EXPECT_NO_THROW(TrialWavefunction(TrialKind::kLL, {1.0, 1.0, 0.0}, kIsolatedSeparation));
}

TEST(TrialWavefunction, LocalEnergyRejectsSingularity) {
  const TrialWavefunction wf(TrialKind::kLL, {1.0, 0.5, 0.3}, 10.0);
  EXPECT_THROW((void)wf.local_energy({Eigen::Vector3d::Zero(), Eigen::Vector3d(1, 0, 0)}, 0.0), std::domain_error);
  const Eigen::Vector3d p(1, 1, 1);
  EXPECT_THROW((void)wf.local_energy({p, p}, 0.0), std::domain_error);
}

TEST(TrialWavefunction, KindNamesRoundTrip) {
  for (TrialKind kind : {TrialKind::kLL, TrialKind::kLR, TrialKind::kRR}) {
    EXPECT_EQ(parse_trial_kind(to_string(kind)), kind);
  }
  EXPECT_THROW((void)parse_trial_kind("LX"), std::invalid_argument);
}

}  // namespace
}  // namespace donor
