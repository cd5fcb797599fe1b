#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "donor/dynamics.hpp"

namespace donor {
namespace {

const UnitSystem kUnits{};

/// LL-LR two-level core with a decoupled RR; x = diag(0, R, 2R).
ChargeHamiltonian two_level(double R, double d, double t) {
  ChargeHamiltonian h;
  h.h0 << -2.0 + d, t, 0.0, t, -2.0, 0.0, 0.0, 0.0, -2.0 + d;
  h.x = Eigen::Vector3d(0.0, R, 2.0 * R).asDiagonal();
  return h;
}

class DriveModel : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    ModelBudget b;
    b.mc_samples = 200'000;
    b.optimizer.samples = 60'000;
    b.optimizer.eval_samples = 100'000;
    model_ = new DonorPairModel(build_donor_pair_model(15.0, b));
  }
  static void TearDownTestSuite() { delete model_; }
  static const ChargeHamiltonian& h() { return model_->hamiltonian; }
  static DonorPairModel* model_;
};
DonorPairModel* DriveModel::model_ = nullptr;

/// Drive time from switch-on to the P_LR minimum.
double time_of_minimum(const TransferResult& r, const TransferOptions& o) { return r.switch_off_ps - o.t_on_ps; }

TEST_F(DriveModel, StationaryStateWithoutDrive) {
  const SpectrumPoint p = spectrum_at(h(), 0.001);
  for (int k = 0; k < 3; ++k) {
    const StateVector c0 = p.vectors.col(k).cast<std::complex<double>>();
    const Trajectory tr = evolve(h(), [](double) { return 0.001; }, c0, 0.0, 200.0, 0.01, kUnits, 50);
    for (const Eigen::Vector3d& pop : tr.populations) {
      EXPECT_LT((pop - tr.populations.front()).cwiseAbs().maxCoeff(), 1e-8);
    }
    EXPECT_LT(tr.max_norm_drift(), 1e-8);
  }
}

TEST_F(DriveModel, DrivenTrajectoryConservesNormAndReverses) {
  const double F0 = 0.001, F1 = 0.002;
  const SpectrumPoint p = spectrum_at(h(), F0);
  const double omega = p.gap / kUnits.hbar_Ry_ps();
  const FieldProfile drive{F0, F1, omega, 5.0, 120.0, RampShape::kRectangular, 0.0};
  const double dt = 2.0 * std::numbers::pi / omega / 40.0;
  const StateVector c0 = p.vectors.col(0).cast<std::complex<double>>();
  const Trajectory fwd = evolve(h(), drive, c0, 0.0, 150.0, dt, kUnits, 20);
  EXPECT_LT(fwd.max_norm_drift(), 1e-8);
  for (const Eigen::Vector3d& pop : fwd.populations) EXPECT_NEAR(pop.sum(), 1.0, 1e-8);
  const Trajectory back = evolve(h(), drive, fwd.final_state, 150.0, 0.0, dt, kUnits, 20);
  EXPECT_LT((back.final_state - c0).norm(), 1e-6);
  // The drive actually did something in between.
  EXPECT_GT(fwd.populations.back()(kIndexLL), 0.1);
}

TEST_F(DriveModel, ResonantTransferAgreesWithTwoLevelEstimate) {
  const TransferOptions o;
  const TransferResult r = resonant_transfer(h(), 0.001, 0.002, kUnits, o);
  ASSERT_TRUE(r.complete);
  EXPECT_LT(r.min_p_lr, 0.01);
  EXPECT_LE(r.rabi_time_ps, time_of_minimum(r, o));
  EXPECT_NEAR(time_of_minimum(r, o), r.analytic_rabi_ps, 0.1 * r.analytic_rabi_ps);
  EXPECT_LT(r.hold_drift, 1e-3);
  EXPECT_LT(r.trajectory.max_norm_drift(), 1e-8);
}

TEST_F(DriveModel, RabiTimeScalesInverselyWithAmplitude) {
  const TransferOptions o;
  const TransferResult base = resonant_transfer(h(), 0.001, 0.001, kUnits, o);
  ASSERT_TRUE(base.complete);
  for (double F1 : {0.002, 0.004}) {
    const TransferResult r = resonant_transfer(h(), 0.001, F1, kUnits, o);
    ASSERT_TRUE(r.complete);
    const double expected = time_of_minimum(base, o) * 0.001 / F1;
    EXPECT_NEAR(time_of_minimum(r, o), expected, 0.05 * expected) << "F1=" << F1;
  }
  // The two-level estimate is exactly inverse in F1.
  EXPECT_DOUBLE_EQ(extract_rabi_time(h(), 0.001, 0.001, kUnits), 2.0 * extract_rabi_time(h(), 0.001, 0.002, kUnits));
}

TEST_F(DriveModel, DetunedDriveBarelyTransfers) {
  const double F0 = 0.001, F1 = 0.002;
  const double hbar = kUnits.hbar_Ry_ps();
  const double rabi_rate = F1 * transition_dipole(h(), F0) / hbar;  // rad/ps
  TransferOptions o;
  o.omega = spectrum_at(h(), F0).gap / hbar + 10.0 * rabi_rate;
  o.max_rabi_multiple = 4.0;
  const TransferResult r = resonant_transfer(h(), F0, F1, kUnits, o);
  EXPECT_FALSE(r.complete);
  // Two-level bound Omega^2 / (Omega^2 + delta^2) = 1/101.
  EXPECT_LT(r.max_p_ll, 0.05);
}

TEST_F(DriveModel, EigenbasisPopulationsAreConstantsWithDriveOff) {
  const double F0 = 0.02;
  const SpectrumPoint p = spectrum_at(h(), F0);
  StateVector c0 = (p.vectors.col(0) * 0.6 + p.vectors.col(1) * 0.8).cast<std::complex<double>>();
  const Trajectory tr = evolve(h(), [F0](double) { return F0; }, c0, 0.0, 100.0, 0.01, kUnits, 1000);
  const Eigen::Matrix3cd V = p.vectors.cast<std::complex<double>>();
  const Eigen::Vector3d start = (V.adjoint() * c0).cwiseAbs2();
  const Eigen::Vector3d end = (V.adjoint() * tr.final_state).cwiseAbs2();
  EXPECT_LT((end - start).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Dynamics, LandauZenerSweepMatchesFormula) {
  const double R = 10.0, d = 0.1, coupling = 0.001;
  const ChargeHamiltonian h = two_level(R, d, coupling);
  const double hbar = kUnits.hbar_Ry_ps();
  for (double adiabaticity : {0.3, 1.0, 2.0}) {
    // Diabatic gap changes at R dF/dt; P_diabatic = exp(-2 pi t^2 / (hbar R dF/dt)).
    const double rate = 2.0 * std::numbers::pi * coupling * coupling / (hbar * R * adiabaticity);
    const double F_end = 2.0 * d / R;
    const RampResult r = sweep_dc_field(h, 0.0, F_end, F_end / rate, 0.01, kUnits);
    const double expected = 1.0 - std::exp(-adiabaticity);
    EXPECT_NEAR(r.ground_population, expected, 0.01) << "adiabaticity=" << adiabaticity;
    EXPECT_LT(r.trajectory.max_norm_drift(), 1e-8);
  }
}

TEST(Dynamics, SlowRampTracksGroundState) {
  const ChargeHamiltonian h = two_level(10.0, 0.1, 0.005);
  const RampResult r = sweep_dc_field(h, 0.0, 0.02, 2000.0, 0.02, kUnits);
  EXPECT_GT(r.ground_population, 0.99);
  EXPECT_GT(r.ll_population, 0.99);
}

TEST(Dynamics, ProfileValidationAndResolution) {
  const ChargeHamiltonian h = two_level(10.0, 0.1, 0.005);
  const StateVector c0(1.0, 0.0, 0.0);
  FieldProfile drive{0.0, 0.001, 10.0, 0.0, 10.0, RampShape::kRectangular, 0.0};
  const double bound = 2.0 * std::numbers::pi / (20.0 * drive.omega);
  EXPECT_THROW((void)evolve(h, drive, c0, 0.0, 1.0, 1.01 * bound, kUnits), std::invalid_argument);
  EXPECT_NO_THROW((void)evolve(h, drive, c0, 0.0, 1.0, bound, kUnits));
  FieldProfile bad = drive;
  bad.F1 = -1.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = drive;
  bad.t_off = bad.t_on;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = drive;
  bad.omega = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  bad = drive;
  bad.ramp = RampShape::kLinear;
  bad.ramp_ps = 6.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
  EXPECT_THROW((void)evolve(h, [](double) { return 0.0; }, StateVector(2.0, 0.0, 0.0), 0.0, 1.0, 0.1, kUnits),
               std::invalid_argument);
}

TEST(Dynamics, ProfileShape) {
  FieldProfile p{0.001, 0.002, 2.0, 10.0, 20.0, RampShape::kLinear, 2.0};
  EXPECT_EQ(p.at(5.0), 0.001);
  EXPECT_EQ(p.at(25.0), 0.001);
  EXPECT_DOUBLE_EQ(p.envelope(11.0), 0.5);
  EXPECT_DOUBLE_EQ(p.envelope(15.0), 1.0);
  EXPECT_DOUBLE_EQ(p.envelope(19.5), 0.25);
  EXPECT_DOUBLE_EQ(p.at(15.0), 0.001 + 0.002 * std::sin(2.0 * 5.0));
}

TEST(Dynamics, DipoleForbiddenTransitionIsRejected) {
  ChargeHamiltonian h;
  h.h0 = Eigen::Vector3d(-2.0, -1.5, -1.0).asDiagonal();
  h.x = Eigen::Vector3d(1.0, 2.0, 3.0).asDiagonal();
  EXPECT_THROW((void)extract_rabi_time(h, 0.0, 0.001, kUnits), NumericalError);
}

}  // namespace
}  // namespace donor
