#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "donor/matrix_elements.hpp"
#include "donor/spectrum.hpp"
#include "donor/units.hpp"

namespace donor {

enum class RampShape { kRectangular, kLinear };

/// F(t) = F0 + F1 g(t) sin(omega (t - t_on)) with envelope g = 1 on
/// [t_on, t_off] (linear edges of `ramp_ps` when ramped).
struct FieldProfile {
  double F0 = 0.0;     // Ry/aB
  double F1 = 0.0;     // Ry/aB
  double omega = 0.0;  // rad/ps
  double t_on = 0.0;   // ps
  double t_off = 1.0;  // ps
  RampShape ramp = RampShape::kRectangular;
  double ramp_ps = 0.0;

  void validate() const;
  [[nodiscard]] double envelope(double t) const;
  [[nodiscard]] double at(double t) const;
};

using StateVector = Eigen::Vector3cd;

/// Populations are |c_i|^2 in the orthonormal frame, basis order LL, LR, RR.
struct Trajectory {
  std::vector<double> times;  // ps
  std::vector<Eigen::Vector3d> populations;
  std::vector<double> norm;
  StateVector final_state = StateVector::Zero();

  [[nodiscard]] double max_norm_drift() const;
};

/// Exponential-midpoint propagation of i hbar dc/dt = H(F(t)) c from t0 to t1
/// (t1 < t0 runs backwards) with fixed step |dt|; every step is an exact
/// unitary. Records every `stride`-th step plus both end points.
[[nodiscard]] Trajectory evolve(const ChargeHamiltonian& h, const std::function<double(double)>& field,
                                const StateVector& c0, double t0, double t1, double dt, const UnitSystem& units,
                                int stride = 1);

/// As above with a drive profile; rejects dt coarser than 2 pi / (20 omega).
[[nodiscard]] Trajectory evolve(const ChargeHamiltonian& h, const FieldProfile& profile, const StateVector& c0,
                                double t0, double t1, double dt, const UnitSystem& units, int stride = 1);

/// Transition dipole between the two lowest dressed eigenstates at F0 (aB).
[[nodiscard]] double transition_dipole(const ChargeHamiltonian& h, double F0);

/// Two-level estimate pi hbar / (F1 |X_eff|) in ps. Throws NumericalError
/// when the dipole is below 1e-12 aB.
[[nodiscard]] double extract_rabi_time(const ChargeHamiltonian& h, double F0, double F1, const UnitSystem& units);

struct TransferOptions {
  double t_on_ps = 20.0;
  double hold_ps = 20.0;
  double completion_threshold = 0.01;  // P_LR below this counts as transferred
  double steps_per_period = 40.0;
  double max_rabi_multiple = 20.0;      // give up after this many analytic Rabi times
  std::optional<double> omega;          // rad/ps; defaults to the dressed gap / hbar
  int stride = 10;
};

struct TransferResult {
  Trajectory trajectory;
  double omega = 0.0;           // rad/ps, drive frequency used
  double gap = 0.0;             // Ry
  double rabi_time_ps = 0.0;    // drive duration until P_LR first drops below the threshold
  double analytic_rabi_ps = 0.0;
  double switch_off_ps = 0.0;   // absolute time the drive was removed (P_LR minimum)
  double min_p_lr = 1.0;
  double max_p_ll = 0.0;
  double hold_drift = 0.0;      // max population change during the hold
  bool complete = false;
};

[[nodiscard]] TransferResult resonant_transfer(const ChargeHamiltonian& h, double F0, double F1,
                                               const UnitSystem& units, const TransferOptions& options = {});

/// Linear DC ramp from F_start to F_end starting in the ground state; returns
/// the final ground-state population.
struct RampResult {
  double ground_population = 0.0;
  double ll_population = 0.0;
  Trajectory trajectory;
};

[[nodiscard]] RampResult sweep_dc_field(const ChargeHamiltonian& h, double F_start, double F_end, double duration_ps,
                                        double dt, const UnitSystem& units);

}  // namespace donor
