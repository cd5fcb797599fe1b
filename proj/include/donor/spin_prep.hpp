#pragma once

#include <complex>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "donor/units.hpp"

namespace donor {

inline constexpr int kSpinDim = 16;
using SpinMatrix = Eigen::Matrix<double, kSpinDim, kSpinDim>;
using DensityMatrix = Eigen::Matrix<std::complex<double>, kSpinDim, kSpinDim>;
using SpinVector = Eigen::Matrix<std::complex<double>, kSpinDim, 1>;

/// Basis index e1 e2 n1 n2 as bits (e1 most significant); bit 0 = up, 1 = down.
[[nodiscard]] constexpr int spin_index(int e1, int e2, int n1, int n2) { return (e1 << 3) | (e2 << 2) | (n1 << 1) | n2; }

struct SpinParams {
  double B_T = 2.0;
  double g_e = 2.0;
  double mu_B = 5.7884e-2;        // meV/T
  double g_n_mu_n = 1.7426e-6;    // meV/T
  double A_meV = 1.2e-4;          // hyperfine, couples sigma_e . sigma_n
  void validate() const;
  [[nodiscard]] double electron_zeeman() const { return g_e * mu_B * B_T; }  // single-electron flip gap
};

/// H = g_e mu_B B (S1z + S2z) - g_n mu_n B (I1z + I2z)
///     + A (sigma_e1 . sigma_n1 + sigma_e2 . sigma_n2) + J sigma_e1 . sigma_e2
/// with S = sigma / 2, in meV.
[[nodiscard]] SpinMatrix build_spin_hamiltonian(double J_meV, const SpinParams& p);

struct JcResult {
  double J_c = 0.0;      // meV
  double min_gap = 0.0;  // meV
  bool in_range = false;
};

/// Anti-crossing of |dd>|a_n> with |a_e>|dd> (exchange-odd block of the
/// one-up sector), located by a scan of [0, J_max] and golden-section search.
[[nodiscard]] JcResult find_jc(const SpinParams& p, double J_max = 0.5);

struct SweepSpec {
  double J_start = 0.054;  // meV
  double J_end = 0.063;
  double duration_us = 12.0;
  int steps = 16000;
  void validate() const;
};

struct DephasingRates {
  double t_e_s = 0.0;  // 0 disables electron dephasing
  double t_n_s = 0.0;  // 0 disables nuclear dephasing
  void validate() const;
};

/// Readout-preparation inputs and their mapped targets. `k10`/`k01` use the
/// exchange-even/odd nuclear pairs (s_n, a_n) as inputs.
enum class PreparationInput { k11, k10, k01, k00 };
inline constexpr PreparationInput kAllInputs[] = {PreparationInput::k11, PreparationInput::k10,
                                                  PreparationInput::k01, PreparationInput::k00};
[[nodiscard]] std::string_view to_string(PreparationInput input);
[[nodiscard]] PreparationInput parse_preparation_input(std::string_view text);

[[nodiscard]] SpinVector preparation_initial(PreparationInput input);
[[nodiscard]] SpinVector preparation_target(PreparationInput input);
[[nodiscard]] DensityMatrix pure_state(const SpinVector& psi);

/// Precomputed step unitaries for one sweep; simulations with different
/// inputs and dephasing rates reuse them.
class PreparationPropagator {
 public:
  PreparationPropagator(const SweepSpec& sweep, const SpinParams& params, const UnitSystem& units = {});

  struct Result {
    DensityMatrix final_state;
    double fidelity = 0.0;
    double max_trace_drift = 0.0;
    double max_hermiticity_error = 0.0;
    double min_eigenvalue = 0.0;
    double purity_initial = 1.0;
    double purity_final = 1.0;
  };

  /// Strang splitting: exact dephasing half-steps around an exact unitary
  /// step at the midpoint exchange. Diagnostics are sampled every
  /// `check_stride` steps and at the end.
  [[nodiscard]] Result run(const DensityMatrix& rho0, const SpinVector& target, const DephasingRates& rates,
                           int check_stride = 100) const;

  [[nodiscard]] const SweepSpec& sweep() const { return sweep_; }

 private:
  SweepSpec sweep_;
  double dt_s_;
  std::vector<Eigen::Matrix<std::complex<double>, kSpinDim, kSpinDim>> unitaries_;
};

struct PreparationResult {
  double fidelity = 0.0;
  double fidelity_half_step = 0.0;  // same sweep at twice the step count
  PreparationPropagator::Result detail;
};

/// Runs the sweep at `sweep.steps` and at twice that; throws NumericalError
/// if the two fidelities differ by 1e-4 or more, or trace drifts above 1e-6
/// after one automatic refinement.
[[nodiscard]] PreparationResult simulate_preparation(PreparationInput input, const SweepSpec& sweep,
                                                     const DephasingRates& rates, const SpinParams& params,
                                                     const UnitSystem& units = {});

enum class RabiConvention { kRotating, kLinear };
[[nodiscard]] std::string_view to_string(RabiConvention c);
[[nodiscard]] RabiConvention parse_rabi_convention(std::string_view text);

struct EsrResult {
  double t_flip_us = 0.0;
  double max_selective_Bac_T = 0.0;
  double rabi_energy_meV = 0.0;  // hbar Omega
};

/// pi-pulse time for hbar Omega = g mu_B B_ac (rotating) or half that
/// (linear); selectivity keeps hbar Omega below 4A / ratio.
[[nodiscard]] EsrResult esr_flip_time(double B_ac_T, const SpinParams& p, const UnitSystem& units = {},
                                      RabiConvention convention = RabiConvention::kRotating,
                                      double selectivity_ratio = 10.0);

struct ZeemanBookkeeping {
  double electron_flip_gap = 0.0;       // g mu_B B
  double half_quantum = 0.0;            // g mu_B B / 2
  double hyperfine_split = 0.0;         // E_Z(n up) - E_Z(n down) from the spectrum
  double hyperfine_split_formula = 0.0; // 4A
};

[[nodiscard]] ZeemanBookkeeping zeeman_bookkeeping(const SpinParams& p);

}  // namespace donor
