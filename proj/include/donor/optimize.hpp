#pragma once

#include <cstdint>

#include "donor/matrix_elements.hpp"
#include "donor/trial_wavefunction.hpp"

namespace donor {

struct OptimizerSettings {
  std::uint64_t samples = 200'000;       // correlated sample set used by the simplex search
  std::uint64_t eval_samples = 400'000;  // fresh samples for the reported energy
  int max_iterations = 400;              // per restart
  double size_tolerance = 2e-4;          // simplex size in log-parameter space
  bool freeze_lambda = false;
  std::uint64_t seed = 1;
};

struct OptimizationResult {
  TrialKind kind = TrialKind::kLL;
  VariationalParams params;
  double R = 0.0;
  double field = 0.0;
  double energy = 0.0;  // Ry, from an independent sample set
  double std_error = 0.0;
  double variance = 0.0;  // local-energy variance on the correlated set
  bool converged = false;
  int iterations = 0;
};

/// Minimizes the Monte-Carlo estimate of <H> over (alpha, beta, lambda) with a
/// derivative-free simplex started from three fixed points. LR optimizes
/// (alpha, beta) only. Non-convergence is flagged, not thrown.
[[nodiscard]] OptimizationResult optimize_parameters(TrialKind kind, double R, double field,
                                                     const OptimizerSettings& settings);

/// Energy estimate <H + F (x1 + x2)> with standard error for a fixed state.
struct EnergyEstimate {
  double energy = 0.0;
  double std_error = 0.0;
};

[[nodiscard]] EnergyEstimate estimate_energy(const TrialWavefunction& wf, double field, std::uint64_t samples,
                                             std::uint64_t seed);

/// One-electron D+D0 state exp(-a r_L) + c exp(-a r_R) in the two-donor field.
/// For each exponent the mixing coefficient is exact (2x2 generalized
/// eigenproblem); the exponent is optimized by golden-section search.
struct LcaoResult {
  double alpha = 1.0;
  double right_coefficient = 0.0;
  double energy = 0.0;  // Ry, includes the donor-donor repulsion 2/R
  double std_error = 0.0;
  bool converged = false;
};

[[nodiscard]] LcaoResult optimize_lcao(double R, double field, const OptimizerSettings& settings);

}  // namespace donor
