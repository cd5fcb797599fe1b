#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "donor/matrix_elements.hpp"
#include "donor/optimize.hpp"
#include "donor/parameter_cache.hpp"
#include "donor/units.hpp"

namespace donor {

/// Sample budgets and numerical choices shared by every charge-sector model.
struct ModelBudget {
  std::uint64_t mc_samples = 1'000'000;
  std::uint64_t seed = 1;
  OptimizerSettings optimizer{};
  McOptions mc{};
  BasisTreatment treatment = BasisTreatment::kOrthogonal;
};

/// Variational states at F0 = 0, their matrix elements, and the resulting
/// field-dependent charge Hamiltonian for one donor separation.
struct DonorPairModel {
  double R = 0.0;
  OptimizationResult ll;  // RR is the mirror image of LL
  OptimizationResult lr;
  MatrixElementSet me;
  ChargeHamiltonian hamiltonian;
};

[[nodiscard]] DonorPairModel build_donor_pair_model(double R, const ModelBudget& budget,
                                                    ParameterCache* cache = nullptr);

/// Model from externally supplied matrix elements (no optimization).
[[nodiscard]] DonorPairModel model_from_elements(const MatrixElementSet& me, BasisTreatment treatment);

struct SpectrumPoint {
  double field = 0.0;                        // Ry/aB
  Eigen::Vector3d energies = Eigen::Vector3d::Zero();  // Ry, ascending
  Eigen::Matrix3d vectors = Eigen::Matrix3d::Identity();  // orthonormal-frame columns
  double ground_ll_weight = 0.0;
  double gap = 0.0;  // E2 - E1, Ry
};

[[nodiscard]] SpectrumPoint spectrum_at(const ChargeHamiltonian& h, double field);

struct SpectrumCurve {
  double R = 0.0;
  std::vector<SpectrumPoint> points;
};

/// `fields` must be ascending and non-negative.
[[nodiscard]] SpectrumCurve levels_vs_field(const DonorPairModel& model, std::span<const double> fields);

struct CrossingResult {
  double field = 0.0;     // Ry/aB
  double min_gap = 0.0;   // Ry
  bool in_range = false;  // false when the gap minimum sits on the scan boundary
};

inline constexpr double kCrossingScanStep = 0.002;
inline constexpr double kCrossingTolerance = 1e-4;
inline constexpr double kAdiabaticWeight = 0.99;

/// Avoided-crossing field: coarse scan of E2 - E1 on [0, max_field], then
/// golden-section refinement of the interior minimum.
[[nodiscard]] CrossingResult find_crossing(const ChargeHamiltonian& h, double max_field = 0.5);

struct AdiabaticResult {
  double field = 0.0;
  bool in_range = false;
};

/// Smallest field above the crossing at which the ground state carries
/// LL weight above `threshold`.
[[nodiscard]] AdiabaticResult find_adiabatic_field(const ChargeHamiltonian& h, double crossing_field,
                                                   double threshold = kAdiabaticWeight, double max_field = 1.0);

/// Single-donor 1s-2p reference lines (meV).
struct SingleDonorLevels {
  double transition_1s_2p0 = 34.1;
  double transition_1s_2ppm = 39.2;
  void validate() const;
};

enum class BandFlag { kBelow2p0, kBetween, kAbove2ppm };
[[nodiscard]] std::string_view to_string(BandFlag flag);
[[nodiscard]] BandFlag classify_gap(double gap_meV, const SingleDonorLevels& levels);

struct GapPoint {
  double field = 0.0;
  double gap_meV = 0.0;
  BandFlag band = BandFlag::kBelow2p0;
};

[[nodiscard]] std::vector<GapPoint> transition_gap_curve(const ChargeHamiltonian& h, std::span<const double> fields,
                                                         const SingleDonorLevels& levels, const UnitSystem& units);

/// Index of the eigenstate with the largest LL weight at `field`.
[[nodiscard]] int ll_dominated_level(const SpectrumPoint& point);

struct BindingResult {
  double binding = 0.0;  // Ry; <= 0 means unbound
  double d_plus_d0 = 0.0;
  double d_plus_d_minus = 0.0;
  bool bound = false;
};

/// E(D+D0) from the one-electron LCAO state minus the energy of the
/// LL-dominated charge eigenstate, both at the same field.
[[nodiscard]] BindingResult single_electron_binding(const DonorPairModel& model, double field,
                                                    const OptimizerSettings& lcao_settings);

/// D- ionization energy E(D0) - E(D-) of an optimized isolated D- state.
[[nodiscard]] double isolated_binding(const OptimizationResult& isolated_ll);

/// Least-squares fit gap(R) = c0 + c1 / R evaluated at `target_R`.
struct GapExtrapolation {
  double c0 = 0.0;
  double c1 = 0.0;
  double value = 0.0;
};

[[nodiscard]] GapExtrapolation extrapolate_zero_field_gap(std::span<const double> separations,
                                                          std::span<const double> gaps, double target_R);

}  // namespace donor
