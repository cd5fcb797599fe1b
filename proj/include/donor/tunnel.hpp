#pragma once

#include <functional>
#include <string_view>

#include "donor/units.hpp"

namespace donor {

/// Coulomb strength that places the 10 us critical field of a 1.7 meV level
/// at 0.00037 Ry/aB under the bound-energy attempt frequency. See
/// calibrate_barrier_strength.
inline constexpr double kCalibratedBarrierStrength = 0.16585;

enum class AttemptMode { kBoundEnergy, kFixed };
[[nodiscard]] std::string_view to_string(AttemptMode mode);
[[nodiscard]] AttemptMode parse_attempt_mode(std::string_view text);

/// One-dimensional barrier V(x) = -2 Z_b / x - F x (Ry, x in aB).
struct BarrierModel {
  double Z_b = kCalibratedBarrierStrength;
  AttemptMode attempt_mode = AttemptMode::kBoundEnergy;
  double fixed_attempt_THz = 1.0;  // used only in kFixed mode
  UnitSystem units{};

  void validate() const;
  /// Attempt frequency in 1/ps for a level bound by `binding` Ry.
  [[nodiscard]] double attempt_frequency_per_ps(double binding) const;
  /// Field above which the barrier peak lies below the level.
  [[nodiscard]] double threshold_field(double binding) const;
};

enum class Regime { kTunnelling, kOverBarrier };
[[nodiscard]] std::string_view to_string(Regime regime);

struct DwellResult {
  double field = 0.0;    // Ry/aB
  double binding = 0.0;  // Ry
  double action = 0.0;   // integral of sqrt(V + E_bind) between the turning points
  double transmission = 1.0;
  double dwell_time_s = 0.0;  // 0 in the over-barrier regime
  Regime regime = Regime::kOverBarrier;
};

/// Under-barrier action between the turning points; 0 when over the barrier.
[[nodiscard]] double wkb_action(double binding, double field, double Z_b);

[[nodiscard]] DwellResult wkb_dwell_time(double binding, double field, const BarrierModel& model);

struct CriticalFieldResult {
  double field = 0.0;            // F0* when reachable, else the barrier threshold
  double threshold_field = 0.0;  // barrier-vanishing field
  bool reachable = false;        // false when even the threshold dwell exceeds the target
};

inline constexpr double kCriticalFieldRelTolerance = 1e-4;

/// Field at which the dwell time equals `target_s`, by bisection on
/// log(dwell) in log(F).
[[nodiscard]] CriticalFieldResult critical_field(double binding, double target_s, const BarrierModel& model);

/// As critical_field, with a field-dependent binding energy evaluated
/// self-consistently at the trial field. `binding_at` must be positive on
/// the bracket it is probed on.
[[nodiscard]] CriticalFieldResult critical_field_self_consistent(const std::function<double(double)>& binding_at,
                                                                 double target_s, const BarrierModel& model,
                                                                 double field_hint);

/// Z_b for which critical_field(binding, target_s) equals `target_field`.
[[nodiscard]] double calibrate_barrier_strength(double binding, double target_s, double target_field,
                                                BarrierModel model);

}  // namespace donor
