#pragma once

#include <string>
#include <string_view>

namespace donor {

/// Physical dimensions handled by the converter.
enum class Dimension { kEnergy, kField, kLength, kTime, kMagneticField, kAction, kTemperature };

enum class Unit {
  kRydberg,       // Ry
  kMilliElectronVolt,
  kElectronVolt,
  kRydbergPerBohr,  // Ry/aB
  kKiloVoltPerCm,
  kVoltPerMetre,
  kBohr,          // aB
  kNanometre,
  kPicosecond,
  kNanosecond,
  kMicrosecond,
  kMillisecond,
  kSecond,
  kTesla,
  kMilliTesla,
  kMilliElectronVoltPicosecond,
  kKelvin,
  kMilliKelvin,
};

/// Effective-mass unit system. Physics modules work in effective Rydberg
/// units (energy Ry, length aB, field Ry/aB) with time in ps.
struct UnitSystem {
  double bohr_radius_nm = 2.0;
  double rydberg_meV = 45.5;
  double effective_mass_ratio = 0.2;
  double hbar_meV_ps = 0.6582119;
  double temperature_mK = 100.0;  // carried for reports only

  /// Throws std::invalid_argument unless every field is strictly positive.
  void validate() const;

  /// kV/cm per Ry/aB.
  [[nodiscard]] double field_kV_per_cm() const { return 10.0 * rydberg_meV / bohr_radius_nm; }
  /// hbar expressed in Ry * ps.
  [[nodiscard]] double hbar_Ry_ps() const { return hbar_meV_ps / rydberg_meV; }
};

[[nodiscard]] Dimension dimension_of(Unit unit);
[[nodiscard]] std::string_view unit_symbol(Unit unit);
[[nodiscard]] std::string_view dimension_name(Dimension dim);

/// Accepts the symbols produced by unit_symbol plus a few spellings
/// (e.g. "Ry/a_B", "a_B"). Throws std::invalid_argument on unknown input.
[[nodiscard]] Unit parse_unit(std::string_view text);

/// Exact linear conversion. Rejects conversions across dimensions.
[[nodiscard]] double convert(double value, Unit from, Unit to, const UnitSystem& units = {});

struct Quantity {
  double value = 0.0;
  Unit unit = Unit::kRydberg;
};

/// Parses "<number> <unit>", e.g. "0.001 Ry/aB" or "30 nm".
[[nodiscard]] Quantity parse_quantity(std::string_view text);

}  // namespace donor
