#include "donor/units.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <stdexcept>
#include <utility>

namespace donor {

namespace {

struct UnitInfo {
  Unit unit;
  Dimension dimension;
  std::string_view symbol;
};

constexpr std::array kUnitTable = {
    UnitInfo{Unit::kRydberg, Dimension::kEnergy, "Ry"},
    UnitInfo{Unit::kMilliElectronVolt, Dimension::kEnergy, "meV"},
    UnitInfo{Unit::kElectronVolt, Dimension::kEnergy, "eV"},
    UnitInfo{Unit::kRydbergPerBohr, Dimension::kField, "Ry/aB"},
    UnitInfo{Unit::kKiloVoltPerCm, Dimension::kField, "kV/cm"},
    UnitInfo{Unit::kVoltPerMetre, Dimension::kField, "V/m"},
    UnitInfo{Unit::kBohr, Dimension::kLength, "aB"},
    UnitInfo{Unit::kNanometre, Dimension::kLength, "nm"},
    UnitInfo{Unit::kPicosecond, Dimension::kTime, "ps"},
    UnitInfo{Unit::kNanosecond, Dimension::kTime, "ns"},
    UnitInfo{Unit::kMicrosecond, Dimension::kTime, "us"},
    UnitInfo{Unit::kMillisecond, Dimension::kTime, "ms"},
    UnitInfo{Unit::kSecond, Dimension::kTime, "s"},
    UnitInfo{Unit::kTesla, Dimension::kMagneticField, "T"},
    UnitInfo{Unit::kMilliTesla, Dimension::kMagneticField, "mT"},
    UnitInfo{Unit::kMilliElectronVoltPicosecond, Dimension::kAction, "meV*ps"},
    UnitInfo{Unit::kKelvin, Dimension::kTemperature, "K"},
    UnitInfo{Unit::kMilliKelvin, Dimension::kTemperature, "mK"},
};

constexpr std::array<std::pair<std::string_view, Unit>, 5> kAliases = {{
    {"Ry/a_B", Unit::kRydbergPerBohr},
    {"a_B", Unit::kBohr},
    {"μs", Unit::kMicrosecond},
    {"meV.ps", Unit::kMilliElectronVoltPicosecond},
    {"meV ps", Unit::kMilliElectronVoltPicosecond},
}};

const UnitInfo& info(Unit unit) {
  for (const auto& entry : kUnitTable) {
    if (entry.unit == unit) return entry;
  }
  throw std::logic_error("unit missing from table");
}

// Factor taking a value in `unit` to the reference unit of its dimension:
// meV, kV/cm, nm, ps, T, meV*ps, mK.
double to_reference(Unit unit, const UnitSystem& u) {
  switch (unit) {
    case Unit::kRydberg: return u.rydberg_meV;
    case Unit::kMilliElectronVolt: return 1.0;
    case Unit::kElectronVolt: return 1.0e3;
    case Unit::kRydbergPerBohr: return u.field_kV_per_cm();
    case Unit::kKiloVoltPerCm: return 1.0;
    case Unit::kVoltPerMetre: return 1.0e-5;
    case Unit::kBohr: return u.bohr_radius_nm;
    case Unit::kNanometre: return 1.0;
    case Unit::kPicosecond: return 1.0;
    case Unit::kNanosecond: return 1.0e3;
    case Unit::kMicrosecond: return 1.0e6;
    case Unit::kMillisecond: return 1.0e9;
    case Unit::kSecond: return 1.0e12;
    case Unit::kTesla: return 1.0;
    case Unit::kMilliTesla: return 1.0e-3;
    case Unit::kMilliElectronVoltPicosecond: return 1.0;
    case Unit::kKelvin: return 1.0e3;
    case Unit::kMilliKelvin: return 1.0;
  }
  throw std::logic_error("unhandled unit");
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

void UnitSystem::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v > 0.0)) throw std::invalid_argument(std::string("unit system field '") + name + "' must be > 0");
  };
  check(bohr_radius_nm, "bohr_radius_nm");
  check(rydberg_meV, "rydberg_meV");
  check(effective_mass_ratio, "effective_mass_ratio");
  check(hbar_meV_ps, "hbar_meV_ps");
  check(temperature_mK, "temperature_mK");
}

Dimension dimension_of(Unit unit) { return info(unit).dimension; }

std::string_view unit_symbol(Unit unit) { return info(unit).symbol; }

std::string_view dimension_name(Dimension dim) {
  switch (dim) {
    case Dimension::kEnergy: return "energy";
    case Dimension::kField: return "electric field";
    case Dimension::kLength: return "length";
    case Dimension::kTime: return "time";
    case Dimension::kMagneticField: return "magnetic field";
    case Dimension::kAction: return "action";
    case Dimension::kTemperature: return "temperature";
  }
  return "?";
}

Unit parse_unit(std::string_view text) {
  text = trim(text);
  for (const auto& entry : kUnitTable) {
    if (entry.symbol == text) return entry.unit;
  }
  for (const auto& [alias, unit] : kAliases) {
    if (alias == text) return unit;
  }
  throw std::invalid_argument("unknown unit '" + std::string(text) + "'");
}

double convert(double value, Unit from, Unit to, const UnitSystem& units) {
  const Dimension df = dimension_of(from);
  const Dimension dt = dimension_of(to);
  if (df != dt) {
    throw std::invalid_argument("cannot convert " + std::string(unit_symbol(from)) + " (" +
                                std::string(dimension_name(df)) + ") to " + std::string(unit_symbol(to)) +
                                " (" + std::string(dimension_name(dt)) + ")");
  }
  if (from == to) return value;
  return value * (to_reference(from, units) / to_reference(to, units));
}

Quantity parse_quantity(std::string_view text) {
  text = trim(text);
  const char* begin = text.data();
  const char* end = begin + text.size();
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{}) {
    throw std::invalid_argument("expected '<number> <unit>', got '" + std::string(text) + "'");
  }
  std::string_view rest = trim(std::string_view(ptr, static_cast<std::size_t>(end - ptr)));
  if (rest.empty()) {
    throw std::invalid_argument("missing unit in '" + std::string(text) + "'");
  }
  return Quantity{value, parse_unit(rest)};
}

}  // namespace donor
