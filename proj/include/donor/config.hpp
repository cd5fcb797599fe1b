#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "donor/dynamics.hpp"
#include "donor/spectrum.hpp"
#include "donor/spin_prep.hpp"
#include "donor/tunnel.hpp"
#include "donor/units.hpp"

namespace donor {

/// Invalid configuration; the message names the offending section.key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error(field + ": " + message), field_(field) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ExperimentConfig {
  UnitSystem units{};

  // Separations in aB.
  std::vector<double> separations{10.0, 15.0};
  std::vector<double> gap_fit_separations{8.0, 10.0, 12.0, 15.0};
  double gap_target_R = 5.0;
  double gap_reference_meV = 30.0;

  ModelBudget budget{};
  std::filesystem::path cache_path;  // empty: no parameter sidecar

  double spectrum_max_field = 0.25;  // Ry/aB, fig2 grid
  double spectrum_step = 0.0025;
  SingleDonorLevels levels{};

  BarrierModel barrier{};
  double target_dwell_s = 10e-6;
  double isolated_binding_Ry = 1.7 / 45.5;  // rescaled if units.rydberg changes
  std::vector<double> wkb_fields;  // Ry/aB; empty: automatic grid

  double drive_R = 15.0;
  double drive_F0 = 0.001;
  double drive_F1 = 0.002;
  TransferOptions transfer{};

  SpinParams spin{};
  SweepSpec sweep{};
  std::vector<double> t_e_grid_s{1e-5, 1e-4, 1e-3, 1e-2, 6e-2, 1e-1};
  std::vector<double> t_n_grid_s{1e-2, 1e-1, 1.0, 10.0, 100.0};
  double B_ac_T = 1e-4;
  RabiConvention rabi_convention = RabiConvention::kRotating;
  double selectivity_ratio = 10.0;

  std::filesystem::path output_dir = "out";

  void validate() const;
};

/// Reads an INI file. Physical quantities carry unit suffixes ("30 nm",
/// "0.001 Ry/aB") and are converted here; unknown keys are rejected.
[[nodiscard]] ExperimentConfig load_config(const std::filesystem::path& path);
[[nodiscard]] ExperimentConfig parse_config(const std::string& text);

/// Stable textual rendering used for hashing and echoing.
[[nodiscard]] std::string describe(const ExperimentConfig& config);
/// FNV-1a of describe(config), as 16 hex digits.
[[nodiscard]] std::string config_hash(const ExperimentConfig& config);

}  // namespace donor
