#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string_view>

#include <Eigen/Core>

namespace donor {

/// Charge configuration of the two-electron singlet basis states.
enum class TrialKind { kLL, kLR, kRR };

[[nodiscard]] std::string_view to_string(TrialKind kind);
[[nodiscard]] TrialKind parse_trial_kind(std::string_view text);

/// Separation used for a single donor with no partner (isolated D- / D0).
inline constexpr double kIsolatedSeparation = std::numeric_limits<double>::infinity();

/// Distance from a Coulomb centre below which the local energy is undefined.
inline constexpr double kSingularityTolerance = 1e-12;

struct VariationalParams {
  double alpha = 1.0;   // 1/aB
  double beta = 1.0;    // 1/aB
  double lambda = 0.0;  // 1/aB, correlation factor (1 + lambda r12)
};

struct ElectronPair {
  Eigen::Vector3d r1 = Eigen::Vector3d::Zero();
  Eigen::Vector3d r2 = Eigen::Vector3d::Zero();
};

/// Symmetrized two-electron trial state
///   N (e^{-a|r1-A|} e^{-b|r2-B|} + e^{-b|r1-B|} e^{-a|r2-A|}) (1 + lambda r12)
/// where the orbital centres (A, B) are (L, L), (L, R) or (R, R). The left
/// donor sits at the origin and the right donor at (R, 0, 0).
class TrialWavefunction {
 public:
  /// Value and kinetic term -(lap1 + lap2) psi, both including the norm.
  struct Amplitude {
    double value = 0.0;
    double kinetic = 0.0;
  };

  TrialWavefunction(TrialKind kind, VariationalParams params, double separation,
                    double norm_constant = 1.0);

  [[nodiscard]] TrialKind kind() const { return kind_; }
  [[nodiscard]] const VariationalParams& params() const { return params_; }
  [[nodiscard]] double separation() const { return separation_; }
  [[nodiscard]] double norm_constant() const { return norm_; }
  [[nodiscard]] bool isolated() const { return !std::isfinite(separation_); }
  [[nodiscard]] TrialWavefunction with_norm(double norm_constant) const;

  /// Mirror image through the inter-donor midpoint (LL <-> RR).
  [[nodiscard]] TrialWavefunction mirrored() const;

  [[nodiscard]] double evaluate(const ElectronPair& pair) const;
  [[nodiscard]] Amplitude amplitude(const ElectronPair& pair) const;

  /// [H psi]/psi for the two-donor Hamiltonian plus a uniform field along x.
  /// Throws std::domain_error at a Coulomb singularity.
  [[nodiscard]] double local_energy(const ElectronPair& pair, double field) const;

 private:
  TrialKind kind_;
  VariationalParams params_;
  double separation_;
  double norm_;
  double center_a_;  // x of the orbital with exponent alpha (first product term)
  double center_b_;
};

/// Two-donor Coulomb potential in Ry, including the donor-donor repulsion
/// 2/R. For an isolated donor only the left centre contributes.
[[nodiscard]] double two_donor_potential(const ElectronPair& pair, double separation);

/// True when either electron, or the electron pair, lies within `shell` of a
/// Coulomb singularity.
[[nodiscard]] bool near_singularity(const ElectronPair& pair, double separation, double shell);

/// Single Slater orbital exp(-zeta |r - c|) with c on the x axis.
struct SlaterOrbital {
  double center_x = 0.0;
  double zeta = 1.0;
};

struct OrbitalAmplitude {
  double value = 0.0;
  double kinetic = 0.0;  // -lap psi
};

[[nodiscard]] OrbitalAmplitude orbital_amplitude(const SlaterOrbital& orbital, const Eigen::Vector3d& r);

/// One-electron potential: attraction to every donor plus the donor-donor
/// repulsion between them.
[[nodiscard]] double one_electron_potential(const Eigen::Vector3d& r, std::span<const double> donors_x);

/// Local energy of sum_k c_k phi_k for one electron in the field of `donors_x`.
[[nodiscard]] double one_electron_local_energy(std::span<const SlaterOrbital> orbitals,
                                               std::span<const double> coefficients,
                                               std::span<const double> donors_x, const Eigen::Vector3d& r,
                                               double field);

}  // namespace donor
