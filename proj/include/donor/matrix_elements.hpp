#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

#include "donor/trial_wavefunction.hpp"

namespace donor {

/// Basis ordering used by every 3x3 charge-sector matrix.
enum BasisIndex : int { kIndexLL = 0, kIndexLR = 1, kIndexRR = 2 };

/// Thrown when a numerical procedure cannot produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Sharding of a Monte-Carlo run. Results depend on `shards` but never on
/// `threads`: every shard owns a substream and shards are reduced in order.
struct McOptions {
  std::size_t shards = 16;
  unsigned threads = 1;
};

/// Importance-sampled overlap, bare Hamiltonian and dipole (x1 + x2)
/// matrices in the {LL, LR, RR} basis. Basis states are normalized on the
/// same samples, so diag(S) = 1.
struct MatrixElementSet {
  Eigen::Matrix3d S = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d H0 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d X = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d stderr_S = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d stderr_H0 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d stderr_X = Eigen::Matrix3d::Zero();
  double R = 0.0;
  std::uint64_t n_samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t rejected = 0;  // samples redrawn inside the Coulomb rejection shell
  std::size_t shards = 0;
  std::array<VariationalParams, 3> params{};
  std::array<double, 3> norm_constants{1.0, 1.0, 1.0};
};

void to_json(nlohmann::json& j, const MatrixElementSet& me);
void from_json(const nlohmann::json& j, MatrixElementSet& me);

/// Minimum number of samples accepted by compute_matrix_elements.
inline constexpr std::uint64_t kMinimumSamples = 10'000;

/// Radius of the rejection shell around Coulomb centres (aB).
inline constexpr double kRejectionShell = 1e-9;

/// Monte-Carlo quadrature of S, H0 and X. The states must share R and be
/// ordered LL, LR, RR. Deterministic in (states, n_samples, seed, shards).
[[nodiscard]] MatrixElementSet compute_matrix_elements(const std::array<TrialWavefunction, 3>& states,
                                                       std::uint64_t n_samples, std::uint64_t seed,
                                                       const McOptions& options = {});

/// One-electron counterpart: S, H and X (= x) over an arbitrary set of Slater
/// orbitals in the field of `donors_x`. Orbitals are not renormalized.
struct OneElectronElements {
  Eigen::MatrixXd S, H, X;
  Eigen::MatrixXd stderr_S, stderr_H, stderr_X;
  std::uint64_t n_samples = 0;
  std::uint64_t rejected = 0;
};

[[nodiscard]] OneElectronElements compute_one_electron_elements(std::span<const SlaterOrbital> orbitals,
                                                                std::span<const double> donors_x,
                                                                std::uint64_t n_samples, std::uint64_t seed,
                                                                double density_decay,
                                                                const McOptions& options = {});

/// Solution of H v = E S v, energies ascending, vectors S-orthonormal with
/// the largest-magnitude component of each vector made positive.
struct EigenSolution {
  Eigen::Vector3d energies = Eigen::Vector3d::Zero();
  Eigen::Matrix3d vectors = Eigen::Matrix3d::Identity();  // columns
};

[[nodiscard]] EigenSolution generalized_eigen(const Eigen::Matrix3d& H, const Eigen::Matrix3d& S);
[[nodiscard]] EigenSolution generalized_eigen(const MatrixElementSet& me);

struct LowdinFrame {
  Eigen::Matrix3d H0;
  Eigen::Matrix3d X;
  Eigen::Matrix3d basis_map;  // S^{-1/2}
};

[[nodiscard]] LowdinFrame lowdin_orthogonalize(const MatrixElementSet& me);

/// How the non-orthogonal basis enters the charge-sector Hamiltonian used for
/// spectra and dynamics.
enum class BasisTreatment {
  kOrthogonal,  // S taken as the identity (large-separation limit)
  kLowdin,      // symmetric orthogonalization S^{-1/2} H S^{-1/2}
};

[[nodiscard]] std::string_view to_string(BasisTreatment treatment);
[[nodiscard]] BasisTreatment parse_basis_treatment(std::string_view text);

/// Orthonormal-frame charge Hamiltonian H(F) = h0 + F x (Ry, F in Ry/aB).
/// Populations of a coefficient vector c are |c_i|^2 in basis order.
struct ChargeHamiltonian {
  Eigen::Matrix3d h0 = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d x = Eigen::Matrix3d::Zero();
  BasisTreatment treatment = BasisTreatment::kOrthogonal;

  [[nodiscard]] Eigen::Matrix3d at(double field) const { return h0 + field * x; }
};

[[nodiscard]] ChargeHamiltonian make_charge_hamiltonian(const MatrixElementSet& me, BasisTreatment treatment);

}  // namespace donor
