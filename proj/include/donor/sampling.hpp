#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Core>

namespace donor {

/// SplitMix64 finalizer; used to derive independent substream seeds.
[[nodiscard]] std::uint64_t mix_seed(std::uint64_t x);

/// Seed for substream `stream` of a run seeded with `seed`.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Thin wrapper fixing the engine and the uniform transform so results
/// depend only on the seed, not on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform deviate in the open interval (0, 1).
  double uniform() {
    for (;;) {
      const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
      if (u > 0.0) return u;
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Equal-weight mixture of normalized exponential clouds
/// (s^3/pi) exp(-2 s |r - c|) centred on donor sites along the x axis.
class DonorCloudDensity {
 public:
  DonorCloudDensity(std::vector<double> centers_x, double s);

  [[nodiscard]] Eigen::Vector3d sample(Rng& rng) const;
  [[nodiscard]] double density(const Eigen::Vector3d& r) const;

  [[nodiscard]] double decay() const { return s_; }
  [[nodiscard]] const std::vector<double>& centers() const { return centers_; }

 private:
  std::vector<double> centers_;
  double s_;
  double norm_;
};

}  // namespace donor
