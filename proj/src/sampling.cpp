#include "donor/sampling.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace donor {

std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix_seed(mix_seed(seed) ^ (stream * 0xd1b54a32d192ed03ULL + 0x632be59bd9b4e019ULL));
}

DonorCloudDensity::DonorCloudDensity(std::vector<double> centers_x, double s)
    : centers_(std::move(centers_x)), s_(s) {
  if (centers_.empty()) throw std::invalid_argument("DonorCloudDensity needs at least one centre");
  if (!(s > 0.0) || !std::isfinite(s)) throw std::invalid_argument("DonorCloudDensity decay must be > 0");
  norm_ = s_ * s_ * s_ / std::numbers::pi / static_cast<double>(centers_.size());
}

Eigen::Vector3d DonorCloudDensity::sample(Rng& rng) const {
  // |r - c| ~ Gamma(3, 1/(2s)), direction isotropic, centre chosen uniformly.
  const double radius = -std::log(rng.uniform() * rng.uniform() * rng.uniform()) / (2.0 * s_);
  const double cos_theta = 2.0 * rng.uniform() - 1.0;
  const double sin_theta = std::sqrt(std::max(0.0, 1.0 - cos_theta * cos_theta));
  const double phi = 2.0 * std::numbers::pi * rng.uniform();
  std::size_t which = 0;
  if (centers_.size() > 1) {
    which = static_cast<std::size_t>(rng.uniform() * static_cast<double>(centers_.size()));
    if (which >= centers_.size()) which = centers_.size() - 1;
  }
  return {centers_[which] + radius * sin_theta * std::cos(phi), radius * sin_theta * std::sin(phi),
          radius * cos_theta};
}

double DonorCloudDensity::density(const Eigen::Vector3d& r) const {
  double sum = 0.0;
  for (double c : centers_) {
    const double d = std::sqrt((r.x() - c) * (r.x() - c) + r.y() * r.y() + r.z() * r.z());
    sum += std::exp(-2.0 * s_ * d);
  }
  return norm_ * sum;
}

}  // namespace donor
