#include "donor/trial_wavefunction.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace donor {

std::string_view to_string(TrialKind kind) {
  switch (kind) {
    case TrialKind::kLL: return "LL";
    case TrialKind::kLR: return "LR";
    case TrialKind::kRR: return "RR";
  }
  return "?";
}

TrialKind parse_trial_kind(std::string_view text) {
  if (text == "LL") return TrialKind::kLL;
  if (text == "LR") return TrialKind::kLR;
  if (text == "RR") return TrialKind::kRR;
  throw std::invalid_argument("unknown trial kind '" + std::string(text) + "'");
}

TrialWavefunction::TrialWavefunction(TrialKind kind, VariationalParams params, double separation,
                                     double norm_constant)
    : kind_(kind), params_(params), separation_(separation), norm_(norm_constant) {
  if (!(params.alpha > 0.0) || !(params.beta > 0.0)) {
    throw std::invalid_argument("trial wavefunction exponents must be > 0");
  }
  if (!(params.lambda >= 0.0)) throw std::invalid_argument("correlation lambda must be >= 0");
  if (kind == TrialKind::kLR && params.lambda != 0.0) {
    throw std::invalid_argument("LR trial state carries no correlation factor (lambda must be 0)");
  }
  if (!(separation > 0.0)) throw std::invalid_argument("donor separation must be > 0");
  if (!std::isfinite(separation) && kind != TrialKind::kLL) {
    throw std::invalid_argument("an isolated donor only supports the LL state");
  }
  if (!(norm_constant > 0.0) || !std::isfinite(norm_constant)) {
    throw std::invalid_argument("norm constant must be finite and > 0");
  }
  const double right = std::isfinite(separation) ? separation : 0.0;
  switch (kind) {
    case TrialKind::kLL: center_a_ = 0.0; center_b_ = 0.0; break;
    case TrialKind::kLR: center_a_ = 0.0; center_b_ = right; break;
    case TrialKind::kRR: center_a_ = right; center_b_ = right; break;
  }
}

TrialWavefunction TrialWavefunction::with_norm(double norm_constant) const {
  return TrialWavefunction(kind_, params_, separation_, norm_constant);
}

TrialWavefunction TrialWavefunction::mirrored() const {
  if (kind_ == TrialKind::kLR) {
    // Reflection swaps the donors; the LR form maps onto itself with a <-> b.
    return TrialWavefunction(kind_, {params_.beta, params_.alpha, 0.0}, separation_, norm_);
  }
  return TrialWavefunction(kind_ == TrialKind::kLL ? TrialKind::kRR : TrialKind::kLL, params_, separation_,
                           norm_);
}

namespace {

struct ProductTerm {
  double value;
  double laplacian_sum;      // (lap1 + lap2) of the term, divided by the term
  Eigen::Vector3d grad1;     // grad_1 of the term, divided by the term
  Eigen::Vector3d grad2;
};

ProductTerm product_term(const Eigen::Vector3d& r1, double c1, double z1, const Eigen::Vector3d& r2, double c2,
                         double z2) {
  Eigen::Vector3d d1 = r1;
  d1.x() -= c1;
  Eigen::Vector3d d2 = r2;
  d2.x() -= c2;
  const double n1 = d1.norm();
  const double n2 = d2.norm();
  ProductTerm t;
  t.value = std::exp(-z1 * n1 - z2 * n2);
  // lap e^{-z r} = (z^2 - 2 z / r) e^{-z r}
  t.laplacian_sum = z1 * z1 - 2.0 * z1 / n1 + z2 * z2 - 2.0 * z2 / n2;
  t.grad1 = (-z1 / n1) * d1;
  t.grad2 = (-z2 / n2) * d2;
  return t;
}

}  // namespace

double TrialWavefunction::evaluate(const ElectronPair& pair) const {
  const auto& [a, b, lambda] = params_;
  auto dist = [](const Eigen::Vector3d& r, double c) {
    return std::sqrt((r.x() - c) * (r.x() - c) + r.y() * r.y() + r.z() * r.z());
  };
  const double g = std::exp(-a * dist(pair.r1, center_a_) - b * dist(pair.r2, center_b_)) +
                   std::exp(-b * dist(pair.r1, center_b_) - a * dist(pair.r2, center_a_));
  return norm_ * g * (1.0 + lambda * (pair.r1 - pair.r2).norm());
}

TrialWavefunction::Amplitude TrialWavefunction::amplitude(const ElectronPair& pair) const {
  const auto& [a, b, lambda] = params_;
  const ProductTerm t1 = product_term(pair.r1, center_a_, a, pair.r2, center_b_, b);
  const ProductTerm t2 = product_term(pair.r1, center_b_, b, pair.r2, center_a_, a);
  const double g = t1.value + t2.value;
  const double lap_g = t1.value * t1.laplacian_sum + t2.value * t2.laplacian_sum;

  Amplitude out;
  if (lambda == 0.0) {
    out.value = norm_ * g;
    out.kinetic = -norm_ * lap_g;
    return out;
  }
  const Eigen::Vector3d r12v = pair.r1 - pair.r2;
  const double r12 = r12v.norm();
  const Eigen::Vector3d u = r12v / r12;
  const double corr = 1.0 + lambda * r12;
  // grad_1 r12 = u, grad_2 r12 = -u, lap_i r12 = 2 / r12
  const double cross = t1.value * (t1.grad1 - t1.grad2).dot(u) + t2.value * (t2.grad1 - t2.grad2).dot(u);
  const double lap = lap_g * corr + 2.0 * lambda * cross + g * lambda * 4.0 / r12;
  out.value = norm_ * g * corr;
  out.kinetic = -norm_ * lap;
  return out;
}

double TrialWavefunction::local_energy(const ElectronPair& pair, double field) const {
  if (near_singularity(pair, separation_, kSingularityTolerance)) {
    throw std::domain_error("local energy requested at a Coulomb singularity");
  }
  const Amplitude amp = amplitude(pair);
  return amp.kinetic / amp.value + two_donor_potential(pair, separation_) + field * (pair.r1.x() + pair.r2.x());
}

double two_donor_potential(const ElectronPair& pair, double separation) {
  const double r12 = (pair.r1 - pair.r2).norm();
  double v = -2.0 / pair.r1.norm() - 2.0 / pair.r2.norm() + 2.0 / r12;
  if (std::isfinite(separation)) {
    Eigen::Vector3d right(separation, 0.0, 0.0);
    v += -2.0 / (pair.r1 - right).norm() - 2.0 / (pair.r2 - right).norm() + 2.0 / separation;
  }
  return v;
}

bool near_singularity(const ElectronPair& pair, double separation, double shell) {
  if (pair.r1.norm() < shell || pair.r2.norm() < shell || (pair.r1 - pair.r2).norm() < shell) return true;
  if (std::isfinite(separation)) {
    const Eigen::Vector3d right(separation, 0.0, 0.0);
    if ((pair.r1 - right).norm() < shell || (pair.r2 - right).norm() < shell) return true;
  }
  return false;
}

OrbitalAmplitude orbital_amplitude(const SlaterOrbital& orbital, const Eigen::Vector3d& r) {
  const double dx = r.x() - orbital.center_x;
  const double d = std::sqrt(dx * dx + r.y() * r.y() + r.z() * r.z());
  const double value = std::exp(-orbital.zeta * d);
  return {value, -(orbital.zeta * orbital.zeta - 2.0 * orbital.zeta / d) * value};
}

double one_electron_potential(const Eigen::Vector3d& r, std::span<const double> donors_x) {
  double v = 0.0;
  for (std::size_t k = 0; k < donors_x.size(); ++k) {
    const double dx = r.x() - donors_x[k];
    v -= 2.0 / std::sqrt(dx * dx + r.y() * r.y() + r.z() * r.z());
    for (std::size_t l = k + 1; l < donors_x.size(); ++l) v += 2.0 / std::abs(donors_x[k] - donors_x[l]);
  }
  return v;
}

double one_electron_local_energy(std::span<const SlaterOrbital> orbitals, std::span<const double> coefficients,
                                 std::span<const double> donors_x, const Eigen::Vector3d& r, double field) {
  if (orbitals.size() != coefficients.size()) throw std::invalid_argument("orbital/coefficient size mismatch");
  for (double d : donors_x) {
    if ((r - Eigen::Vector3d(d, 0.0, 0.0)).norm() < kSingularityTolerance) {
      throw std::domain_error("local energy requested at a Coulomb singularity");
    }
  }
  double value = 0.0;
  double kinetic = 0.0;
  for (std::size_t k = 0; k < orbitals.size(); ++k) {
    const OrbitalAmplitude amp = orbital_amplitude(orbitals[k], r);
    value += coefficients[k] * amp.value;
    kinetic += coefficients[k] * amp.kinetic;
  }
  return kinetic / value + one_electron_potential(r, donors_x) + field * r.x();
}

}  // namespace donor
