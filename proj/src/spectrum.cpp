#include "donor/spectrum.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace donor {

DonorPairModel build_donor_pair_model(double R, const ModelBudget& budget, ParameterCache* cache) {
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("donor separation must be finite and > 0");
  DonorPairModel model;
  model.R = R;
  model.ll = optimize_cached(TrialKind::kLL, R, 0.0, budget.optimizer, cache);
  model.lr = optimize_cached(TrialKind::kLR, R, 0.0, budget.optimizer, cache);
  const TrialWavefunction ll(TrialKind::kLL, model.ll.params, R);
  const TrialWavefunction lr(TrialKind::kLR, model.lr.params, R);
  model.me = compute_matrix_elements({ll, lr, ll.mirrored()}, budget.mc_samples, budget.seed, budget.mc);
  model.hamiltonian = make_charge_hamiltonian(model.me, budget.treatment);
  return model;
}

DonorPairModel model_from_elements(const MatrixElementSet& me, BasisTreatment treatment) {
  DonorPairModel model;
  model.R = me.R;
  model.me = me;
  model.ll.kind = TrialKind::kLL;
  model.ll.params = me.params[kIndexLL];
  model.ll.R = me.R;
  model.lr.kind = TrialKind::kLR;
  model.lr.params = me.params[kIndexLR];
  model.lr.R = me.R;
  model.hamiltonian = make_charge_hamiltonian(me, treatment);
  return model;
}

SpectrumPoint spectrum_at(const ChargeHamiltonian& h, double field) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(h.at(field));
  if (es.info() != Eigen::Success) throw NumericalError("charge Hamiltonian diagonalization failed");
  SpectrumPoint p;
  p.field = field;
  p.energies = es.eigenvalues();
  p.vectors = es.eigenvectors();
  for (int k = 0; k < 3; ++k) {
    Eigen::Index idx = 0;
    p.vectors.col(k).cwiseAbs().maxCoeff(&idx);
    if (p.vectors(idx, k) < 0.0) p.vectors.col(k) *= -1.0;
  }
  p.ground_ll_weight = p.vectors(kIndexLL, 0) * p.vectors(kIndexLL, 0);
  p.gap = p.energies(1) - p.energies(0);
  return p;
}

SpectrumCurve levels_vs_field(const DonorPairModel& model, std::span<const double> fields) {
  SpectrumCurve curve;
  curve.R = model.R;
  double prev = -1.0;
  for (double f : fields) {
    if (!(f >= 0.0) || f <= prev) throw std::invalid_argument("field grid must be ascending and non-negative");
    prev = f;
    curve.points.push_back(spectrum_at(model.hamiltonian, f));
  }
  return curve;
}

CrossingResult find_crossing(const ChargeHamiltonian& h, double max_field) {
  if (!(max_field > 2.0 * kCrossingScanStep)) throw std::invalid_argument("crossing scan range too small");
  const auto n = static_cast<int>(std::floor(max_field / kCrossingScanStep));
  int best = 0;
  double best_gap = spectrum_at(h, 0.0).gap;
  for (int k = 1; k <= n; ++k) {
    const double g = spectrum_at(h, k * kCrossingScanStep).gap;
    if (g < best_gap) {
      best_gap = g;
      best = k;
    }
  }
  CrossingResult out;
  out.in_range = best > 0 && best < n;
  if (!out.in_range) {
    out.field = best * kCrossingScanStep;
    out.min_gap = best_gap;
    return out;
  }
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = (best - 1) * kCrossingScanStep, hi = (best + 1) * kCrossingScanStep;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double g1 = spectrum_at(h, x1).gap, g2 = spectrum_at(h, x2).gap;
  // Refine well past the reporting tolerance; the extra iterations are free.
  while (hi - lo > 1e-3 * kCrossingTolerance) {
    if (g1 < g2) {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - phi * (hi - lo);
      g1 = spectrum_at(h, x1).gap;
    } else {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + phi * (hi - lo);
      g2 = spectrum_at(h, x2).gap;
    }
  }
  out.field = 0.5 * (lo + hi);
  out.min_gap = spectrum_at(h, out.field).gap;
  return out;
}

AdiabaticResult find_adiabatic_field(const ChargeHamiltonian& h, double crossing_field, double threshold,
                                     double max_field) {
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("weight threshold must lie in (0, 1)");
  double lo = crossing_field;
  AdiabaticResult out;
  if (spectrum_at(h, lo).ground_ll_weight > threshold) {
    out.field = lo;
    out.in_range = true;
    return out;
  }
  double hi = lo;
  for (;;) {
    hi += kCrossingScanStep;
    if (hi > max_field) return out;
    if (spectrum_at(h, hi).ground_ll_weight > threshold) break;
    lo = hi;
  }
  while (hi - lo > 1e-7) {
    const double mid = 0.5 * (lo + hi);
    (spectrum_at(h, mid).ground_ll_weight > threshold ? hi : lo) = mid;
  }
  out.field = hi;
  out.in_range = true;
  return out;
}

void SingleDonorLevels::validate() const {
  if (!(transition_1s_2p0 > 0.0 && transition_1s_2p0 < transition_1s_2ppm)) {
    throw std::invalid_argument("single-donor lines must satisfy 0 < 1s-2p0 < 1s-2p+-");
  }
}

std::string_view to_string(BandFlag flag) {
  switch (flag) {
    case BandFlag::kBelow2p0: return "below_1s2p0";
    case BandFlag::kBetween: return "between";
    case BandFlag::kAbove2ppm: return "above_1s2ppm";
  }
  return "?";
}

BandFlag classify_gap(double gap_meV, const SingleDonorLevels& levels) {
  if (gap_meV < levels.transition_1s_2p0) return BandFlag::kBelow2p0;
  if (gap_meV > levels.transition_1s_2ppm) return BandFlag::kAbove2ppm;
  return BandFlag::kBetween;
}

std::vector<GapPoint> transition_gap_curve(const ChargeHamiltonian& h, std::span<const double> fields,
                                           const SingleDonorLevels& levels, const UnitSystem& units) {
  levels.validate();
  std::vector<GapPoint> out;
  out.reserve(fields.size());
  for (double f : fields) {
    const double gap = spectrum_at(h, f).gap * units.rydberg_meV;
    out.push_back({f, gap, classify_gap(gap, levels)});
  }
  return out;
}

int ll_dominated_level(const SpectrumPoint& point) {
  int best = 0;
  for (int k = 1; k < 3; ++k) {
    if (std::abs(point.vectors(kIndexLL, k)) > std::abs(point.vectors(kIndexLL, best))) best = k;
  }
  return best;
}

BindingResult single_electron_binding(const DonorPairModel& model, double field,
                                      const OptimizerSettings& lcao_settings) {
  const SpectrumPoint p = spectrum_at(model.hamiltonian, field);
  const LcaoResult lcao = optimize_lcao(model.R, field, lcao_settings);
  BindingResult out;
  out.d_plus_d0 = lcao.energy;
  out.d_plus_d_minus = p.energies(ll_dominated_level(p));
  out.binding = out.d_plus_d0 - out.d_plus_d_minus;
  out.bound = out.binding > 0.0;
  return out;
}

double isolated_binding(const OptimizationResult& isolated_ll) { return -1.0 - isolated_ll.energy; }

GapExtrapolation extrapolate_zero_field_gap(std::span<const double> separations, std::span<const double> gaps,
                                            double target_R) {
  if (separations.size() != gaps.size() || separations.size() < 2) {
    throw std::invalid_argument("gap extrapolation needs at least two (R, gap) pairs");
  }
  Eigen::MatrixXd A(separations.size(), 2);
  Eigen::VectorXd b(gaps.size());
  for (std::size_t k = 0; k < separations.size(); ++k) {
    if (!(separations[k] > 0.0)) throw std::invalid_argument("separations must be > 0");
    A(static_cast<Eigen::Index>(k), 0) = 1.0;
    A(static_cast<Eigen::Index>(k), 1) = 1.0 / separations[k];
    b(static_cast<Eigen::Index>(k)) = gaps[k];
  }
  const Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  return {c(0), c(1), c(0) + c(1) / target_R};
}

}  // namespace donor
