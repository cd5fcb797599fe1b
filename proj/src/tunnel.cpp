#include "donor/tunnel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace donor {

std::string_view to_string(AttemptMode mode) {
  return mode == AttemptMode::kBoundEnergy ? "bound_energy" : "fixed";
}

AttemptMode parse_attempt_mode(std::string_view text) {
  if (text == "bound_energy") return AttemptMode::kBoundEnergy;
  if (text == "fixed") return AttemptMode::kFixed;
  throw std::invalid_argument("unknown attempt frequency mode '" + std::string(text) + "'");
}

std::string_view to_string(Regime regime) {
  return regime == Regime::kTunnelling ? "tunnelling" : "over_barrier";
}

void BarrierModel::validate() const {
  units.validate();
  if (!(Z_b >= 0.0) || !std::isfinite(Z_b)) throw std::invalid_argument("barrier strength Z_b must be >= 0");
  if (attempt_mode == AttemptMode::kFixed && !(fixed_attempt_THz > 0.0)) {
    throw std::invalid_argument("fixed attempt frequency must be > 0");
  }
}

double BarrierModel::attempt_frequency_per_ps(double binding) const {
  if (attempt_mode == AttemptMode::kFixed) return fixed_attempt_THz;
  return binding / (2.0 * std::numbers::pi * units.hbar_Ry_ps());
}

double BarrierModel::threshold_field(double binding) const { return binding * binding / (8.0 * Z_b); }

double wkb_action(double binding, double field, double Z_b) {
  if (!(binding > 0.0) || !(field > 0.0)) throw std::invalid_argument("WKB action needs binding > 0 and field > 0");
  const double disc = binding * binding - 8.0 * Z_b * field;
  if (disc <= 0.0) return 0.0;
  const double root = std::sqrt(disc);
  // Stable root pair of F x^2 - E x + 2 Z = 0.
  const double x2 = (binding + root) / (2.0 * field);
  const double x1 = Z_b > 0.0 ? 2.0 * Z_b / (field * x2) : 0.0;
  const double mid = 0.5 * (x1 + x2), half = 0.5 * (x2 - x1);
  // x = mid - half cos(t) turns sqrt(F (x - x1)(x2 - x) / x) dx into a smooth
  // integrand on [0, pi].
  const auto integrand = [&](double t) {
    const double s = std::sin(t);
    const double x = mid - half * std::cos(t);
    return std::sqrt(field) * half * half * s * s / std::sqrt(x);
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(integrand, 0.0, std::numbers::pi, 15, 1e-13);
}

DwellResult wkb_dwell_time(double binding, double field, const BarrierModel& model) {
  model.validate();
  if (!(binding > 0.0)) throw std::invalid_argument("binding energy must be > 0");
  if (!(field > 0.0)) throw std::invalid_argument("field must be > 0");
  DwellResult out;
  out.field = field;
  out.binding = binding;
  if (field >= model.threshold_field(binding)) return out;
  out.regime = Regime::kTunnelling;
  out.action = wkb_action(binding, field, model.Z_b);
  out.transmission = std::exp(-2.0 * out.action);
  out.dwell_time_s = 1e-12 / (model.attempt_frequency_per_ps(binding) * out.transmission);
  return out;
}

namespace {

/// log(dwell / target) with the over-barrier side mapped to a large negative
/// value so a sign change always brackets the root.
double log_excess(double binding, double field, double target_s, const BarrierModel& model) {
  const DwellResult r = wkb_dwell_time(binding, field, model);
  if (r.regime == Regime::kOverBarrier) return -1e3;
  const double log_dwell = 2.0 * r.action - std::log(model.attempt_frequency_per_ps(binding)) + std::log(1e-12);
  return log_dwell - std::log(target_s);
}

}  // namespace

CriticalFieldResult critical_field(double binding, double target_s, const BarrierModel& model) {
  model.validate();
  if (!(target_s > 0.0)) throw std::invalid_argument("target dwell time must be > 0");
  if (!(binding > 0.0)) throw std::invalid_argument("binding energy must be > 0");
  CriticalFieldResult out;
  out.threshold_field = model.threshold_field(binding);
  out.field = out.threshold_field;
  if (model.Z_b == 0.0) return out;
  // Just below threshold the barrier is transparent; the dwell there is the
  // shortest reachable in the tunnelling regime.
  double hi = out.threshold_field * (1.0 - 1e-12);
  if (log_excess(binding, hi, target_s, model) > 0.0) return out;
  double lo = out.threshold_field * 1e-3;
  while (log_excess(binding, lo, target_s, model) < 0.0) lo *= 1e-3;
  while (hi / lo - 1.0 > 1e-3 * kCriticalFieldRelTolerance) {
    const double mid = std::sqrt(lo * hi);
    (log_excess(binding, mid, target_s, model) > 0.0 ? lo : hi) = mid;
  }
  out.field = std::sqrt(lo * hi);
  out.reachable = true;
  return out;
}

CriticalFieldResult critical_field_self_consistent(const std::function<double(double)>& binding_at, double target_s,
                                                   const BarrierModel& model, double field_hint) {
  model.validate();
  if (!(target_s > 0.0)) throw std::invalid_argument("target dwell time must be > 0");
  if (!(field_hint > 0.0)) throw std::invalid_argument("field hint must be > 0");
  const auto excess = [&](double f) {
    const double e = binding_at(f);
    if (!(e > 0.0)) return -1e3;
    return log_excess(e, f, target_s, model);
  };
  CriticalFieldResult out;
  double lo = field_hint, hi = field_hint;
  double f_lo = excess(lo);
  if (f_lo > 0.0) {
    hi = lo * 1.5;
    while (excess(hi) > 0.0) {
      lo = hi;
      hi *= 1.5;
      if (hi > 10.0) return out;
    }
  } else {
    lo = hi / 1.5;
    while (excess(lo) < 0.0) {
      hi = lo;
      lo /= 1.5;
      if (lo < 1e-12) return out;
    }
  }
  while (hi / lo - 1.0 > kCriticalFieldRelTolerance) {
    const double mid = std::sqrt(lo * hi);
    (excess(mid) > 0.0 ? lo : hi) = mid;
  }
  out.field = std::sqrt(lo * hi);
  const double e = binding_at(out.field);
  out.threshold_field = e > 0.0 ? model.threshold_field(e) : 0.0;
  out.reachable = true;
  return out;
}

double calibrate_barrier_strength(double binding, double target_s, double target_field, BarrierModel model) {
  if (!(target_field > 0.0)) throw std::invalid_argument("target field must be > 0");
  const auto field_for = [&](double z) {
    model.Z_b = z;
    return critical_field(binding, target_s, model);
  };
  double lo = 1e-3, hi = 10.0;
  const double at_lo = field_for(lo).field - target_field;
  if (at_lo * (field_for(hi).field - target_field) > 0.0) {
    throw std::invalid_argument("target field outside the calibratable range of Z_b");
  }
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    ((field_for(mid).field - target_field) * at_lo > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace donor
