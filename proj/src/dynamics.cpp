#include "donor/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace donor {

namespace {

using Complex = std::complex<double>;

Eigen::Vector3d populations_of(const StateVector& c) { return c.cwiseAbs2(); }

/// exp(-i H tau / hbar) for real symmetric H.
Eigen::Matrix3cd propagator(const Eigen::Matrix3d& H, double tau_over_hbar) {
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(H);
  Eigen::Vector3cd phases;
  for (int k = 0; k < 3; ++k) phases(k) = std::polar(1.0, -es.eigenvalues()(k) * tau_over_hbar);
  const Eigen::Matrix3cd V = es.eigenvectors().cast<Complex>();
  return V * phases.asDiagonal() * V.transpose();
}

StateVector ground_state(const ChargeHamiltonian& h, double field) {
  return spectrum_at(h, field).vectors.col(0).cast<Complex>();
}

}  // namespace

void FieldProfile::validate() const {
  if (!(F1 >= 0.0)) throw std::invalid_argument("drive amplitude F1 must be >= 0");
  if (!(t_on < t_off)) throw std::invalid_argument("drive window needs t_on < t_off");
  if (F1 > 0.0 && !(omega > 0.0)) throw std::invalid_argument("drive frequency must be > 0 when F1 > 0");
  if (ramp == RampShape::kLinear && !(ramp_ps > 0.0 && 2.0 * ramp_ps <= t_off - t_on)) {
    throw std::invalid_argument("ramp duration must be > 0 and fit twice inside the drive window");
  }
}

double FieldProfile::envelope(double t) const {
  if (t < t_on || t > t_off) return 0.0;
  if (ramp == RampShape::kRectangular) return 1.0;
  return std::min({1.0, (t - t_on) / ramp_ps, (t_off - t) / ramp_ps});
}

double FieldProfile::at(double t) const {
  const double g = envelope(t);
  return g == 0.0 ? F0 : F0 + F1 * g * std::sin(omega * (t - t_on));
}

double Trajectory::max_norm_drift() const {
  double drift = 0.0;
  for (double n : norm) drift = std::max(drift, std::abs(n - 1.0));
  return drift;
}

Trajectory evolve(const ChargeHamiltonian& h, const std::function<double(double)>& field, const StateVector& c0,
                  double t0, double t1, double dt, const UnitSystem& units, int stride) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be > 0");
  if (stride < 1) throw std::invalid_argument("record stride must be >= 1");
  if (std::abs(c0.norm() - 1.0) > 1e-10) throw std::invalid_argument("initial state must be normalized");
  const double span = t1 - t0;
  const auto steps = static_cast<long>(std::ceil(std::abs(span) / dt - 1e-9));
  const double h_step = steps > 0 ? span / static_cast<double>(steps) : 0.0;
  const double hbar = units.hbar_Ry_ps();

  Trajectory traj;
  StateVector c = c0;
  const auto record = [&](double t) {
    traj.times.push_back(t);
    traj.populations.push_back(populations_of(c));
    traj.norm.push_back(c.norm());
  };
  record(t0);
  for (long k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * h_step;
    c = propagator(h.at(field(t + 0.5 * h_step)), h_step / hbar) * c;
    if ((k + 1) % stride == 0 || k + 1 == steps) record(t0 + static_cast<double>(k + 1) * h_step);
  }
  traj.final_state = c;
  return traj;
}

Trajectory evolve(const ChargeHamiltonian& h, const FieldProfile& profile, const StateVector& c0, double t0,
                  double t1, double dt, const UnitSystem& units, int stride) {
  profile.validate();
  if (profile.F1 > 0.0) {
    const double bound = 2.0 * std::numbers::pi / (20.0 * profile.omega);
    if (dt > bound) {
      throw std::invalid_argument("time step " + std::to_string(dt) + " ps does not resolve the drive; need dt <= " +
                                  std::to_string(bound) + " ps");
    }
  }
  return evolve(h, [&profile](double t) { return profile.at(t); }, c0, t0, t1, dt, units, stride);
}

double transition_dipole(const ChargeHamiltonian& h, double F0) {
  const SpectrumPoint p = spectrum_at(h, F0);
  return std::abs(p.vectors.col(1).dot(h.x * p.vectors.col(0)));
}

double extract_rabi_time(const ChargeHamiltonian& h, double F0, double F1, const UnitSystem& units) {
  if (!(F1 > 0.0)) throw std::invalid_argument("drive amplitude F1 must be > 0");
  const double x = transition_dipole(h, F0);
  if (x < 1e-12) throw NumericalError("transition is dipole-forbidden (|X_eff| < 1e-12 aB)");
  return std::numbers::pi * units.hbar_Ry_ps() / (F1 * x);
}

TransferResult resonant_transfer(const ChargeHamiltonian& h, double F0, double F1, const UnitSystem& units,
                                 const TransferOptions& options) {
  if (!(F1 > 0.0)) throw std::invalid_argument("drive amplitude F1 must be > 0");
  if (!(options.t_on_ps >= 0.0 && options.hold_ps >= 0.0 && options.steps_per_period >= 20.0)) {
    throw std::invalid_argument("transfer options out of range");
  }
  const double hbar = units.hbar_Ry_ps();
  const SpectrumPoint p = spectrum_at(h, F0);
  TransferResult out;
  out.gap = p.gap;
  out.omega = options.omega.value_or(p.gap / hbar);
  out.analytic_rabi_ps = extract_rabi_time(h, F0, F1, units);
  const double dt = 2.0 * std::numbers::pi / out.omega / options.steps_per_period;
  const double t_limit = options.t_on_ps + options.max_rabi_multiple * out.analytic_rabi_ps;

  FieldProfile drive{F0, F1, out.omega, options.t_on_ps, t_limit, RampShape::kRectangular, 0.0};
  drive.validate();
  const double dc_hold = F0;

  // Stepped by hand so the drive can be removed at the P_LR minimum.
  StateVector c = p.vectors.col(0).cast<Complex>();
  Trajectory& traj = out.trajectory;
  long step = 0;
  double t = 0.0;
  const auto record = [&](bool force) {
    if (force || step % options.stride == 0) {
      traj.times.push_back(t);
      traj.populations.push_back(populations_of(c));
      traj.norm.push_back(c.norm());
    }
  };
  const auto advance = [&](double field_mid, double tau) {
    c = propagator(h.at(field_mid), tau / hbar) * c;
    t += tau;
    ++step;
  };
  record(true);
  while (t + dt <= options.t_on_ps + 1e-12) {
    advance(dc_hold, dt);
    record(false);
  }
  if (t < options.t_on_ps) {
    advance(dc_hold, options.t_on_ps - t);
    record(true);
  }

  bool below = false;
  double best_p = 1.0, best_t = t;
  StateVector best_state = c;
  while (t < t_limit) {
    advance(drive.at(t + 0.5 * dt), dt);
    const double p_lr = std::norm(c(kIndexLR));
    out.max_p_ll = std::max(out.max_p_ll, std::norm(c(kIndexLL)));
    if (p_lr < best_p) {
      best_p = p_lr;
      best_t = t;
      best_state = c;
    }
    if (!below && p_lr < options.completion_threshold) {
      below = true;
      out.rabi_time_ps = t - options.t_on_ps;
    }
    record(false);
    // Past the threshold crossing, stop once P_LR has turned upward by more
    // than the drive-frequency ripple.
    if (below && p_lr > best_p + 0.05) break;
  }
  out.min_p_lr = best_p;
  out.complete = below;
  if (!below) {
    out.switch_off_ps = t;
    out.trajectory.final_state = c;
    return out;
  }

  // Resume from the minimum with the AC component off and the DC kept on.
  c = best_state;
  t = best_t;
  out.switch_off_ps = best_t;
  while (!traj.times.empty() && traj.times.back() > best_t) {
    traj.times.pop_back();
    traj.populations.pop_back();
    traj.norm.pop_back();
  }
  record(true);
  const Eigen::Vector3d reference = populations_of(c);
  const double t_end = best_t + options.hold_ps;
  while (t < t_end - 1e-12) {
    advance(dc_hold, std::min(dt, t_end - t));
    out.hold_drift = std::max(out.hold_drift, (populations_of(c) - reference).cwiseAbs().maxCoeff());
    record(t >= t_end - 1e-12);
  }
  traj.final_state = c;
  return out;
}

RampResult sweep_dc_field(const ChargeHamiltonian& h, double F_start, double F_end, double duration_ps, double dt,
                          const UnitSystem& units) {
  if (!(duration_ps > 0.0)) throw std::invalid_argument("ramp duration must be > 0");
  const auto field = [&](double t) { return F_start + (F_end - F_start) * t / duration_ps; };
  RampResult out;
  out.trajectory = evolve(h, field, ground_state(h, F_start), 0.0, duration_ps, dt, units,
                          std::max(1, static_cast<int>(duration_ps / dt / 2000.0)));
  const StateVector g = ground_state(h, F_end);
  out.ground_population = std::norm(g.dot(out.trajectory.final_state));
  out.ll_population = std::norm(out.trajectory.final_state(kIndexLL));
  return out;
}

}  // namespace donor
