#include "donor/spin_prep.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "donor/matrix_elements.hpp"

namespace donor {

namespace {

using Complex = std::complex<double>;
using SpinUnitary = Eigen::Matrix<Complex, kSpinDim, kSpinDim>;

constexpr int kE1 = 3, kE2 = 2, kN1 = 1, kN2 = 0;  // bit positions

/// sigma_z eigenvalue of the spin at `bit` in basis state `s`.
double sz(int s, int bit) { return ((s >> bit) & 1) == 0 ? 1.0 : -1.0; }

/// Adds c * (sigma_p . sigma_q) to H.
void add_heisenberg(SpinMatrix& H, int p, int q, double c) {
  for (int s = 0; s < kSpinDim; ++s) {
    H(s, s) += c * sz(s, p) * sz(s, q);
    if (((s >> p) & 1) != ((s >> q) & 1)) {
      // sigma_x sigma_x + sigma_y sigma_y flips an anti-aligned pair with amplitude 2.
      H(s ^ (1 << p) ^ (1 << q), s) += 2.0 * c;
    }
  }
}

SpinVector basis_state(int index) {
  SpinVector v = SpinVector::Zero();
  v(index) = 1.0;
  return v;
}

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

}  // namespace

void SpinParams::validate() const {
  if (!(B_T > 0.0)) throw std::invalid_argument("magnetic field B must be > 0");
  if (!(A_meV > 0.0)) throw std::invalid_argument("hyperfine A must be > 0");
  if (!(g_e > 0.0 && mu_B > 0.0)) throw std::invalid_argument("g_e and mu_B must be > 0");
  if (!(g_n_mu_n >= 0.0)) throw std::invalid_argument("nuclear Zeeman coefficient must be >= 0");
  if (!(electron_zeeman() > 10.0 * A_meV)) throw std::invalid_argument("electron Zeeman must dominate the hyperfine");
}

SpinMatrix build_spin_hamiltonian(double J_meV, const SpinParams& p) {
  if (!(J_meV >= 0.0)) throw std::invalid_argument("exchange J must be >= 0");
  SpinMatrix H = SpinMatrix::Zero();
  const double ez = 0.5 * p.electron_zeeman();
  const double nz = 0.5 * p.g_n_mu_n * p.B_T;
  for (int s = 0; s < kSpinDim; ++s) H(s, s) += ez * (sz(s, kE1) + sz(s, kE2)) - nz * (sz(s, kN1) + sz(s, kN2));
  add_heisenberg(H, kE1, kN1, p.A_meV);
  add_heisenberg(H, kE2, kN2, p.A_meV);
  add_heisenberg(H, kE1, kE2, J_meV);
  return H;
}

namespace {

double odd_block_gap(double J, const SpinParams& p) {
  const SpinMatrix H = build_spin_hamiltonian(J, p);
  Eigen::Matrix<double, kSpinDim, 2> P = Eigen::Matrix<double, kSpinDim, 2>::Zero();
  P(spin_index(1, 1, 0, 1), 0) = kInvSqrt2;
  P(spin_index(1, 1, 1, 0), 0) = -kInvSqrt2;
  P(spin_index(0, 1, 1, 1), 1) = kInvSqrt2;
  P(spin_index(1, 0, 1, 1), 1) = -kInvSqrt2;
  const Eigen::Matrix2d block = P.transpose() * H * P;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(block, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1) - es.eigenvalues()(0);
}

}  // namespace

JcResult find_jc(const SpinParams& p, double J_max) {
  p.validate();
  constexpr int kScan = 2000;
  int best = 0;
  double best_gap = odd_block_gap(0.0, p);
  for (int k = 1; k <= kScan; ++k) {
    const double g = odd_block_gap(J_max * k / kScan, p);
    if (g < best_gap) {
      best_gap = g;
      best = k;
    }
  }
  JcResult out;
  out.in_range = best > 0 && best < kScan;
  if (!out.in_range) {
    out.J_c = J_max * best / kScan;
    out.min_gap = best_gap;
    return out;
  }
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double lo = J_max * (best - 1) / kScan, hi = J_max * (best + 1) / kScan;
  double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
  double g1 = odd_block_gap(x1, p), g2 = odd_block_gap(x2, p);
  while (hi - lo > 1e-12) {
    if (g1 < g2) {
      hi = x2;
      x2 = x1;
      g2 = g1;
      x1 = hi - phi * (hi - lo);
      g1 = odd_block_gap(x1, p);
    } else {
      lo = x1;
      x1 = x2;
      g1 = g2;
      x2 = lo + phi * (hi - lo);
      g2 = odd_block_gap(x2, p);
    }
  }
  out.J_c = 0.5 * (lo + hi);
  out.min_gap = odd_block_gap(out.J_c, p);
  return out;
}

void SweepSpec::validate() const {
  if (!(J_start >= 0.0 && J_end >= 0.0 && J_start != J_end)) throw std::invalid_argument("sweep endpoints invalid");
  if (!(duration_us > 0.0)) throw std::invalid_argument("sweep duration must be > 0");
  if (steps < 10) throw std::invalid_argument("sweep needs at least 10 steps");
}

void DephasingRates::validate() const {
  if (!(t_e_s >= 0.0 && t_n_s >= 0.0)) throw std::invalid_argument("dephasing times must be > 0 (or 0 to disable)");
}

std::string_view to_string(PreparationInput input) {
  switch (input) {
    case PreparationInput::k11: return "11";
    case PreparationInput::k10: return "10";
    case PreparationInput::k01: return "01";
    case PreparationInput::k00: return "00";
  }
  return "?";
}

PreparationInput parse_preparation_input(std::string_view text) {
  for (auto in : kAllInputs) {
    if (to_string(in) == text) return in;
  }
  throw std::invalid_argument("unknown preparation input '" + std::string(text) + "'");
}

SpinVector preparation_initial(PreparationInput input) {
  switch (input) {
    case PreparationInput::k11: return basis_state(spin_index(1, 1, 1, 1));
    case PreparationInput::k10:
      return kInvSqrt2 * (basis_state(spin_index(1, 1, 0, 1)) + basis_state(spin_index(1, 1, 1, 0)));
    case PreparationInput::k01:
      return kInvSqrt2 * (basis_state(spin_index(1, 1, 0, 1)) - basis_state(spin_index(1, 1, 1, 0)));
    case PreparationInput::k00: return basis_state(spin_index(1, 1, 0, 0));
  }
  throw std::invalid_argument("unknown preparation input");
}

SpinVector preparation_target(PreparationInput input) {
  switch (input) {
    case PreparationInput::k11:
    case PreparationInput::k10: return preparation_initial(input);
    case PreparationInput::k01:
      return kInvSqrt2 * (basis_state(spin_index(0, 1, 1, 1)) - basis_state(spin_index(1, 0, 1, 1)));
    case PreparationInput::k00: {
      // |a_e>|a_n> with a = (|01> - |10>)/sqrt2 on each pair.
      SpinVector v = SpinVector::Zero();
      v(spin_index(0, 1, 0, 1)) = 0.5;
      v(spin_index(0, 1, 1, 0)) = -0.5;
      v(spin_index(1, 0, 0, 1)) = -0.5;
      v(spin_index(1, 0, 1, 0)) = 0.5;
      return v;
    }
  }
  throw std::invalid_argument("unknown preparation input");
}

DensityMatrix pure_state(const SpinVector& psi) { return psi * psi.adjoint(); }

PreparationPropagator::PreparationPropagator(const SweepSpec& sweep, const SpinParams& params, const UnitSystem& units)
    : sweep_(sweep) {
  sweep.validate();
  params.validate();
  units.validate();
  const double duration_ps = sweep.duration_us * 1e6;
  const double dt_ps = duration_ps / sweep.steps;
  dt_s_ = dt_ps * 1e-12;
  unitaries_.reserve(static_cast<std::size_t>(sweep.steps));
  for (int k = 0; k < sweep.steps; ++k) {
    const double J = sweep.J_start + (sweep.J_end - sweep.J_start) * (k + 0.5) / sweep.steps;
    Eigen::SelfAdjointEigenSolver<SpinMatrix> es(build_spin_hamiltonian(J, params));
    Eigen::Matrix<Complex, kSpinDim, 1> phases;
    for (int i = 0; i < kSpinDim; ++i) phases(i) = std::polar(1.0, -es.eigenvalues()(i) * dt_ps / units.hbar_meV_ps);
    const SpinUnitary V = es.eigenvectors().cast<Complex>();
    unitaries_.push_back(V * phases.asDiagonal() * V.adjoint());
  }
}

PreparationPropagator::Result PreparationPropagator::run(const DensityMatrix& rho0, const SpinVector& target,
                                                         const DephasingRates& rates, int check_stride) const {
  rates.validate();
  const double ge = rates.t_e_s > 0.0 ? 1.0 / (2.0 * rates.t_e_s) : 0.0;
  const double gn = rates.t_n_s > 0.0 ? 1.0 / (2.0 * rates.t_n_s) : 0.0;
  // sigma_z dephasing at rate g damps rho_ab by exp(-2 g t) per spin that differs.
  Eigen::Matrix<double, kSpinDim, kSpinDim> half_damp;
  for (int a = 0; a < kSpinDim; ++a) {
    for (int b = 0; b < kSpinDim; ++b) {
      const int diff = a ^ b;
      const int ne = ((diff >> kE1) & 1) + ((diff >> kE2) & 1);
      const int nn = ((diff >> kN1) & 1) + ((diff >> kN2) & 1);
      half_damp(a, b) = std::exp(-2.0 * (ge * ne + gn * nn) * 0.5 * dt_s_);
    }
  }

  Result out;
  DensityMatrix rho = rho0;
  out.purity_initial = (rho * rho).trace().real();
  out.min_eigenvalue = 0.0;
  const auto check = [&] {
    out.max_trace_drift = std::max(out.max_trace_drift, std::abs(rho.trace() - 1.0));
    out.max_hermiticity_error = std::max(out.max_hermiticity_error, (rho - rho.adjoint()).cwiseAbs().maxCoeff());
    Eigen::SelfAdjointEigenSolver<DensityMatrix> es(rho, Eigen::EigenvaluesOnly);
    out.min_eigenvalue = std::min(out.min_eigenvalue, es.eigenvalues().minCoeff());
  };
  check();
  const auto steps = unitaries_.size();
  for (std::size_t k = 0; k < steps; ++k) {
    rho = rho.cwiseProduct(half_damp.cast<Complex>());
    rho = unitaries_[k] * rho * unitaries_[k].adjoint();
    rho = rho.cwiseProduct(half_damp.cast<Complex>());
    if (check_stride > 0 && (k + 1) % static_cast<std::size_t>(check_stride) == 0) check();
  }
  check();
  out.final_state = rho;
  out.purity_final = (rho * rho).trace().real();
  out.fidelity = std::clamp((target.adjoint() * rho * target)(0, 0).real(), 0.0, 1.0);
  return out;
}

PreparationResult simulate_preparation(PreparationInput input, const SweepSpec& sweep, const DephasingRates& rates,
                                       const SpinParams& params, const UnitSystem& units) {
  const DensityMatrix rho0 = pure_state(preparation_initial(input));
  const SpinVector target = preparation_target(input);
  SweepSpec spec = sweep;
  for (int attempt = 0; attempt < 2; ++attempt) {
    SweepSpec fine = spec;
    fine.steps = 2 * spec.steps;
    const auto coarse = PreparationPropagator(spec, params, units).run(rho0, target, rates);
    const auto refined = PreparationPropagator(fine, params, units).run(rho0, target, rates);
    if (coarse.max_trace_drift > 1e-6 || refined.max_trace_drift > 1e-6) {
      spec.steps *= 2;
      continue;
    }
    if (std::abs(coarse.fidelity - refined.fidelity) >= 1e-4) {
      throw NumericalError("spin sweep not converged in the step size: fidelity changes by " +
                           std::to_string(std::abs(coarse.fidelity - refined.fidelity)) +
                           " when the step is halved; raise the step count");
    }
    return {coarse.fidelity, refined.fidelity, coarse};
  }
  throw NumericalError("density-matrix trace drifted above 1e-6 even after step refinement");
}

std::string_view to_string(RabiConvention c) { return c == RabiConvention::kRotating ? "rotating" : "linear"; }

RabiConvention parse_rabi_convention(std::string_view text) {
  if (text == "rotating") return RabiConvention::kRotating;
  if (text == "linear") return RabiConvention::kLinear;
  throw std::invalid_argument("unknown Rabi convention '" + std::string(text) + "'");
}

EsrResult esr_flip_time(double B_ac_T, const SpinParams& p, const UnitSystem& units, RabiConvention convention,
                        double selectivity_ratio) {
  if (!(B_ac_T > 0.0)) throw std::invalid_argument("B_ac must be > 0");
  if (!(selectivity_ratio > 0.0)) throw std::invalid_argument("selectivity ratio must be > 0");
  p.validate();
  const double factor = convention == RabiConvention::kRotating ? 1.0 : 0.5;
  EsrResult out;
  out.rabi_energy_meV = factor * p.g_e * p.mu_B * B_ac_T;
  out.t_flip_us = std::numbers::pi * units.hbar_meV_ps / out.rabi_energy_meV * 1e-6;
  out.max_selective_Bac_T = 4.0 * p.A_meV / selectivity_ratio / (factor * p.g_e * p.mu_B);
  return out;
}

ZeemanBookkeeping zeeman_bookkeeping(const SpinParams& p) {
  p.validate();
  const SpinMatrix H = build_spin_hamiltonian(0.0, p);
  // Secular (diagonal) energy of flipping electron 1 from down to up.
  const auto flip = [&](int n1) { return H(spin_index(0, 1, n1, 1), spin_index(0, 1, n1, 1)) -
                                         H(spin_index(1, 1, n1, 1), spin_index(1, 1, n1, 1)); };
  ZeemanBookkeeping out;
  out.electron_flip_gap = p.electron_zeeman();
  out.half_quantum = 0.5 * p.electron_zeeman();
  out.hyperfine_split = flip(0) - flip(1);
  out.hyperfine_split_formula = 4.0 * p.A_meV;
  return out;
}

}  // namespace donor
