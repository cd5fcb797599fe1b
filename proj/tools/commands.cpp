#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <stdexcept>

#include "donor/dynamics.hpp"
#include "donor/optimize.hpp"
#include "donor/parameter_cache.hpp"
#include "donor/spectrum.hpp"
#include "donor/spin_prep.hpp"
#include "donor/tunnel.hpp"

namespace donor::cli {

namespace {

using nlohmann::json;

std::string num(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.10g", v);
  return b;
}

/// CSV with '#' header comments; bodies depend only on the configuration.
class CsvWriter {
 public:
  CsvWriter(const RunContext& ctx, const std::string& name, const std::string& artifact,
            const std::vector<std::string>& comments, const std::vector<std::string>& columns)
      : path_(ctx.config.output_dir / name) {
    std::filesystem::create_directories(ctx.config.output_dir);
    out_.open(path_);
    if (!out_) throw std::runtime_error("cannot write " + path_.string());
    out_ << "# artifact: " << artifact << "\n# config_hash: " << ctx.config_hash << '\n';
    for (const auto& c : comments) out_ << "# " << c << '\n';
    for (std::size_t k = 0; k < columns.size(); ++k) out_ << (k ? "," : "") << columns[k];
    out_ << '\n';
  }

  void row(const std::vector<std::string>& cells) {
    for (std::size_t k = 0; k < cells.size(); ++k) out_ << (k ? "," : "") << cells[k];
    out_ << '\n';
  }

  [[nodiscard]] std::string path() const { return path_.string(); }

 private:
  std::filesystem::path path_;
  std::ofstream out_;
};

Check band(const std::string& name, double value, double lo, double hi) {
  return {name, value, lo, hi, value >= lo && value <= hi};
}

Check relative_band(const std::string& name, double value, double reference, double tolerance) {
  return band(name, value, reference * (1.0 - tolerance), reference * (1.0 + tolerance));
}

Check truth(const std::string& name, bool ok) { return {name, ok ? 1.0 : 0.0, 1.0, 1.0, ok}; }

std::string R_label(double R, const UnitSystem& u) {
  char b[32];
  std::snprintf(b, sizeof b, "R%gnm", R * u.bohr_radius_nm);
  return b;
}

struct ModelStore {
  explicit ModelStore(const ExperimentConfig& c)
      : config(c), cache(c.cache_path.empty() ? ParameterCache{} : ParameterCache(c.cache_path)) {}

  const DonorPairModel& get(double R) {
    auto it = models.find(R);
    if (it == models.end()) it = models.emplace(R, build_donor_pair_model(R, config.budget, &cache)).first;
    return it->second;
  }

  const ExperimentConfig& config;
  ParameterCache cache;
  std::map<double, DonorPairModel> models;
};

/// Reference values keyed by separation in aB.
struct Table1Reference {
  double F_c, F_ad, F_star;
};

const Table1Reference* table1_reference(double R) {
  static const Table1Reference r10{0.0737, 0.1740, 0.0087};
  static const Table1Reference r15{0.0540, 0.0630, 0.0058};
  if (std::abs(R - 10.0) < 1e-9) return &r10;
  if (std::abs(R - 15.0) < 1e-9) return &r15;
  return nullptr;
}

json model_json(const DonorPairModel& m) {
  return {{"R_aB", m.R},
          {"LL", {{"alpha", m.ll.params.alpha}, {"beta", m.ll.params.beta}, {"lambda", m.ll.params.lambda},
                  {"energy_Ry", m.ll.energy}, {"std_error_Ry", m.ll.std_error}, {"converged", m.ll.converged}}},
          {"LR", {{"alpha", m.lr.params.alpha}, {"beta", m.lr.params.beta}, {"energy_Ry", m.lr.energy},
                  {"std_error_Ry", m.lr.std_error}, {"converged", m.lr.converged}}},
          {"matrix_elements", m.me}};
}

}  // namespace

bool CommandOutcome::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return true;
}

CommandOutcome run_table1(const RunContext& ctx) {
  const auto& c = ctx.config;
  ModelStore store(c);
  CommandOutcome out;
  CsvWriter csv(ctx, "table1.csv", "table1 critical fields",
                {"fields in Ry/aB; F0_star solves dwell(E_bind(F), F) = target_dwell self-consistently",
                 "basis treatment: " + std::string(to_string(c.budget.treatment)),
                 "barrier Z_b " + num(c.barrier.Z_b) + ", attempt mode " + std::string(to_string(c.barrier.attempt_mode))},
                {"R_nm", "R_aB", "F0_c", "F0_ad", "F0_star", "E_bind_at_F0_star_meV", "min_gap_meV", "ref_F0_c",
                 "ref_F0_ad", "ref_F0_star"});

  const double isolated_star = critical_field(c.isolated_binding_Ry, c.target_dwell_s, c.barrier).field;
  json rows = json::array();
  std::vector<double> fc_list, fad_list, fstar_list;
  for (double R : c.separations) {
    const DonorPairModel& m = store.get(R);
    const std::string tag = R_label(R, c.units);
    const CrossingResult cross = find_crossing(m.hamiltonian);
    if (!cross.in_range) throw NumericalError("no interior level crossing found for " + tag);
    const AdiabaticResult ad = find_adiabatic_field(m.hamiltonian, cross.field);
    if (!ad.in_range) throw NumericalError("adiabatic threshold not reached for " + tag);
    const auto binding_at = [&](double f) { return single_electron_binding(m, f, c.budget.optimizer).binding; };
    const CriticalFieldResult star =
        critical_field_self_consistent(binding_at, c.target_dwell_s, c.barrier, 0.5 * isolated_star + 0.005);
    if (!star.reachable) throw NumericalError("critical field not bracketed for " + tag);
    const double e_star = binding_at(star.field);

    // Sensitivity of the fixed-parameter treatment: re-optimize LL at F0_c.
    OptimizationResult reopt = optimize_cached(TrialKind::kLL, R, cross.field, c.budget.optimizer, &store.cache);
    const EnergyEstimate fixed = estimate_energy(TrialWavefunction(TrialKind::kLL, m.ll.params, R), cross.field,
                                                 c.budget.optimizer.eval_samples, c.budget.optimizer.seed);

    // Near-crossing dwell at 0.040 Ry/aB with the binding at that field.
    const double near_field = 0.040;
    const double e_near = binding_at(near_field);
    const DwellResult near = e_near > 0.0 ? wkb_dwell_time(e_near, near_field, c.barrier) : DwellResult{};

    const auto* ref = table1_reference(R);
    csv.row({num(R * c.units.bohr_radius_nm), num(R), num(cross.field), num(ad.field), num(star.field),
             num(e_star * c.units.rydberg_meV), num(cross.min_gap * c.units.rydberg_meV),
             ref ? num(ref->F_c) : "", ref ? num(ref->F_ad) : "", ref ? num(ref->F_star) : ""});
    rows.push_back({{"R_aB", R},
                    {"R_nm", R * c.units.bohr_radius_nm},
                    {"F0_c", cross.field},
                    {"min_gap_meV", cross.min_gap * c.units.rydberg_meV},
                    {"F0_ad", ad.field},
                    {"F0_star", star.field},
                    {"E_bind_at_F0_star_Ry", e_star},
                    {"E_bind_zero_field_Ry", binding_at(0.0)},
                    {"near_crossing", {{"F0", near_field}, {"E_bind_Ry", e_near}, {"dwell_time_s", near.dwell_time_s},
                                       {"regime", std::string(to_string(near.regime))}}},
                    {"reoptimized_at_F0_c",
                     {{"fixed_params_energy_Ry", fixed.energy}, {"reoptimized_energy_Ry", reopt.energy},
                      {"shift_meV", (reopt.energy - fixed.energy) * c.units.rydberg_meV},
                      {"alpha", reopt.params.alpha}, {"beta", reopt.params.beta}, {"lambda", reopt.params.lambda}}},
                    {"model", model_json(m)},
                    {"reference", ref ? json{{"F0_c", ref->F_c}, {"F0_ad", ref->F_ad}, {"F0_star", ref->F_star}}
                                      : json(nullptr)}});
    if (ref) {
      out.checks.push_back(relative_band("F0_c " + tag, cross.field, ref->F_c, 0.25));
      out.checks.push_back(relative_band("F0_ad " + tag, ad.field, ref->F_ad, 0.30));
      out.checks.push_back(relative_band("F0_star " + tag, star.field, ref->F_star, 0.40));
    }
    out.checks.push_back(truth("ordering F0_ad > F0_c > F0_star " + tag, ad.field > cross.field && cross.field > star.field));
    out.checks.push_back(band("ratio F0_ad/F0_star " + tag, ad.field / star.field, 5.0, INFINITY));
    out.checks.push_back(band("ratio F0_star/F0_star[D-] " + tag, star.field / isolated_star, 10.0, INFINITY));
    if (std::abs(R - 15.0) < 1e-9) {
      out.checks.push_back(band("dwell at F0=0.040 " + tag + " (s)", near.dwell_time_s, 0.0, 1e-12));
    }
    fc_list.push_back(cross.field);
    fad_list.push_back(ad.field);
    fstar_list.push_back(star.field);
  }
  for (std::size_t k = 1; k < c.separations.size(); ++k) {
    if (c.separations[k] <= c.separations[k - 1]) continue;
    const std::string pair = R_label(c.separations[k - 1], c.units) + "->" + R_label(c.separations[k], c.units);
    out.checks.push_back(truth("F0_c decreases " + pair, fc_list[k] < fc_list[k - 1]));
    out.checks.push_back(truth("F0_ad decreases " + pair, fad_list[k] < fad_list[k - 1]));
    out.checks.push_back(truth("F0_star decreases " + pair, fstar_list[k] < fstar_list[k - 1]));
  }
  out.summary["rows"] = rows;
  out.summary["isolated_D_minus_F0_star"] = isolated_star;
  out.files.push_back(csv.path());
  return out;
}

CommandOutcome run_fig2(const RunContext& ctx) {
  const auto& c = ctx.config;
  ModelStore store(c);
  CommandOutcome out;
  std::vector<double> grid;
  for (int k = 0; k * c.spectrum_step <= c.spectrum_max_field + 1e-12; ++k) grid.push_back(k * c.spectrum_step);
  json rows = json::array();
  for (double R : c.separations) {
    const DonorPairModel& m = store.get(R);
    const SpectrumCurve curve = levels_vs_field(m, grid);
    CsvWriter csv(ctx, "fig2_" + R_label(R, c.units) + ".csv", "fig2 level diagram " + R_label(R, c.units),
                  {"energies in Ry, ascending; ground_LL_weight in the orthonormal frame",
                   "zero-field LL/RR splitting is below Monte-Carlo resolution and is not resolved"},
                  {"F0_Ry_per_aB", "E1_Ry", "E2_Ry", "E3_Ry", "ground_LL_weight", "gap_meV", "band_flag"});
    for (const auto& p : curve.points) {
      const double gap = p.gap * c.units.rydberg_meV;
      csv.row({num(p.field), num(p.energies(0)), num(p.energies(1)), num(p.energies(2)), num(p.ground_ll_weight),
               num(gap), std::string(to_string(classify_gap(gap, c.levels)))});
    }
    out.files.push_back(csv.path());
    const auto& first = curve.points.front();
    const auto& last = curve.points.back();
    rows.push_back({{"R_aB", R}, {"ground_LL_weight_at_zero", first.ground_ll_weight},
                    {"ground_LL_weight_at_max", last.ground_ll_weight}});
    out.checks.push_back(band("ground LL weight at F0=0 " + R_label(R, c.units), first.ground_ll_weight, 0.0, 0.1));
  }
  out.summary["curves"] = rows;
  return out;
}

CommandOutcome run_fig3(const RunContext& ctx) {
  const auto& c = ctx.config;
  ModelStore store(c);
  CommandOutcome out;
  json curves = json::array();
  for (double R : c.separations) {
    const DonorPairModel& m = store.get(R);
    const CrossingResult cross = find_crossing(m.hamiltonian);
    std::vector<double> grid;
    for (int k = 0; k * c.spectrum_step < cross.field; ++k) grid.push_back(k * c.spectrum_step);
    const auto curve = transition_gap_curve(m.hamiltonian, grid, c.levels, c.units);
    CsvWriter csv(ctx, "fig3_" + R_label(R, c.units) + ".csv", "fig3 transition gap " + R_label(R, c.units),
                  {"single-donor lines (configured inputs): 1s-2p0 " + num(c.levels.transition_1s_2p0) +
                   " meV, 1s-2p+- " + num(c.levels.transition_1s_2ppm) + " meV",
                   "grid covers [0, F0_c) with F0_c = " + num(cross.field) + " Ry/aB"},
                  {"F0_Ry_per_aB", "gap_meV", "band_flag"});
    std::map<std::string, int> counts;
    for (const auto& g : curve) {
      csv.row({num(g.field), num(g.gap_meV), std::string(to_string(g.band))});
      ++counts[std::string(to_string(g.band))];
    }
    out.files.push_back(csv.path());
    json fractions;
    for (const auto& [k, v] : counts) fractions[k] = static_cast<double>(v) / static_cast<double>(curve.size());
    curves.push_back({{"R_aB", R}, {"F0_c", cross.field}, {"band_fractions", fractions}});
  }
  out.summary["curves"] = curves;

  std::vector<double> gaps;
  CsvWriter ext(ctx, "fig3_gap_extrapolation.csv", "fig3 zero-field gap extrapolation",
                {"fit gap(R) = c0 + c1 / R over the listed separations; last row is the extrapolated target"},
                {"R_aB", "R_nm", "gap_meV", "extrapolated"});
  for (double R : c.gap_fit_separations) {
    const double g = spectrum_at(store.get(R).hamiltonian, 0.0).gap * c.units.rydberg_meV;
    gaps.push_back(g);
    ext.row({num(R), num(R * c.units.bohr_radius_nm), num(g), "0"});
  }
  const GapExtrapolation fit = extrapolate_zero_field_gap(c.gap_fit_separations, gaps, c.gap_target_R);
  ext.row({num(c.gap_target_R), num(c.gap_target_R * c.units.bohr_radius_nm), num(fit.value), "1"});
  out.files.push_back(ext.path());
  out.summary["zero_field_gap"] = {{"target_R_aB", c.gap_target_R}, {"gap_meV", fit.value}, {"c0_meV", fit.c0},
                                   {"c1_meV_aB", fit.c1}, {"reference_meV", c.gap_reference_meV}};
  out.checks.push_back(relative_band("zero-field gap at " + R_label(c.gap_target_R, c.units) + " (meV)", fit.value,
                                     c.gap_reference_meV, 0.30));
  return out;
}

CommandOutcome run_fig4(const RunContext& ctx) {
  const auto& c = ctx.config;
  ModelStore store(c);
  CommandOutcome out;
  const DonorPairModel& m = store.get(c.drive_R);
  const TransferResult tr = resonant_transfer(m.hamiltonian, c.drive_F0, c.drive_F1, c.units, c.transfer);
  CsvWriter csv(ctx, "fig4_transfer.csv", "fig4 resonant transfer " + R_label(c.drive_R, c.units),
                {"F0 " + num(c.drive_F0) + " Ry/aB, F1 " + num(c.drive_F1) + " Ry/aB, omega " + num(tr.omega) +
                     " rad/ps (dressed gap at F0)",
                 "drive on at " + num(c.transfer.t_on_ps) + " ps, off at " + num(tr.switch_off_ps) +
                     " ps; DC field kept on",
                 "matrix-element seed " + std::to_string(m.me.seed) + ", samples " + std::to_string(m.me.n_samples)},
                {"t_ps", "P_LR", "P_LL", "P_third", "norm"});
  const auto& t = tr.trajectory;
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    csv.row({num(t.times[k]), num(t.populations[k](kIndexLR)), num(t.populations[k](kIndexLL)),
             num(t.populations[k](kIndexRR)), num(t.norm[k])});
  }
  out.files.push_back(csv.path());

  // Guard: the DC field must stay below the ionization critical field.
  const BindingResult bind = single_electron_binding(m, c.drive_F0, c.budget.optimizer);
  const DwellResult dwell = bind.bound && c.drive_F0 > 0.0 ? wkb_dwell_time(bind.binding, c.drive_F0, c.barrier)
                                                           : DwellResult{};
  if (dwell.regime == Regime::kOverBarrier || dwell.dwell_time_s < c.target_dwell_s) {
    std::fprintf(stderr, "warning: F0 = %g Ry/aB exceeds the D+D- critical field (dwell %g s)\n", c.drive_F0,
                 dwell.dwell_time_s);
  }
  out.summary = {{"R_aB", c.drive_R},
                 {"F0", c.drive_F0},
                 {"F1", c.drive_F1},
                 {"omega_rad_per_ps", tr.omega},
                 {"omega_choice", "dressed gap at F0"},
                 {"gap_meV", tr.gap * c.units.rydberg_meV},
                 {"rabi_time_ps", tr.rabi_time_ps},
                 {"analytic_rabi_ps", tr.analytic_rabi_ps},
                 {"switch_off_ps", tr.switch_off_ps},
                 {"min_P_LR", tr.min_p_lr},
                 {"hold_drift", tr.hold_drift},
                 {"norm_drift", t.max_norm_drift()},
                 {"complete", tr.complete},
                 {"reference_rabi_ps", 98.0},
                 {"dc_dwell_time_s", dwell.dwell_time_s},
                 {"photo_ionisation_ratio", "not computed; choose F1 so that photo-ionisation is much slower than the "
                                            "Rabi transfer"}};
  out.checks.push_back(truth("transfer complete (P_LR < threshold)", tr.complete));
  out.checks.push_back(band("transfer time (ps)", tr.rabi_time_ps, 49.0, 196.0));
  out.checks.push_back(band("hold drift over " + num(c.transfer.hold_ps) + " ps", tr.hold_drift, 0.0, 1e-3));
  return out;
}

constexpr double kDominanceRatio = 10.0;

CommandOutcome run_fig5(const RunContext& ctx) {
  const auto& c = ctx.config;
  CommandOutcome out;
  const PreparationPropagator prop(c.sweep, c.spin, c.units);

  CsvWriter zero(ctx, "fig5_zero_dephasing.csv", "fig5 readout preparation without dephasing",
                 {"sweep J " + num(c.sweep.J_start) + " -> " + num(c.sweep.J_end) + " meV over " +
                  num(c.sweep.duration_us) + " us, " + std::to_string(c.sweep.steps) + " steps"},
                 {"input_state_label", "fidelity", "fidelity_half_step"});
  json zero_json;
  for (auto in : kAllInputs) {
    const PreparationResult r = simulate_preparation(in, c.sweep, {}, c.spin, c.units);
    const std::string label(to_string(in));
    zero.row({label, num(r.fidelity), num(r.fidelity_half_step)});
    zero_json[label] = r.fidelity;
    out.checks.push_back(band("zero-dephasing fidelity " + label, r.fidelity, 0.99, 1.0));
  }
  out.files.push_back(zero.path());

  CsvWriter csv(ctx, "fig5_fidelity.csv", "fig5 preparation fidelity vs dephasing",
                {"Lindblad sigma_z dephasing on every spin, rate 1/(2 t)",
                 "inputs 10/01 are the exchange-even/odd nuclear pairs"},
                {"t_e_s", "t_n_s", "input_state_label", "fidelity"});
  CsvWriter dom(ctx, "fig5_dominance.csv", "fig5 dephasing dominance",
                {"F_te_reduced uses t_e/10, F_tn_reduced uses t_n/10 at the same grid point"},
                {"t_e_s", "t_n_s", "input_state_label", "F_te_reduced", "F_tn_reduced"});
  bool in_unit = true, dominance_odd = true, dominance_avg = true;
  int violations_even = 0, violations_outside = 0;
  for (double te : c.t_e_grid_s) {
    for (double tn : c.t_n_grid_s) {
      double avg_e = 0.0, avg_n = 0.0;
      for (auto in : kAllInputs) {
        const auto rho0 = pure_state(preparation_initial(in));
        const auto target = preparation_target(in);
        const double f = prop.run(rho0, target, {te, tn}).fidelity;
        const double fe = prop.run(rho0, target, {te / 10.0, tn}).fidelity;
        const double fn = prop.run(rho0, target, {te, tn / 10.0}).fidelity;
        const std::string label(to_string(in));
        csv.row({num(te), num(tn), label, num(f)});
        dom.row({num(te), num(tn), label, num(fe), num(fn)});
        in_unit = in_unit && f >= 0.0 && f <= 1.0;
        avg_e += fe / 4.0;
        avg_n += fn / 4.0;
        // Dominance is asserted where nuclear coherence outlives the electrons'.
        if (tn < kDominanceRatio * te) {
          if (fe >= fn) ++violations_outside;
        } else if (in == PreparationInput::k01 || in == PreparationInput::k00) {
          dominance_odd = dominance_odd && fe < fn;
        } else if (fe > fn + 1e-12) {
          ++violations_even;
        }
      }
      if (tn >= kDominanceRatio * te) dominance_avg = dominance_avg && avg_e < avg_n;
    }
  }
  out.files.push_back(csv.path());
  out.files.push_back(dom.path());
  out.summary = {{"zero_dephasing_fidelity", zero_json},
                 {"t_e_grid_s", c.t_e_grid_s},
                 {"t_n_grid_s", c.t_n_grid_s},
                 {"dephasing_normalization", "L = sigma_z, gamma = 1/(2 t)"},
                 {"dominance_regime", "t_n >= 10 t_e"},
                 {"dominance_violations_inputs_11_10", violations_even},
                 {"dominance_violations_outside_regime", violations_outside}};
  out.checks.push_back(truth("fidelity within [0, 1] on the grid", in_unit));
  out.checks.push_back(truth("electron dephasing dominates (inputs 01, 00)", dominance_odd));
  out.checks.push_back(truth("electron dephasing dominates (input average)", dominance_avg));
  return out;
}

CommandOutcome run_wkb(const RunContext& ctx) {
  const auto& c = ctx.config;
  CommandOutcome out;
  const double e = c.isolated_binding_Ry;
  const CriticalFieldResult star = critical_field(e, c.target_dwell_s, c.barrier);
  std::vector<double> fields = c.wkb_fields;
  if (fields.empty()) {
    const double lo = 0.3 * star.field, hi = 1.2 * star.threshold_field;
    for (int k = 0; k < 60; ++k) fields.push_back(lo * std::pow(hi / lo, k / 59.0));
  }
  CsvWriter csv(ctx, "wkb_isolated.csv", "wkb isolated D- dwell time",
                {"barrier V = -2 Z_b / x - F x with Z_b " + num(c.barrier.Z_b) + "; attempt mode " +
                     std::string(to_string(c.barrier.attempt_mode)),
                 "E_bind " + num(e * c.units.rydberg_meV) + " meV; transverse-momentum corrections not included"},
                {"F0", "E_bind_meV", "transmission", "dwell_time_s", "regime"});
  for (double f : fields) {
    const DwellResult r = wkb_dwell_time(e, f, c.barrier);
    csv.row({num(f), num(e * c.units.rydberg_meV), num(r.transmission), num(r.dwell_time_s),
             std::string(to_string(r.regime))});
  }
  out.files.push_back(csv.path());

  // Attempt-frequency sensitivity over three decades either side.
  json sensitivity = json::array();
  const double nu = c.barrier.attempt_frequency_per_ps(e);
  for (double scale : {1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3}) {
    BarrierModel fixed = c.barrier;
    fixed.attempt_mode = AttemptMode::kFixed;
    fixed.fixed_attempt_THz = nu * scale;
    const auto r = critical_field(e, c.target_dwell_s, fixed);
    sensitivity.push_back({{"attempt_THz", nu * scale}, {"F0_star", r.reachable ? json(r.field) : json(nullptr)}});
  }
  out.summary = {{"E_bind_meV", e * c.units.rydberg_meV},
                 {"target_dwell_s", c.target_dwell_s},
                 {"F0_star", star.field},
                 {"reachable", star.reachable},
                 {"threshold_field", star.threshold_field},
                 {"Z_b", c.barrier.Z_b},
                 {"attempt_mode", std::string(to_string(c.barrier.attempt_mode))},
                 {"attempt_THz", nu},
                 {"attempt_sensitivity", sensitivity},
                 {"reference_F0_star", 0.00037}};
  out.checks.push_back(band("F0_star[D-] (Ry/aB)", star.field, 0.00025, 0.00055));
  return out;
}

CommandOutcome run_esr(const RunContext& ctx) {
  const auto& c = ctx.config;
  CommandOutcome out;
  const EsrResult esr = esr_flip_time(c.B_ac_T, c.spin, c.units, c.rabi_convention, c.selectivity_ratio);
  const JcResult jc = find_jc(c.spin);
  SpinParams doubled = c.spin;
  doubled.B_T *= 2.0;
  const JcResult jc2 = find_jc(doubled);
  const ZeemanBookkeeping z = zeeman_bookkeeping(c.spin);
  CsvWriter csv(ctx, "esr.csv", "esr flip time",
                {"rotating: hbar Omega = g mu_B B_ac; linear: half of that",
                 "selective bound keeps hbar Omega below 4A / " + num(c.selectivity_ratio)},
                {"B_ac_T", "t_flip_us_rotating", "t_flip_us_linear"});
  for (double s : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    const double b = c.B_ac_T * s;
    csv.row({num(b), num(esr_flip_time(b, c.spin, c.units, RabiConvention::kRotating).t_flip_us),
             num(esr_flip_time(b, c.spin, c.units, RabiConvention::kLinear).t_flip_us)});
  }
  out.files.push_back(csv.path());
  out.summary = {{"B_ac_T", c.B_ac_T},
                 {"convention", std::string(to_string(c.rabi_convention))},
                 {"t_flip_us", esr.t_flip_us},
                 {"max_selective_B_ac_T", esr.max_selective_Bac_T},
                 {"selective", c.B_ac_T <= esr.max_selective_Bac_T},
                 {"J_c_meV", jc.J_c},
                 {"J_c_min_gap_meV", jc.min_gap},
                 {"J_c_doubled_B_meV", jc2.J_c},
                 {"zeeman",
                  {{"electron_flip_gap_meV", z.electron_flip_gap}, {"half_quantum_meV", z.half_quantum},
                   {"hyperfine_split_meV", z.hyperfine_split}, {"four_A_meV", z.hyperfine_split_formula}}},
                 {"reference_t_flip_us", 0.17},
                 {"reference_J_c_meV", 0.058}};
  out.checks.push_back(band("ESR flip time (us)", esr.t_flip_us, 0.15, 0.20));
  out.checks.push_back(relative_band("J_c (meV)", jc.J_c, 0.058, 0.02));
  return out;
}

std::string write_summary(const RunContext& ctx, const std::string& command, CommandOutcome& outcome) {
  json checks = json::array();
  for (const auto& c : outcome.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"lo", c.lo}, {"hi", std::isfinite(c.hi) ? json(c.hi) : json("inf")},
                      {"pass", c.pass}});
  }
  const json doc = {{"schema_version", kSchemaVersion},
                    {"command", command},
                    {"config_hash", ctx.config_hash},
                    {"inputs", describe(ctx.config)},
                    {"results", outcome.summary},
                    {"checks", checks},
                    {"pass", outcome.all_pass()},
                    {"files", outcome.files}};
  std::filesystem::create_directories(ctx.config.output_dir);
  const auto path = ctx.config.output_dir / (command + "_summary.json");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  return path.string();
}

}  // namespace donor::cli
