#include "donor/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace donor {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"units", {"bohr_radius", "rydberg", "effective_mass_ratio", "hbar", "temperature"}},
      {"geometry", {"R", "gap_fit_R", "gap_target_R", "gap_reference"}},
      {"mc",
       {"samples", "seed", "shards", "threads", "optimizer_samples", "optimizer_eval_samples", "optimizer_seed",
        "optimizer_iterations", "basis", "cache"}},
      {"spectrum", {"max_field", "step", "line_1s_2p0", "line_1s_2ppm"}},
      {"barrier", {"Z_b", "attempt", "fixed_attempt_THz", "target_dwell", "isolated_binding", "fields"}},
      {"drive", {"R", "F0", "F1", "t_on", "hold", "steps_per_period", "threshold"}},
      {"spin",
       {"B", "g_e", "mu_B_meV_per_T", "g_n_mu_n_meV_per_T", "A", "J_start", "J_end", "duration", "steps", "t_e_grid",
        "t_n_grid", "B_ac", "rabi_convention", "selectivity_ratio"}},
      {"output", {"dir"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return {};
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

class Reader {
 public:
  explicit Reader(const pt::ptree& tree) : tree_(tree) {}

  [[nodiscard]] const std::string* raw(const std::string& section, const std::string& key) const {
    const auto sec = tree_.find(section);
    if (sec == tree_.not_found()) return nullptr;
    const auto it = sec->second.find(key);
    if (it == sec->second.not_found()) return nullptr;
    return &it->second.data();
  }

  void number(const std::string& section, const std::string& key, double& out) const {
    if (const auto* s = raw(section, key)) out = parse_number(section + "." + key, trim(*s));
  }

  template <typename Int>
  void integer(const std::string& section, const std::string& key, Int& out) const {
    const auto* s = raw(section, key);
    if (s == nullptr) return;
    const std::string text = trim(*s);
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw ConfigError(section + "." + key, "expected an integer, got '" + text + "'");
    }
    out = v;
  }

  /// Quantity with a mandatory unit suffix, converted to `target`.
  void quantity(const std::string& section, const std::string& key, Unit target, const UnitSystem& units,
                double& out) const {
    if (const auto* s = raw(section, key)) out = parse_q(section + "." + key, trim(*s), target, units);
  }

  void quantity_list(const std::string& section, const std::string& key, Unit target, const UnitSystem& units,
                     std::vector<double>& out) const {
    const auto* s = raw(section, key);
    if (s == nullptr) return;
    out.clear();
    std::stringstream ss(*s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_q(section + "." + key, trim(item), target, units));
    if (out.empty()) throw ConfigError(section + "." + key, "empty list");
  }

  void text(const std::string& section, const std::string& key, std::string& out) const {
    if (const auto* s = raw(section, key)) out = trim(*s);
  }

 private:
  static double parse_number(const std::string& field, const std::string& text) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
      throw ConfigError(field, "expected a number, got '" + text + "'");
    }
    return v;
  }

  static double parse_q(const std::string& field, const std::string& text, Unit target, const UnitSystem& units) {
    Quantity q;
    try {
      q = parse_quantity(text);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field, std::string(e.what()) + " (physical values need a unit, e.g. '" + "1 " +
                                   std::string(unit_symbol(target)) + "')");
    }
    try {
      return convert(q.value, q.unit, target, units);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(field, e.what());
    }
  }

  const pt::ptree& tree_;
};

void check_keys(const pt::ptree& tree) {
  const auto& keys = known_keys();
  for (const auto& [section, body] : tree) {
    const auto sec = keys.find(section);
    if (sec == keys.end()) throw ConfigError(section, "unknown section");
    for (const auto& [key, value] : body) {
      if (!sec->second.contains(key)) throw ConfigError(section + "." + key, "unknown key");
    }
  }
}

ExperimentConfig from_tree(const pt::ptree& tree) {
  check_keys(tree);
  const Reader r(tree);
  ExperimentConfig c;

  r.quantity("units", "bohr_radius", Unit::kNanometre, c.units, c.units.bohr_radius_nm);
  r.quantity("units", "rydberg", Unit::kMilliElectronVolt, c.units, c.units.rydberg_meV);
  r.number("units", "effective_mass_ratio", c.units.effective_mass_ratio);
  r.quantity("units", "hbar", Unit::kMilliElectronVoltPicosecond, c.units, c.units.hbar_meV_ps);
  r.quantity("units", "temperature", Unit::kMilliKelvin, c.units, c.units.temperature_mK);
  try {
    c.units.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("units", e.what());
  }
  const UnitSystem& u = c.units;
  c.isolated_binding_Ry = 1.7 / u.rydberg_meV;
  c.barrier.units = u;

  r.quantity_list("geometry", "R", Unit::kBohr, u, c.separations);
  r.quantity_list("geometry", "gap_fit_R", Unit::kBohr, u, c.gap_fit_separations);
  r.quantity("geometry", "gap_target_R", Unit::kBohr, u, c.gap_target_R);
  r.quantity("geometry", "gap_reference", Unit::kMilliElectronVolt, u, c.gap_reference_meV);

  r.integer("mc", "samples", c.budget.mc_samples);
  r.integer("mc", "seed", c.budget.seed);
  r.integer("mc", "shards", c.budget.mc.shards);
  r.integer("mc", "threads", c.budget.mc.threads);
  r.integer("mc", "optimizer_samples", c.budget.optimizer.samples);
  r.integer("mc", "optimizer_eval_samples", c.budget.optimizer.eval_samples);
  r.integer("mc", "optimizer_seed", c.budget.optimizer.seed);
  r.integer("mc", "optimizer_iterations", c.budget.optimizer.max_iterations);
  std::string text;
  r.text("mc", "basis", text);
  if (!text.empty()) {
    try {
      c.budget.treatment = parse_basis_treatment(text);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("mc.basis", e.what());
    }
  }
  text.clear();
  r.text("mc", "cache", text);
  c.cache_path = text;

  r.quantity("spectrum", "max_field", Unit::kRydbergPerBohr, u, c.spectrum_max_field);
  r.quantity("spectrum", "step", Unit::kRydbergPerBohr, u, c.spectrum_step);
  r.quantity("spectrum", "line_1s_2p0", Unit::kMilliElectronVolt, u, c.levels.transition_1s_2p0);
  r.quantity("spectrum", "line_1s_2ppm", Unit::kMilliElectronVolt, u, c.levels.transition_1s_2ppm);

  r.number("barrier", "Z_b", c.barrier.Z_b);
  text.clear();
  r.text("barrier", "attempt", text);
  if (!text.empty()) {
    try {
      c.barrier.attempt_mode = parse_attempt_mode(text);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("barrier.attempt", e.what());
    }
  }
  r.number("barrier", "fixed_attempt_THz", c.barrier.fixed_attempt_THz);
  r.quantity("barrier", "target_dwell", Unit::kSecond, u, c.target_dwell_s);
  r.quantity("barrier", "isolated_binding", Unit::kRydberg, u, c.isolated_binding_Ry);
  r.quantity_list("barrier", "fields", Unit::kRydbergPerBohr, u, c.wkb_fields);

  r.quantity("drive", "R", Unit::kBohr, u, c.drive_R);
  r.quantity("drive", "F0", Unit::kRydbergPerBohr, u, c.drive_F0);
  r.quantity("drive", "F1", Unit::kRydbergPerBohr, u, c.drive_F1);
  r.quantity("drive", "t_on", Unit::kPicosecond, u, c.transfer.t_on_ps);
  r.quantity("drive", "hold", Unit::kPicosecond, u, c.transfer.hold_ps);
  r.number("drive", "steps_per_period", c.transfer.steps_per_period);
  r.number("drive", "threshold", c.transfer.completion_threshold);

  r.quantity("spin", "B", Unit::kTesla, u, c.spin.B_T);
  r.number("spin", "g_e", c.spin.g_e);
  r.number("spin", "mu_B_meV_per_T", c.spin.mu_B);
  r.number("spin", "g_n_mu_n_meV_per_T", c.spin.g_n_mu_n);
  r.quantity("spin", "A", Unit::kMilliElectronVolt, u, c.spin.A_meV);
  r.quantity("spin", "J_start", Unit::kMilliElectronVolt, u, c.sweep.J_start);
  r.quantity("spin", "J_end", Unit::kMilliElectronVolt, u, c.sweep.J_end);
  r.quantity("spin", "duration", Unit::kMicrosecond, u, c.sweep.duration_us);
  r.integer("spin", "steps", c.sweep.steps);
  r.quantity_list("spin", "t_e_grid", Unit::kSecond, u, c.t_e_grid_s);
  r.quantity_list("spin", "t_n_grid", Unit::kSecond, u, c.t_n_grid_s);
  r.quantity("spin", "B_ac", Unit::kTesla, u, c.B_ac_T);
  text.clear();
  r.text("spin", "rabi_convention", text);
  if (!text.empty()) {
    try {
      c.rabi_convention = parse_rabi_convention(text);
    } catch (const std::invalid_argument& e) {
      throw ConfigError("spin.rabi_convention", e.what());
    }
  }
  r.number("spin", "selectivity_ratio", c.selectivity_ratio);

  text.clear();
  r.text("output", "dir", text);
  if (!text.empty()) c.output_dir = text;

  c.validate();
  return c;
}

template <typename F>
void guarded(const std::string& field, F&& check) {
  try {
    check();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(field, e.what());
  }
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ConfigError(field, message);
}

}  // namespace

void ExperimentConfig::validate() const {
  guarded("units", [&] { units.validate(); });
  require(!separations.empty(), "geometry.R", "at least one separation required");
  for (double R : separations) require(R > 0.0 && std::isfinite(R), "geometry.R", "separations must be > 0");
  require(gap_fit_separations.size() >= 2, "geometry.gap_fit_R", "at least two separations required");
  for (double R : gap_fit_separations) require(R > 0.0, "geometry.gap_fit_R", "separations must be > 0");
  require(gap_target_R > 0.0, "geometry.gap_target_R", "must be > 0");
  require(budget.mc_samples >= kMinimumSamples, "mc.samples", "must be >= 10000");
  require(budget.mc.shards >= 1, "mc.shards", "must be >= 1");
  require(budget.mc.threads >= 1, "mc.threads", "must be >= 1");
  require(budget.optimizer.samples >= 1000, "mc.optimizer_samples", "must be >= 1000");
  require(budget.optimizer.eval_samples >= 1000, "mc.optimizer_eval_samples", "must be >= 1000");
  require(budget.optimizer.max_iterations >= 1, "mc.optimizer_iterations", "must be >= 1");
  require(spectrum_max_field > 0.0, "spectrum.max_field", "must be > 0");
  require(spectrum_step > 0.0 && spectrum_step < spectrum_max_field, "spectrum.step", "must be in (0, max_field)");
  guarded("spectrum", [&] { levels.validate(); });
  guarded("barrier", [&] { barrier.validate(); });
  require(target_dwell_s > 0.0, "barrier.target_dwell", "must be > 0");
  require(isolated_binding_Ry > 0.0, "barrier.isolated_binding", "must be > 0");
  for (double f : wkb_fields) require(f > 0.0, "barrier.fields", "fields must be > 0");
  require(drive_R > 0.0, "drive.R", "must be > 0");
  require(drive_F0 >= 0.0, "drive.F0", "must be >= 0");
  require(drive_F1 > 0.0, "drive.F1", "must be > 0");
  require(transfer.t_on_ps >= 0.0, "drive.t_on", "must be >= 0");
  require(transfer.hold_ps >= 0.0, "drive.hold", "must be >= 0");
  require(transfer.steps_per_period >= 20.0, "drive.steps_per_period", "must be >= 20");
  require(transfer.completion_threshold > 0.0 && transfer.completion_threshold < 1.0, "drive.threshold",
          "must lie in (0, 1)");
  guarded("spin", [&] { spin.validate(); });
  guarded("spin", [&] { sweep.validate(); });
  require(!t_e_grid_s.empty() && !t_n_grid_s.empty(), "spin.t_e_grid", "dephasing grids must be non-empty");
  for (double t : t_e_grid_s) require(t > 0.0, "spin.t_e_grid", "dephasing times must be > 0");
  for (double t : t_n_grid_s) require(t > 0.0, "spin.t_n_grid", "dephasing times must be > 0");
  require(B_ac_T > 0.0, "spin.B_ac", "must be > 0");
  require(selectivity_ratio > 0.0, "spin.selectivity_ratio", "must be > 0");
}

ExperimentConfig parse_config(const std::string& text) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("line " + std::to_string(e.line()), e.message());
  }
  return from_tree(tree);
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

// 15 significant digits: values that differ only by unit-conversion round-off
// describe (and hash) identically.
std::string fmt(double v) {
  char b[40];
  std::snprintf(b, sizeof b, "%.15g", v);
  return b;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + fmt(v[k]);
  return s;
}

}  // namespace

std::string describe(const ExperimentConfig& c) {
  std::ostringstream o;
  o << "units=" << fmt(c.units.bohr_radius_nm) << ',' << fmt(c.units.rydberg_meV) << ','
    << fmt(c.units.effective_mass_ratio) << ',' << fmt(c.units.hbar_meV_ps) << ',' << fmt(c.units.temperature_mK)
    << "\nR=" << fmt_list(c.separations) << "\ngap_fit_R=" << fmt_list(c.gap_fit_separations) << ';'
    << fmt(c.gap_target_R) << ';' << fmt(c.gap_reference_meV) << "\nmc=" << c.budget.mc_samples << ','
    << c.budget.seed << ',' << c.budget.mc.shards << ',' << c.budget.optimizer.samples << ','
    << c.budget.optimizer.eval_samples << ',' << c.budget.optimizer.seed << ',' << c.budget.optimizer.max_iterations
    << ',' << to_string(c.budget.treatment) << "\nspectrum=" << fmt(c.spectrum_max_field) << ','
    << fmt(c.spectrum_step) << ',' << fmt(c.levels.transition_1s_2p0) << ',' << fmt(c.levels.transition_1s_2ppm)
    << "\nbarrier=" << fmt(c.barrier.Z_b) << ',' << to_string(c.barrier.attempt_mode) << ','
    << fmt(c.barrier.fixed_attempt_THz) << ',' << fmt(c.target_dwell_s) << ',' << fmt(c.isolated_binding_Ry) << ';'
    << fmt_list(c.wkb_fields) << "\ndrive=" << fmt(c.drive_R) << ',' << fmt(c.drive_F0) << ',' << fmt(c.drive_F1)
    << ',' << fmt(c.transfer.t_on_ps) << ',' << fmt(c.transfer.hold_ps) << ',' << fmt(c.transfer.steps_per_period)
    << ',' << fmt(c.transfer.completion_threshold) << "\nspin=" << fmt(c.spin.B_T) << ',' << fmt(c.spin.g_e) << ','
    << fmt(c.spin.mu_B) << ',' << fmt(c.spin.g_n_mu_n) << ',' << fmt(c.spin.A_meV) << ',' << fmt(c.sweep.J_start)
    << ',' << fmt(c.sweep.J_end) << ',' << fmt(c.sweep.duration_us) << ',' << c.sweep.steps << ';'
    << fmt_list(c.t_e_grid_s) << ';' << fmt_list(c.t_n_grid_s) << ';' << fmt(c.B_ac_T) << ','
    << to_string(c.rabi_convention) << ',' << fmt(c.selectivity_ratio) << '\n';
  return o.str();
}

std::string config_hash(const ExperimentConfig& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : describe(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace donor
