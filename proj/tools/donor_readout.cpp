#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "donor/matrix_elements.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitTolerance = 4;

}  // namespace

int main(int argc, char** argv) {
  using namespace donor;
  CLI::App app{"Two-donor spin readout simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path, out_dir;
  std::uint64_t seed = 0, samples = 0;
  unsigned jobs = 0;
  bool check = false;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "Monte-Carlo seed (overrides the config)");
  app.add_option("--samples", samples, "Monte-Carlo samples for matrix elements (overrides the config)");
  app.add_option("--jobs", jobs, "worker threads for Monte-Carlo shards");
  app.add_flag("--check", check, "exit with status 4 when a tolerance check fails");

  const std::map<std::string, std::pair<std::string, std::function<cli::CommandOutcome(const cli::RunContext&)>>>
      commands{{"table1", {"crossing, adiabatic and critical fields per separation", cli::run_table1}},
               {"fig2", {"level diagrams versus DC field", cli::run_fig2}},
               {"fig3", {"transition gap versus field and zero-field gap extrapolation", cli::run_fig3}},
               {"fig4", {"resonant charge transfer trajectory", cli::run_fig4}},
               {"fig5", {"spin preparation fidelity versus dephasing", cli::run_fig5}},
               {"wkb", {"isolated D- dwell times and critical field", cli::run_wkb}},
               {"esr", {"ESR flip time, J_c and Zeeman bookkeeping", cli::run_esr}}};
  for (const auto& [name, entry] : commands) app.add_subcommand(name, entry.first);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  cli::RunContext ctx;
  try {
    ctx.config = config_path.empty() ? ExperimentConfig{} : load_config(config_path);
    if (!out_dir.empty()) ctx.config.output_dir = out_dir;
    if (app.count("--seed") > 0) {
      ctx.config.budget.seed = seed;
      ctx.config.budget.optimizer.seed = seed;
    }
    if (app.count("--samples") > 0) ctx.config.budget.mc_samples = samples;
    if (app.count("--jobs") > 0) ctx.config.budget.mc.threads = jobs;
    ctx.config.validate();
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  }
  ctx.config_hash = config_hash(ctx.config);

  try {
    cli::CommandOutcome outcome = commands.at(command).second(ctx);
    const std::string summary = cli::write_summary(ctx, command, outcome);
    for (const auto& c : outcome.checks) {
      std::printf("%s %s = %.6g [%.6g, %.6g]\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.lo, c.hi);
    }
    std::printf("summary: %s\n", summary.c_str());
    if (check && !outcome.all_pass()) return kExitTolerance;
    return kExitOk;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "invalid input: %s\n", e.what());
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitNumerical;
  }
}
