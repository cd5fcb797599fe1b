#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "donor/config.hpp"

namespace donor::cli {

inline constexpr int kSchemaVersion = 1;

struct RunContext {
  ExperimentConfig config;
  std::string config_hash;
};

/// One tolerance check reported in the summary; `pass` feeds --check.
struct Check {
  std::string name;
  double value = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool pass = false;
};

struct CommandOutcome {
  nlohmann::json summary;
  std::vector<Check> checks;
  std::vector<std::string> files;
  [[nodiscard]] bool all_pass() const;
};

CommandOutcome run_table1(const RunContext& ctx);
CommandOutcome run_fig2(const RunContext& ctx);
CommandOutcome run_fig3(const RunContext& ctx);
CommandOutcome run_fig4(const RunContext& ctx);
CommandOutcome run_fig5(const RunContext& ctx);
CommandOutcome run_wkb(const RunContext& ctx);
CommandOutcome run_esr(const RunContext& ctx);

/// Writes <out>/<command>_summary.json with the schema envelope.
std::string write_summary(const RunContext& ctx, const std::string& command, CommandOutcome& outcome);

}  // namespace donor::cli
