#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "donor/optimize.hpp"

namespace donor {

/// JSON sidecar of optimized variational parameters keyed by
/// (kind, R, F0, seed, samples). An empty path disables persistence.
class ParameterCache {
 public:
  ParameterCache() = default;
  explicit ParameterCache(std::filesystem::path path);

  [[nodiscard]] std::optional<OptimizationResult> lookup(TrialKind kind, double R, double field,
                                                         const OptimizerSettings& settings) const;
  void store(const OptimizationResult& result, const OptimizerSettings& settings);

  [[nodiscard]] std::size_t size() const { return entries_.size(); }

  [[nodiscard]] static std::string key(TrialKind kind, double R, double field, const OptimizerSettings& settings);

 private:
  std::filesystem::path path_;
  nlohmann::json entries_ = nlohmann::json::object();
};

void to_json(nlohmann::json& j, const OptimizationResult& r);
void from_json(const nlohmann::json& j, OptimizationResult& r);

/// Cached wrapper around optimize_parameters; `cache` may be null.
[[nodiscard]] OptimizationResult optimize_cached(TrialKind kind, double R, double field,
                                                 const OptimizerSettings& settings, ParameterCache* cache);

}  // namespace donor
