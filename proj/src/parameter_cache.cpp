#include "donor/parameter_cache.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace donor {

namespace {

std::string exact(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void to_json(nlohmann::json& j, const OptimizationResult& r) {
  j = nlohmann::json{{"kind", std::string(to_string(r.kind))},
                     {"alpha", r.params.alpha},
                     {"beta", r.params.beta},
                     {"lambda", r.params.lambda},
                     {"R", r.R},
                     {"F0", r.field},
                     {"energy", r.energy},
                     {"std_error", r.std_error},
                     {"variance", r.variance},
                     {"converged", r.converged},
                     {"iterations", r.iterations}};
}

void from_json(const nlohmann::json& j, OptimizationResult& r) {
  r.kind = parse_trial_kind(j.at("kind").get<std::string>());
  r.params = {j.at("alpha").get<double>(), j.at("beta").get<double>(), j.at("lambda").get<double>()};
  r.R = j.at("R").get<double>();
  r.field = j.at("F0").get<double>();
  r.energy = j.at("energy").get<double>();
  r.std_error = j.at("std_error").get<double>();
  r.variance = j.at("variance").get<double>();
  r.converged = j.at("converged").get<bool>();
  r.iterations = j.at("iterations").get<int>();
}

ParameterCache::ParameterCache(std::filesystem::path path) : path_(std::move(path)) {
  if (path_.empty() || !std::filesystem::exists(path_)) return;
  std::ifstream in(path_);
  try {
    entries_ = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception&) {
    // A corrupt sidecar is discarded; it only ever saves recomputation.
    entries_ = nlohmann::json::object();
  }
  if (!entries_.is_object()) entries_ = nlohmann::json::object();
}

std::string ParameterCache::key(TrialKind kind, double R, double field, const OptimizerSettings& s) {
  return std::string(to_string(kind)) + "|R=" + exact(R) + "|F0=" + exact(field) + "|seed=" + std::to_string(s.seed) +
         "|samples=" + std::to_string(s.samples) + "|eval=" + std::to_string(s.eval_samples) +
         "|frozen=" + (s.freeze_lambda ? "1" : "0");
}

std::optional<OptimizationResult> ParameterCache::lookup(TrialKind kind, double R, double field,
                                                         const OptimizerSettings& settings) const {
  const auto it = entries_.find(key(kind, R, field, settings));
  if (it == entries_.end()) return std::nullopt;
  try {
    return it->get<OptimizationResult>();
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

void ParameterCache::store(const OptimizationResult& result, const OptimizerSettings& settings) {
  entries_[key(result.kind, result.R, result.field, settings)] = result;
  if (path_.empty()) return;
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  const auto tmp = path_.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw std::runtime_error("cannot write parameter cache " + tmp);
    out << entries_.dump(2) << '\n';
  }
  std::filesystem::rename(tmp, path_);
}

OptimizationResult optimize_cached(TrialKind kind, double R, double field, const OptimizerSettings& settings,
                                   ParameterCache* cache) {
  if (cache != nullptr) {
    if (auto hit = cache->lookup(kind, R, field, settings)) return *hit;
  }
  OptimizationResult result = optimize_parameters(kind, R, field, settings);
  if (cache != nullptr) cache->store(result, settings);
  return result;
}

}  // namespace donor
