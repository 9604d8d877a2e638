#pragma once

// The acceptance suite: one deterministic result per criterion, grouped in
// three tiers (machine-precision identities, closed-form paper examples and
// equivalence-constant brackets), plus checks on the configured weight.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwt/config.hpp"

namespace mwt {

enum class Tier { exact, paper, ratio, all };

std::string to_string(Tier t);
Tier tier_from_string(const std::string& s);

struct CriterionResult {
  int id = 0;
  std::string name;
  Tier tier = Tier::exact;
  bool passed = false;
  nlohmann::json metrics;
};

inline constexpr int kCriterionCount = 13;

Tier tier_of(int id);

/// Runs one criterion. Seeds derive from `seed` and the id only.
CriterionResult run_criterion(int id, std::uint64_t seed);

/// Checks on the configured weight: family brackets and identity checks for
/// every configured space over random coefficient fields.
CriterionResult run_configured(const ExperimentConfig& config);

struct VerifyOptions {
  std::uint64_t seed = 7;
  Tier tier = Tier::all;
  ExperimentConfig config;
};

struct VerifyReport {
  std::uint64_t seed = 7;
  Tier tier = Tier::all;
  nlohmann::json config;
  std::vector<CriterionResult> criteria;
  std::optional<CriterionResult> configured;
  /// Wall-clock seconds per criterion id; kept out of the serialized report.
  std::map<int, double> seconds;

  bool all_passed() const;
  nlohmann::json to_json() const;
};

VerifyReport run_verify(const VerifyOptions& opt);

}  // namespace mwt
