#pragma once

// Experiment descriptions and the orchestration that turns them into result
// tables.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ccsched/policies.hpp"
#include "ccsched/report.hpp"

namespace ccsched {

enum class Scheme { baseline, threshold, full_csit, superposition };

/// Accepts the canonical names plus gradient_full_csit / gradient_superposition.
Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme scheme);
bool is_gradient(Scheme scheme);

struct TwoClassProfile {
  double strong_fraction = 0.5;
  double weak_ratio = 0.2;
};

struct ScenarioConfig {
  Scheme scheme = Scheme::baseline;
  int K = 20;
  double P_dB = 10.0;
  double m = 0.5;
  double alpha = 0.0;
  std::int64_t slots = 0;  // 0 selects the per-scheme default
  std::uint64_t seed = 1;
  TwoClassProfile two_class;
  std::optional<std::vector<double>> gamma;  // overrides two_class (linear scale)
  std::optional<double> threshold;           // fixed c instead of the optimal one
  double u0 = kDefaultInitialRate;

  // Sweep description, only consulted by the sweep subcommand.
  std::string sweep_param;
  std::vector<double> sweep_values;
  std::vector<Scheme> schemes;

  std::int64_t resolved_slots() const;
  /// Linear mean SNR per user: the explicit list, or P for the first
  /// round(strong_fraction K) users and weak_ratio P for the rest.
  Eigen::VectorXd resolved_gamma() const;
  /// Throws ConfigError naming the first invalid field.
  void validate() const;
};

inline constexpr std::int64_t kDefaultFixedSlots = 100000;
inline constexpr std::int64_t kDefaultGradientSlots = 200000;

/// Parses a flat JSON object (unknown keys are rejected).
ScenarioConfig parse_config(const std::string& json_text);
ScenarioConfig load_config(const std::string& path);
/// Flat JSON rendering of the config, used for the CSV comment echo.
std::string config_to_json(const ScenarioConfig& config);

/// One row per user (user_id 1..K) followed by a summary row (user_id 0)
/// holding the average gamma, the mean per-user rate and its standard error.
ResultTable run_scenario(const ScenarioConfig& config, int workers = 1);

/// run_scenario for every (value, scheme) pair, values outermost. An empty
/// scheme list means the base config's scheme.
ResultTable sweep(const ScenarioConfig& base, const std::string& param,
                  const std::vector<double>& values, const std::vector<Scheme>& schemes,
                  int workers = 1);

/// Summary rows only (user_id 0), in table order.
std::vector<ResultRow> summary_rows(const ResultTable& table);

}  // namespace ccsched
