#pragma once

// Experiment configuration: strict JSON parsing, validation against the
// module preconditions, and the resolved form embedded in every report.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "mwt/apdim.hpp"
#include "mwt/reducing.hpp"
#include "mwt/spaces.hpp"
#include "mwt/transform.hpp"
#include "mwt/weights.hpp"

namespace mwt {

struct WeightSpec {
  std::string kind = "identity";  // identity, power_log, two_singularity, conjugated_block, samples
  double a = 0.0;                 // power_log exponent
  double b = 0.0;                 // power_log log exponent
  double scale = 1.0;
  double d = 0.0;                 // two_singularity
  double dtilde = 0.0;
  Point x0{0.25};
  double a1 = 0.0;                // conjugated_block
  double a2 = 0.0;
  double angle_rate = 1.0;
  std::string path;               // samples container
};

struct ExperimentConfig {
  WeightSpec weight;
  int n = 1;
  int m = 1;
  double p = 2.0;
  std::optional<Box> domain;
  int window_j_min = 0;
  int window_j_max = 5;
  int apdim_i_max = 8;
  int apdim_j_min = -1;
  int apdim_j_max = -1;
  int apdim_stride = 0;
  std::vector<SpaceParams> spaces{SpaceParams{}};
  FilterSpec filters;
  QuadratureSpec quad;
  ReduceMethod reduce_method = ReduceMethod::automatic;
  int reduce_directions = 256;
  int draws = 20;
  std::uint64_t seed = 7;
  std::string out = "out";

  CubeWindow window() const;
  ApdimConfig apdim() const;
  ReduceOptions reduce() const;
};

/// Throws ConfigError on unknown keys, wrong types and violated preconditions.
ExperimentConfig parse_config(const nlohmann::json& j);
/// Accepts a path to a JSON file or an inline JSON object.
ExperimentConfig parse_config_source(const std::string& path_or_inline);

/// The fully resolved config, defaults included.
nlohmann::json to_json(const ExperimentConfig& c);

MatrixWeight make_weight(const ExperimentConfig& c);

std::string version_hash();

}  // namespace mwt
