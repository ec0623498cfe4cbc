#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "oids/catalog.hpp"
#include "oids/harness.hpp"
#include "oids/policy.hpp"

namespace oids {

// {"name", "env", "algos", "T", "reps", "base_seed", "diagnostics",
//  "output_dir", "bounds"}; the first four are required.
struct ExperimentConfig {
  std::string name;
  InstanceRecipe env;
  std::vector<AlgorithmSpec> algos;
  std::size_t T = 0;
  std::size_t reps = 1;
  std::uint64_t base_seed = 0;
  bool diagnostics = false;
  std::optional<std::string> output_dir;
  std::vector<BoundTag> bounds;

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

// Throws InvalidInput naming the offending field. Unknown keys are errors.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::string& path);

// Emits only fields that are set; parse_config(to_json(c)) == c.
nlohmann::json to_json(const ExperimentConfig& config);
nlohmann::json to_json(const AlgorithmSpec& spec);
nlohmann::json to_json(const InstanceRecipe& recipe);

AlgorithmSpec parse_algorithm(const nlohmann::json& doc, const std::string& where = "algos[]");
InstanceRecipe parse_recipe(const nlohmann::json& doc, const std::string& where = "env");

}  // namespace oids
