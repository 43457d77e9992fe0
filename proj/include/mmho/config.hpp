#pragma once

#include <cstdint>
#include <filesystem>

#include <json.hpp>

#include "mmho/baselines.hpp"
#include "mmho/ddpg/agent.hpp"
#include "mmho/env.hpp"

namespace mmho {

/// Everything a run needs. Defaults follow the 4-BS / 7-UE, 28 GHz setup
/// with a 100 s trajectory.
struct ScenarioConfig {
  Scenario scenario;
  EnvParams env;
  ddpg::DdpgConfig ddpg;
  VicinityRule vicinity;
  WcsParams wcs;
  double ref_capacity_bps = 10e9;  // state normalization
  int training_episodes = 5000;
  int eval_episodes = 200;
  int slot_log_episodes = 3;  // evaluation episodes whose per-slot log is written
  int workers = 0;            // 0 = hardware concurrency
  std::uint64_t seed = 1;
};

ScenarioConfig default_config();

/// Default scenario shortened to T = 200 slots and 500 training episodes.
ScenarioConfig desk_config();

nlohmann::json to_json(const ScenarioConfig& cfg);

/// Missing keys fall back to defaults; unknown keys and invalid values throw std::invalid_argument.
ScenarioConfig config_from_json(const nlohmann::json& j);
ScenarioConfig load_config(const std::filesystem::path& path);

void validate(const ScenarioConfig& cfg);

}  // namespace mmho
