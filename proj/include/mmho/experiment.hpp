#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mmho/config.hpp"
#include "mmho/ddpg/agent.hpp"
#include "mmho/ddpg/checkpoint.hpp"
#include "mmho/ddpg/encoding.hpp"
#include "mmho/metrics.hpp"

namespace mmho {

enum class PolicyKind { ddpg, rand, wcs };

std::string_view to_string(PolicyKind kind);
PolicyKind policy_from_string(std::string_view name);

/// Seeds of the k-th training and evaluation episode; the two sets do not overlap.
std::uint64_t training_seed(const ScenarioConfig& cfg, int episode);
std::uint64_t evaluation_seed(const ScenarioConfig& cfg, int episode);

/// Chooses a backup action for the environment's current slot.
using Policy = std::function<BackupAction(const Environment&)>;

struct EpisodeResult {
  MetricsRecord metrics;
  EpisodeLog log;
};

EpisodeResult run_episode(const ScenarioConfig& cfg, std::uint64_t seed, const Policy& policy);

/// Frozen greedy actor policy (no exploration noise).
Policy ddpg_policy(const ddpg::DdpgAgent& agent, const ddpg::StateEncoder& encoder);
/// Stateful baselines: their own random stream is derived from the episode seed.
Policy rand_policy(const ScenarioConfig& cfg, std::uint64_t episode_seed);
Policy wcs_policy(const ScenarioConfig& cfg, std::uint64_t episode_seed);

struct CurvePoint {
  int episode = 0;
  std::uint64_t seed = 0;
  double total_reward = 0.0;
  double f1_gbps = 0.0;
  long long f2_outages = 0;
  long long f3_handovers = 0;
  double mean_critic_loss = 0.0;
  double exploration_sigma = 0.0;
};

struct TrainingResult {
  ddpg::PolicyCheckpoint checkpoint;
  std::vector<CurvePoint> curve;
  double wall_time_s = 0.0;
};

/// Trains from scratch. With out_dir set, writes config.json, training_curve.csv
/// and checkpoint.bin there. A non-finite loss or parameter aborts with a
/// diagnostic dump (diagnostic.json) and std::runtime_error.
TrainingResult run_training(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& out_dir = {},
                            const std::function<void(const CurvePoint&)>& progress = {});

ddpg::DdpgAgent agent_from_checkpoint(const ddpg::PolicyCheckpoint& ckpt, const ScenarioConfig& cfg);

struct EvaluationResult {
  PolicyKind policy = PolicyKind::rand;
  std::vector<MetricsRecord> records;  // in episode order
  std::vector<EpisodeLog> slot_logs;   // first cfg.slot_log_episodes episodes
  double wall_time_s = 0.0;
};

/// Runs cfg.eval_episodes held-out episodes on a worker pool. `checkpoint` is
/// required for ddpg (std::invalid_argument otherwise).
EvaluationResult run_evaluation(const ScenarioConfig& cfg, PolicyKind policy,
                                const ddpg::PolicyCheckpoint* checkpoint = nullptr);

/// Writes eval_<policy>.csv, slots_<policy>.csv and config.json into out_dir.
void write_evaluation(const EvaluationResult& result, const ScenarioConfig& cfg, const std::filesystem::path& out_dir);

struct PolicySummary {
  PolicyKind policy = PolicyKind::rand;
  MeanStderr f1, f2, f3, reward;
};

PolicySummary summarize(const EvaluationResult& result);

struct BenchResult {
  std::vector<EvaluationResult> evaluations;  // ddpg, rand, wcs
  std::vector<PolicySummary> summaries;
  double p_f2_ddpg_below_rand = 1.0;
  double p_f3_ddpg_below_rand = 1.0;
  double training_wall_time_s = 0.0;
};

/// Trains (unless a checkpoint is supplied), evaluates all three policies on
/// the same seeds and writes summary.txt plus every per-policy CSV.
BenchResult run_bench(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                      const std::optional<std::filesystem::path>& checkpoint = {});

std::string format_summary(const BenchResult& bench);

}  // namespace mmho
