#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "mmho/env.hpp"

namespace mmho {

/// One (slot, UE) line of an episode log.
struct SlotLogRow {
  int slot = 0;
  int ue = 0;
  double x = 0.0;
  double y = 0.0;
  int serving = 0;       // j_S^t
  int next_serving = 0;  // j_S^{t+1}
  double capacity = 0.0;
  double share = 0.0;
  double rate = 0.0;       // R^t
  double next_rate = 0.0;  // R^{t+1}
  double threshold = 0.0;
  bool in_handover_set = false;
  bool handover = false;
  bool outage = false;
};

struct EpisodeLog {
  std::uint64_t seed = 0;
  int num_ue = 0;
  int num_slots = 0;  // slots the episode was meant to cover
  int window = 2;
  RewardWeights weights;
  std::vector<SlotLogRow> rows;     // slot-major, UE-minor
  std::vector<double> slot_rewards; // r^t as returned by the environment

  /// Appends the rows of one stepped slot. `before` is the state prior to step.
  void record(const NetworkState& before, std::span<const double> thresholds, const SlotOutcome& outcome);
};

struct MetricsRecord {
  int episode = 0;
  std::uint64_t seed = 0;
  double f1_gbps = 0.0;   // sum of R^t over slots and UEs, in reward units
  long long f2_outages = 0;
  long long f3_handovers = 0;
  double total_reward = 0.0;
  double wall_time_s = 0.0;
};

/// Recounts F1, F2, F3 from the rows alone. Throws std::invalid_argument when
/// the log is truncated or its rows are inconsistent with each other.
MetricsRecord compute_metrics(const EpisodeLog& log);

/// Wall time is left out so that repeated runs produce identical bytes.
void write_episode_csv(std::ostream& out, std::span<const MetricsRecord> records);
void write_slot_csv(std::ostream& out, std::span<const EpisodeLog> logs);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

MeanStderr mean_stderr(std::span<const double> values);

/// One-sided paired t-test of H1: mean(a - b) < 0. Returns the p-value; 1 for
/// fewer than two pairs, and 0 or 1 when every difference is identical.
double paired_less_p_value(std::span<const double> a, std::span<const double> b);

}  // namespace mmho
