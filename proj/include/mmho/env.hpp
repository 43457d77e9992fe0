#pragma once

// Slotted downlink environment. One call to step() covers the end of slot t:
// handover detection on the serving links' next-slot capacities, handover to
// the chosen backups, channel estimation toward the new serving BSs,
// allocation of next-slot shares, and the slot reward.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mmho/allocation.hpp"
#include "mmho/channel.hpp"
#include "mmho/geometry.hpp"
#include "mmho/link.hpp"

namespace mmho {

struct Scenario {
  Zone zone = quadrant_zone();
  std::vector<double> ue_speeds_kmh{5.0, 5.0, 5.0, 5.0, 60.0, 60.0, 60.0};
  double duration_s = 100.0;
  double slot_s = 0.1;
  MobilityParams mobility;

  int num_ue() const { return static_cast<int>(ue_speeds_kmh.size()); }
  int num_bs() const { return zone.num_bs(); }
  int num_slots() const { return slot_count(duration_s, slot_s); }
};

struct RewardWeights {
  double lambda_outage = 20.0;
  double lambda_handover = 10.0;
  double rate_unit_bps = 1e9;  // rates enter the reward in Gbps
};

struct EnvParams {
  ChannelParams channel;
  RadioParams radio;
  AllocationParams allocation;
  RewardWeights weights;
  int window = 2;  // K
  double rth_min_bps = 0.2e9;
  double rth_max_bps = 1.0e9;
  // Allocated deficits aim slightly above K*R_th so a satisfied UE does not
  // land exactly on the (inclusive) outage boundary.
  double threshold_margin = 1e-9;
};

void validate(const Scenario& scenario, const EnvParams& params);

struct UeState {
  Point3 position;
  int serving = 0;
  double capacity = 0.0;  // bits/s toward the serving BS in this slot
  double share = 0.0;
  std::vector<double> rate_history;  // R^{t-1} ... R^{t-K+2}, length max(K-2, 0)

  double rate() const { return capacity * share; }
};

struct NetworkState {
  int slot = 0;
  std::vector<UeState> ues;

  std::vector<int> serving() const;
};

struct BackupAction {
  std::vector<int> backup_bs;
};

struct RewardBreakdown {
  double sum_rate = 0.0;  // in reward units
  int outages = 0;
  int handovers = 0;
  double total = 0.0;
};

struct SlotOutcome {
  int slot = 0;
  std::vector<int> handover_set;
  std::vector<double> rates;       // R^t
  std::vector<double> next_rates;  // R^{t+1}
  std::vector<int> serving;        // j_S^t
  std::vector<int> next_serving;   // j_S^{t+1}
  std::vector<double> capacities;  // c^t(i, j_S^t)
  std::vector<double> shares;      // alpha^t
  std::vector<bool> handover;
  std::vector<bool> outage;
  RewardBreakdown reward;
};

/// UEs whose K-window average, continuing on the serving BS with the current
/// share, would fall strictly below threshold.
std::vector<int> handover_set(const NetworkState& state, std::span<const double> next_capacities,
                              std::span<const double> thresholds, int window);

/// Outage test on a window of K rates (next slot first); inclusive boundary.
bool is_outage(std::span<const double> window_rates, double threshold, int window);

/// Sum rate minus weighted outage and handover counts. windows[i] holds the
/// K rates R^{t+1}, R^t, ..., R^{t-K+2} of UE i.
RewardBreakdown reward(std::span<const double> rates, std::span<const std::vector<double>> windows,
                       std::span<const double> thresholds, const std::vector<bool>& handovers, int window,
                       const RewardWeights& weights);

/// Result of resolving one slot for a fixed serving assignment.
struct SlotResolution {
  std::vector<double> capacities;
  std::vector<double> shares;
  std::vector<double> rates;
  AllocationResult allocation;
};

class Environment {
 public:
  Environment(Scenario scenario, EnvParams params, std::uint64_t episode_seed);

  const NetworkState& state() const { return state_; }
  const Scenario& scenario() const { return scenario_; }
  const EnvParams& params() const { return params_; }
  std::uint64_t episode_seed() const { return seed_; }
  int slot() const { return state_.slot; }
  int horizon() const { return horizon_; }
  bool done() const { return state_.slot >= horizon_; }
  int num_ue() const { return scenario_.num_ue(); }
  int num_bs() const { return scenario_.num_bs(); }
  std::span<const double> thresholds() const { return thresholds_; }

  /// Handover set for the current slot, from next-slot capacities on the serving links.
  const std::vector<int>& current_handover_set() const { return handover_set_; }
  std::span<const double> predicted_capacities() const { return predicted_; }

  /// Channels of the upcoming slot (what the agent may estimate after this slot's transmission).
  const LinkGrid& next_links() const { return next_grid_; }

  /// What-if evaluation of a backup action without advancing time.
  SlotOutcome evaluate(const BackupAction& action) const;

  SlotOutcome step(const BackupAction& action);

 private:
  LinkGrid build_grid(int slot) const;
  std::pair<SlotOutcome, SlotResolution> evaluate_full(const BackupAction& action) const;
  SlotResolution resolve(const LinkGrid& grid, std::span<const int> serving) const;
  void refresh_handover_set();
  std::vector<int> masked_backup(const BackupAction& action) const;

  Scenario scenario_;
  EnvParams params_;
  std::uint64_t seed_;
  int horizon_ = 0;
  std::vector<Trajectory> trajectories_;
  std::vector<double> thresholds_;
  NetworkState state_;
  // recent_[i] = R^t, R^{t-1}, ..., R^{t-K+2}
  std::vector<std::vector<double>> recent_;
  LinkGrid next_grid_;
  std::vector<double> predicted_;
  std::vector<int> handover_set_;
};

}  // namespace mmho
