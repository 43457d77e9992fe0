#pragma once

#include <span>
#include <vector>

#include "mmho/ddpg/net.hpp"
#include "mmho/env.hpp"

namespace mmho::ddpg {

/// Maps a NetworkState to the actor/critic input and actor scores back to backup BSs.
struct StateEncoder {
  double zone_width = 100.0;
  double zone_depth = 100.0;
  int num_ue = 7;
  int num_bs = 4;
  int window = 2;
  double ref_capacity_bps = 10e9;
  double ref_rate_bps = 10e9;

  static StateEncoder for_scenario(const Scenario& scenario, const EnvParams& params);

  int features_per_ue() const { return 2 + num_bs + 2 + std::max(window - 2, 0); }
  int state_dim() const { return num_ue * features_per_ue(); }
  int action_dim() const { return num_ue * num_bs; }

  /// Per UE: x, y, one-hot serving BS, capacity, share, rate history; each clipped to [0, 1].
  Vector encode(const NetworkState& state) const;

  /// Backup = argmax of the UE's BS scores for UEs in the handover set (ties
  /// to the lowest index); everyone else keeps the serving BS.
  BackupAction decode(const Vector& scores, const NetworkState& state, std::span<const int> handover_set) const;

  /// 1 on the score entries of UEs in the handover set, 0 elsewhere.
  Vector action_mask(std::span<const int> handover_set) const;
};

}  // namespace mmho::ddpg
