#include "mmho/ddpg/encoding.hpp"

#include <algorithm>
#include <stdexcept>

namespace mmho::ddpg {

StateEncoder StateEncoder::for_scenario(const Scenario& scenario, const EnvParams& params) {
  StateEncoder enc;
  enc.zone_width = scenario.zone.width;
  enc.zone_depth = scenario.zone.depth;
  enc.num_ue = scenario.num_ue();
  enc.num_bs = scenario.num_bs();
  enc.window = params.window;
  return enc;
}

Vector StateEncoder::encode(const NetworkState& state) const {
  if (static_cast<int>(state.ues.size()) != num_ue) throw std::invalid_argument("encode: UE count mismatch");
  Vector v = Vector::Zero(state_dim());
  const auto clip = [](double x) { return std::clamp(x, 0.0, 1.0); };
  Eigen::Index k = 0;
  for (const UeState& ue : state.ues) {
    v(k++) = clip(ue.position.x / zone_width);
    v(k++) = clip(ue.position.y / zone_depth);
    for (int j = 0; j < num_bs; ++j) v(k++) = ue.serving == j ? 1.0 : 0.0;
    v(k++) = clip(ue.capacity / ref_capacity_bps);
    v(k++) = clip(ue.share);
    const int hist = std::max(window - 2, 0);
    for (int h = 0; h < hist; ++h)
      v(k++) = h < static_cast<int>(ue.rate_history.size()) ? clip(ue.rate_history[static_cast<std::size_t>(h)] / ref_rate_bps) : 0.0;
  }
  return v;
}

BackupAction StateEncoder::decode(const Vector& scores, const NetworkState& state,
                                  std::span<const int> handover_set) const {
  if (scores.size() != action_dim()) throw std::invalid_argument("decode: score vector has wrong length");
  BackupAction action;
  action.backup_bs = state.serving();
  for (int i : handover_set) {
    int best = 0;
    for (int j = 1; j < num_bs; ++j)
      if (scores(i * num_bs + j) > scores(i * num_bs + best)) best = j;
    action.backup_bs[static_cast<std::size_t>(i)] = best;
  }
  return action;
}

Vector StateEncoder::action_mask(std::span<const int> handover_set) const {
  Vector mask = Vector::Zero(action_dim());
  for (int i : handover_set) {
    if (i < 0 || i >= num_ue) throw std::invalid_argument("handover set names an unknown UE");
    mask.segment(static_cast<Eigen::Index>(i) * num_bs, num_bs).setOnes();
  }
  return mask;
}

}  // namespace mmho::ddpg
