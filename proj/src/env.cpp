#include "mmho/env.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "mmho/rng.hpp"

namespace mmho {

void validate(const Scenario& scenario, const EnvParams& params) {
  validate_zone(scenario.zone);
  if (scenario.ue_speeds_kmh.empty()) throw std::invalid_argument("scenario has no UEs");
  if (!(scenario.duration_s > 0.0) || !(scenario.slot_s > 0.0))
    throw std::invalid_argument("duration and slot must be positive");
  if (scenario.num_slots() < 1) throw std::invalid_argument("episode shorter than one slot");
  for (double v : scenario.ue_speeds_kmh)
    if (!(v > 0.0)) throw std::invalid_argument("UE speeds must be positive");
  if (params.window < 1) throw std::invalid_argument("rate window K must be >= 1");
  if (!(params.rth_min_bps > 0.0) || params.rth_max_bps < params.rth_min_bps)
    throw std::invalid_argument("rate threshold range must satisfy 0 < min <= max");
  if (!(params.radio.tx_power_w > 0.0) || !(params.radio.bandwidth_hz > 0.0) ||
      !(params.radio.noise_psd_w_per_hz > 0.0))
    throw std::invalid_argument("radio parameters must be positive");
  if (params.weights.lambda_outage < 0.0 || params.weights.lambda_handover < 0.0)
    throw std::invalid_argument("reward weights must be non-negative");
}

std::vector<int> NetworkState::serving() const {
  std::vector<int> out;
  out.reserve(ues.size());
  for (const auto& ue : ues) out.push_back(ue.serving);
  return out;
}

std::vector<int> handover_set(const NetworkState& state, std::span<const double> next_capacities,
                              std::span<const double> thresholds, int window) {
  std::vector<int> out;
  for (std::size_t i = 0; i < state.ues.size(); ++i) {
    const UeState& ue = state.ues[i];
    double sum = window >= 2 ? ue.rate() : 0.0;
    for (double r : ue.rate_history) sum += r;
    sum += next_capacities[i] * ue.share;
    if (sum / window < thresholds[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

bool is_outage(std::span<const double> window_rates, double threshold, int window) {
  const double sum = std::accumulate(window_rates.begin(), window_rates.end(), 0.0);
  return sum / window <= threshold;
}

RewardBreakdown reward(std::span<const double> rates, std::span<const std::vector<double>> windows,
                       std::span<const double> thresholds, const std::vector<bool>& handovers, int window,
                       const RewardWeights& weights) {
  RewardBreakdown out;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    out.sum_rate += rates[i] / weights.rate_unit_bps;
    if (is_outage(windows[i], thresholds[i], window)) ++out.outages;
    if (handovers[i]) ++out.handovers;
  }
  out.total = out.sum_rate - weights.lambda_outage * out.outages - weights.lambda_handover * out.handovers;
  return out;
}

Environment::Environment(Scenario scenario, EnvParams params, std::uint64_t episode_seed)
    : scenario_(std::move(scenario)), params_(std::move(params)), seed_(episode_seed) {
  validate(scenario_, params_);
  horizon_ = scenario_.num_slots();
  const int n_ue = num_ue();
  const int n_bs = num_bs();

  for (int i = 0; i < n_ue; ++i) {
    trajectories_.push_back(generate_trajectory(derive_seed(seed_, StreamTag::trajectory, {std::uint64_t(i)}),
                                                scenario_.ue_speeds_kmh[static_cast<std::size_t>(i)], scenario_.zone,
                                                scenario_.duration_s, scenario_.slot_s, i, scenario_.mobility));
  }

  Rng rth_rng = make_stream(seed_, StreamTag::rate_threshold);
  std::uniform_real_distribution<double> rth(params_.rth_min_bps, params_.rth_max_bps);
  for (int i = 0; i < n_ue; ++i) thresholds_.push_back(rth(rth_rng));

  const int history_len = std::max(params_.window - 2, 0);
  recent_.assign(static_cast<std::size_t>(n_ue), std::vector<double>(static_cast<std::size_t>(params_.window - 1), 0.0));

  // Slot 0: attach each UE to its strongest BS, then allocate.
  const LinkGrid grid0 = build_grid(0);
  std::vector<int> serving(static_cast<std::size_t>(n_ue), 0);
  for (int i = 0; i < n_ue; ++i) {
    int best = 0;
    for (int j = 1; j < n_bs; ++j)
      if (grid0.gain(i, j) > grid0.gain(i, best)) best = j;
    serving[static_cast<std::size_t>(i)] = best;
  }
  const SlotResolution first = resolve(grid0, serving);

  state_.slot = 0;
  state_.ues.resize(static_cast<std::size_t>(n_ue));
  for (int i = 0; i < n_ue; ++i) {
    UeState& ue = state_.ues[static_cast<std::size_t>(i)];
    ue.position = trajectories_[static_cast<std::size_t>(i)].positions[0];
    ue.serving = serving[static_cast<std::size_t>(i)];
    ue.capacity = first.capacities[static_cast<std::size_t>(i)];
    ue.share = first.shares[static_cast<std::size_t>(i)];
    ue.rate_history.assign(static_cast<std::size_t>(history_len), 0.0);
    if (params_.window >= 2) recent_[static_cast<std::size_t>(i)][0] = ue.rate();
  }

  next_grid_ = build_grid(1);
  refresh_handover_set();
}

LinkGrid Environment::build_grid(int slot) const {
  const int n_ue = num_ue();
  const int n_bs = num_bs();
  std::vector<ChannelRealization> channels;
  channels.reserve(static_cast<std::size_t>(n_ue * n_bs));
  for (int i = 0; i < n_ue; ++i) {
    const Point3& pos = trajectories_[static_cast<std::size_t>(i)].positions[static_cast<std::size_t>(slot)];
    for (int j = 0; j < n_bs; ++j) {
      Rng rng = make_stream(seed_, StreamTag::channel,
                            {std::uint64_t(i), std::uint64_t(j), std::uint64_t(slot)});
      channels.push_back(sample_channel(pos, scenario_.zone.bs_positions[static_cast<std::size_t>(j)], rng,
                                        params_.channel));
    }
  }
  return LinkGrid(n_ue, n_bs, std::move(channels));
}

SlotResolution Environment::resolve(const LinkGrid& grid, std::span<const int> serving) const {
  const int n_ue = num_ue();
  const auto& radio = params_.radio;
  SlotResolution out;

  // Deficits are sized against the pessimistic capacity in which every
  // assigned UE is an active interferer; dropping idle interferers afterwards
  // can only raise capacity.
  const std::vector<double> all_active(static_cast<std::size_t>(n_ue), 1.0);
  std::vector<ShareRequest> requests(static_cast<std::size_t>(n_ue));
  for (int i = 0; i < n_ue; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const double interf = interference(i, serving, all_active, grid, radio.tx_power_w);
    const double cap = link_capacity(grid.gain(i, serving[iu]), interf, radio).capacity;
    requests[iu].capacity = cap;
    requests[iu].serving_bs = serving[iu];
    requests[iu].deficit_share =
        required_share(recent_[iu], thresholds_[iu], cap, params_.window, params_.threshold_margin);
  }
  out.allocation = allocate(requests, num_bs(), params_.allocation);
  out.shares = out.allocation.share;

  out.capacities.resize(static_cast<std::size_t>(n_ue));
  out.rates.resize(static_cast<std::size_t>(n_ue));
  for (int i = 0; i < n_ue; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const double interf = interference(i, serving, out.shares, grid, radio.tx_power_w);
    out.capacities[iu] = link_capacity(grid.gain(i, serving[iu]), interf, radio).capacity;
    out.rates[iu] = out.capacities[iu] * out.shares[iu];
  }

  std::vector<double> load(static_cast<std::size_t>(num_bs()), 0.0);
  for (int i = 0; i < n_ue; ++i) load[static_cast<std::size_t>(serving[static_cast<std::size_t>(i)])] += out.shares[static_cast<std::size_t>(i)];
  for (double l : load)
    if (l > 1.0 + 1e-9) throw std::logic_error("allocation exceeded a BS resource budget");
  return out;
}

void Environment::refresh_handover_set() {
  predicted_.clear();
  handover_set_.clear();
  if (done()) return;
  const int n_ue = num_ue();
  const std::vector<int> serving = state_.serving();
  std::vector<double> shares(static_cast<std::size_t>(n_ue));
  for (int i = 0; i < n_ue; ++i) shares[static_cast<std::size_t>(i)] = state_.ues[static_cast<std::size_t>(i)].share;
  predicted_.resize(static_cast<std::size_t>(n_ue));
  for (int i = 0; i < n_ue; ++i) {
    const double interf = interference(i, serving, shares, next_grid_, params_.radio.tx_power_w);
    predicted_[static_cast<std::size_t>(i)] =
        link_capacity(next_grid_.gain(i, serving[static_cast<std::size_t>(i)]), interf, params_.radio).capacity;
  }
  handover_set_ = handover_set(state_, predicted_, thresholds_, params_.window);
}

std::vector<int> Environment::masked_backup(const BackupAction& action) const {
  const int n_ue = num_ue();
  if (static_cast<int>(action.backup_bs.size()) != n_ue)
    throw std::invalid_argument("backup action has " + std::to_string(action.backup_bs.size()) +
                                " entries, expected " + std::to_string(n_ue));
  std::vector<int> next = state_.serving();
  for (int i : handover_set_) {
    const int b = action.backup_bs[static_cast<std::size_t>(i)];
    if (b < 0 || b >= num_bs()) throw std::invalid_argument("backup BS index out of range");
    next[static_cast<std::size_t>(i)] = b;
  }
  return next;
}

SlotOutcome Environment::evaluate(const BackupAction& action) const { return evaluate_full(action).first; }

std::pair<SlotOutcome, SlotResolution> Environment::evaluate_full(const BackupAction& action) const {
  if (done()) throw std::logic_error("episode already finished");
  const int n_ue = num_ue();
  SlotOutcome out;
  out.slot = state_.slot;
  out.handover_set = handover_set_;
  out.serving = state_.serving();
  out.next_serving = masked_backup(action);

  SlotResolution next = resolve(next_grid_, out.next_serving);
  out.next_rates = next.rates;

  std::vector<std::vector<double>> windows(static_cast<std::size_t>(n_ue));
  out.handover.resize(static_cast<std::size_t>(n_ue));
  for (int i = 0; i < n_ue; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const UeState& ue = state_.ues[iu];
    out.rates.push_back(ue.rate());
    out.capacities.push_back(ue.capacity);
    out.shares.push_back(ue.share);
    windows[iu].push_back(next.rates[iu]);
    windows[iu].insert(windows[iu].end(), recent_[iu].begin(), recent_[iu].end());
    out.handover[iu] = out.serving[iu] != out.next_serving[iu];
  }
  for (int i = 0; i < n_ue; ++i)
    out.outage.push_back(is_outage(windows[static_cast<std::size_t>(i)], thresholds_[static_cast<std::size_t>(i)], params_.window));

  out.reward = reward(out.rates, windows, thresholds_, out.handover, params_.window, params_.weights);
  return {std::move(out), std::move(next)};
}

SlotOutcome Environment::step(const BackupAction& action) {
  auto [out, next] = evaluate_full(action);
  const int n_ue = num_ue();

  state_.slot += 1;
  for (int i = 0; i < n_ue; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    UeState& ue = state_.ues[iu];
    ue.position = trajectories_[iu].positions[static_cast<std::size_t>(state_.slot)];
    ue.serving = out.next_serving[iu];
    ue.capacity = next.capacities[iu];
    ue.share = next.shares[iu];
    auto& rec = recent_[iu];
    if (!rec.empty()) {
      rec.insert(rec.begin(), next.rates[iu]);
      rec.pop_back();
    }
    ue.rate_history.assign(rec.begin() + (rec.empty() ? 0 : 1), rec.end());
  }
  if (!done()) next_grid_ = build_grid(state_.slot + 1);
  refresh_handover_set();
  return out;
}

}  // namespace mmho
