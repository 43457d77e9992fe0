#include "mmho/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>

#include "mmho/log.hpp"

namespace mmho {

namespace {

using nlohmann::json;

double dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw std::invalid_argument(where + " must be an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.contains(it.key())) throw std::invalid_argument("unknown config key '" + where + it.key() + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config key '") + key + "': " + e.what());
  }
}

json array_json(const ArrayGeometry& g) { return json::array({g.n_horizontal, g.n_vertical}); }

void read_array(const json& j, const char* key, ArrayGeometry& g) {
  if (!j.contains(key)) return;
  const auto v = j.at(key).get<std::vector<int>>();
  if (v.size() != 2 || v[0] < 1 || v[1] < 1) throw std::invalid_argument(std::string(key) + " must be [n_h, n_v]");
  g.n_horizontal = v[0];
  g.n_vertical = v[1];
}

}  // namespace

ScenarioConfig default_config() { return ScenarioConfig{}; }

ScenarioConfig desk_config() {
  ScenarioConfig cfg;
  cfg.scenario.duration_s = 20.0;  // 200 slots of 0.1 s
  cfg.training_episodes = 500;
  return cfg;
}

json to_json(const ScenarioConfig& cfg) {
  const auto& sc = cfg.scenario;
  const auto& env = cfg.env;
  const auto& ch = env.channel;
  const auto& dd = cfg.ddpg;
  json j;
  j["zone"] = {{"width", sc.zone.width}, {"depth", sc.zone.depth}};
  j["bs"] = json::array();
  for (const auto& p : sc.zone.bs_positions) j["bs"].push_back({{"xyz", {p.x, p.y, p.z}}});
  j["ue"] = json::array();
  for (double v : sc.ue_speeds_kmh) j["ue"].push_back({{"speed_kmh", v}});
  j["duration_s"] = sc.duration_s;
  j["slot_s"] = sc.slot_s;
  j["seed"] = cfg.seed;
  j["mobility"] = {{"ue_height", sc.mobility.ue_height}, {"turn_probability", sc.mobility.turn_probability}};
  j["radio"] = {{"tx_power_dbm", dbm(env.radio.tx_power_w)},
                {"noise_psd_dbm_hz", dbm(env.radio.noise_psd_w_per_hz)},
                {"bandwidth_hz", env.radio.bandwidth_hz}};
  j["channel"] = {{"carrier_hz", ch.carrier_hz},
                  {"speed_of_light", ch.speed_of_light},
                  {"reference_distance", ch.reference_distance},
                  {"ple_los", ch.ple_los},
                  {"ple_nlos", ch.ple_nlos},
                  {"shadow_sigma_los_db", ch.shadow_sigma_los_db},
                  {"shadow_sigma_nlos_db", ch.shadow_sigma_nlos_db},
                  {"cluster_count_mean", ch.cluster_count_mean},
                  {"subpaths_per_cluster", ch.subpaths_per_cluster},
                  {"elevation_extent_rad", ch.elevation_extent},
                  {"subpath_spread_deg", ch.subpath_spread_deg},
                  {"bs_array", array_json(ch.bs_array)},
                  {"ue_array", array_json(ch.ue_array)}};
  j["mdp"] = {{"window_k", env.window},
              {"lambda_outage", env.weights.lambda_outage},
              {"lambda_handover", env.weights.lambda_handover},
              {"rate_unit_bps", env.weights.rate_unit_bps},
              {"rth_min_bps", env.rth_min_bps},
              {"rth_max_bps", env.rth_max_bps},
              {"threshold_margin", env.threshold_margin},
              {"exhaustive_cap", env.allocation.exhaustive_cap}};
  j["ddpg"] = {{"actor_hidden", dd.actor_hidden},
               {"critic_hidden", dd.critic_hidden},
               {"actor_lr", dd.actor_lr},
               {"critic_lr", dd.critic_lr},
               {"tau", dd.tau},
               {"gamma", dd.gamma},
               {"batch_size", dd.batch_size},
               {"buffer_capacity", dd.buffer_capacity},
               {"warmup", dd.warmup},
               {"updates_per_step", dd.updates_per_step},
               {"ou_theta", dd.ou_theta},
               {"ou_sigma_start", dd.ou_sigma_start},
               {"ou_sigma_end", dd.ou_sigma_end},
               {"reward_scale", dd.reward_scale},
               {"mask_inactive_actions", dd.mask_inactive_actions},
               {"final_layer_init", dd.final_layer_init},
               {"ref_capacity_bps", cfg.ref_capacity_bps}};
  j["baselines"] = {{"vicinity_radius_m", cfg.vicinity.radius_m},
                    {"wcs_iteration_cap_per_ue", cfg.wcs.iteration_cap_per_ue}};
  j["train"] = {{"episodes", cfg.training_episodes}};
  j["eval"] = {{"episodes", cfg.eval_episodes}, {"slot_log_episodes", cfg.slot_log_episodes}, {"workers", cfg.workers}};
  return j;
}

ScenarioConfig config_from_json(const json& j) {
  reject_unknown(j, {"zone", "bs", "ue", "duration_s", "slot_s", "seed", "mobility", "radio", "channel", "mdp", "ddpg",
                     "baselines", "train", "eval"},
                 "");
  ScenarioConfig cfg;
  auto& sc = cfg.scenario;
  auto& env = cfg.env;

  if (j.contains("zone")) {
    const auto& z = j.at("zone");
    reject_unknown(z, {"width", "depth"}, "zone.");
    read(z, "width", sc.zone.width);
    read(z, "depth", sc.zone.depth);
    if (!j.contains("bs")) sc.zone.bs_positions = quadrant_zone(sc.zone.width, sc.zone.depth).bs_positions;
  }
  if (j.contains("bs")) {
    sc.zone.bs_positions.clear();
    for (const auto& b : j.at("bs")) {
      reject_unknown(b, {"xyz"}, "bs[].");
      const auto xyz = b.at("xyz").get<std::vector<double>>();
      if (xyz.size() != 3) throw std::invalid_argument("bs[].xyz must have three coordinates");
      sc.zone.bs_positions.push_back({xyz[0], xyz[1], xyz[2]});
    }
  }
  if (j.contains("ue")) {
    sc.ue_speeds_kmh.clear();
    for (const auto& u : j.at("ue")) {
      reject_unknown(u, {"speed_kmh"}, "ue[].");
      sc.ue_speeds_kmh.push_back(u.at("speed_kmh").get<double>());
    }
  }
  read(j, "duration_s", sc.duration_s);
  read(j, "slot_s", sc.slot_s);
  read(j, "seed", cfg.seed);

  if (j.contains("mobility")) {
    const auto& m = j.at("mobility");
    reject_unknown(m, {"ue_height", "turn_probability"}, "mobility.");
    read(m, "ue_height", sc.mobility.ue_height);
    read(m, "turn_probability", sc.mobility.turn_probability);
  }
  if (j.contains("radio")) {
    const auto& r = j.at("radio");
    reject_unknown(r, {"tx_power_dbm", "noise_psd_dbm_hz", "bandwidth_hz"}, "radio.");
    if (r.contains("tx_power_dbm")) env.radio.tx_power_w = dbm_to_watts(r.at("tx_power_dbm").get<double>());
    if (r.contains("noise_psd_dbm_hz")) env.radio.noise_psd_w_per_hz = dbm_to_watts(r.at("noise_psd_dbm_hz").get<double>());
    read(r, "bandwidth_hz", env.radio.bandwidth_hz);
  }
  if (j.contains("channel")) {
    const auto& c = j.at("channel");
    reject_unknown(c, {"carrier_hz", "speed_of_light", "reference_distance", "ple_los", "ple_nlos", "shadow_sigma_los_db",
                       "shadow_sigma_nlos_db", "cluster_count_mean", "subpaths_per_cluster", "elevation_extent_rad",
                       "subpath_spread_deg", "bs_array", "ue_array"},
                   "channel.");
    auto& ch = env.channel;
    read(c, "carrier_hz", ch.carrier_hz);
    read(c, "speed_of_light", ch.speed_of_light);
    read(c, "reference_distance", ch.reference_distance);
    read(c, "ple_los", ch.ple_los);
    read(c, "ple_nlos", ch.ple_nlos);
    read(c, "shadow_sigma_los_db", ch.shadow_sigma_los_db);
    read(c, "shadow_sigma_nlos_db", ch.shadow_sigma_nlos_db);
    read(c, "cluster_count_mean", ch.cluster_count_mean);
    read(c, "subpaths_per_cluster", ch.subpaths_per_cluster);
    read(c, "elevation_extent_rad", ch.elevation_extent);
    read(c, "subpath_spread_deg", ch.subpath_spread_deg);
    read_array(c, "bs_array", ch.bs_array);
    read_array(c, "ue_array", ch.ue_array);
  }
  if (j.contains("mdp")) {
    const auto& m = j.at("mdp");
    reject_unknown(m, {"window_k", "lambda_outage", "lambda_handover", "rate_unit_bps", "rth_min_bps", "rth_max_bps",
                       "threshold_margin", "exhaustive_cap"},
                   "mdp.");
    read(m, "window_k", env.window);
    read(m, "lambda_outage", env.weights.lambda_outage);
    read(m, "lambda_handover", env.weights.lambda_handover);
    read(m, "rate_unit_bps", env.weights.rate_unit_bps);
    read(m, "rth_min_bps", env.rth_min_bps);
    read(m, "rth_max_bps", env.rth_max_bps);
    read(m, "threshold_margin", env.threshold_margin);
    read(m, "exhaustive_cap", env.allocation.exhaustive_cap);
  }
  if (j.contains("ddpg")) {
    const auto& d = j.at("ddpg");
    reject_unknown(d, {"actor_hidden", "critic_hidden", "actor_lr", "critic_lr", "tau", "gamma", "batch_size",
                       "buffer_capacity", "warmup", "updates_per_step", "ou_theta", "ou_sigma_start", "ou_sigma_end",
                       "reward_scale", "mask_inactive_actions", "final_layer_init", "ref_capacity_bps"},
                   "ddpg.");
    auto& dd = cfg.ddpg;
    read(d, "actor_hidden", dd.actor_hidden);
    read(d, "critic_hidden", dd.critic_hidden);
    read(d, "actor_lr", dd.actor_lr);
    read(d, "critic_lr", dd.critic_lr);
    read(d, "tau", dd.tau);
    read(d, "gamma", dd.gamma);
    read(d, "batch_size", dd.batch_size);
    read(d, "buffer_capacity", dd.buffer_capacity);
    read(d, "warmup", dd.warmup);
    read(d, "updates_per_step", dd.updates_per_step);
    read(d, "ou_theta", dd.ou_theta);
    read(d, "ou_sigma_start", dd.ou_sigma_start);
    read(d, "ou_sigma_end", dd.ou_sigma_end);
    read(d, "reward_scale", dd.reward_scale);
    read(d, "mask_inactive_actions", dd.mask_inactive_actions);
    read(d, "final_layer_init", dd.final_layer_init);
    read(d, "ref_capacity_bps", cfg.ref_capacity_bps);
  }
  if (j.contains("baselines")) {
    const auto& b = j.at("baselines");
    reject_unknown(b, {"vicinity_radius_m", "wcs_iteration_cap_per_ue"}, "baselines.");
    read(b, "vicinity_radius_m", cfg.vicinity.radius_m);
    read(b, "wcs_iteration_cap_per_ue", cfg.wcs.iteration_cap_per_ue);
  }
  if (j.contains("train")) {
    const auto& t = j.at("train");
    reject_unknown(t, {"episodes"}, "train.");
    read(t, "episodes", cfg.training_episodes);
  }
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    reject_unknown(e, {"episodes", "slot_log_episodes", "workers"}, "eval.");
    read(e, "episodes", cfg.eval_episodes);
    read(e, "slot_log_episodes", cfg.slot_log_episodes);
    read(e, "workers", cfg.workers);
  }
  validate(cfg);
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void validate(const ScenarioConfig& cfg) {
  validate(cfg.scenario, cfg.env);
  const auto& w = cfg.env.weights;
  if (w.lambda_outage < w.lambda_handover)
    throw std::invalid_argument("lambda_outage must be at least lambda_handover");
  if (!(w.lambda_outage > w.lambda_handover && w.lambda_handover > 0.0))
    log_warn("reward weights are not strictly ordered lambda_outage > lambda_handover > 0");
  if (!(w.rate_unit_bps > 0.0)) throw std::invalid_argument("rate unit must be positive");
  const auto& ch = cfg.env.channel;
  if (!(ch.carrier_hz > 0.0) || !(ch.speed_of_light > 0.0) || !(ch.reference_distance > 0.0))
    throw std::invalid_argument("carrier, speed of light and reference distance must be positive");
  if (!(ch.ple_los > 0.0) || !(ch.ple_nlos > 0.0)) throw std::invalid_argument("pathloss exponents must be positive");
  if (ch.shadow_sigma_los_db < 0.0 || ch.shadow_sigma_nlos_db < 0.0)
    throw std::invalid_argument("shadowing deviations must be non-negative");
  if (ch.subpaths_per_cluster < 1 || !(ch.cluster_count_mean > 0.0))
    throw std::invalid_argument("cluster statistics must be positive");
  const auto& d = cfg.ddpg;
  if (!(d.gamma >= 0.0 && d.gamma < 1.0)) throw std::invalid_argument("discount must lie in [0, 1)");
  if (d.batch_size < 1 || d.buffer_capacity < static_cast<std::size_t>(d.batch_size))
    throw std::invalid_argument("replay buffer must hold at least one minibatch");
  if (!(d.tau > 0.0 && d.tau <= 1.0)) throw std::invalid_argument("tau must lie in (0, 1]");
  if (!(d.actor_lr > 0.0) || !(d.critic_lr > 0.0)) throw std::invalid_argument("learning rates must be positive");
  if (d.critic_hidden.empty()) throw std::invalid_argument("critic needs a hidden layer");
  if (d.updates_per_step < 0) throw std::invalid_argument("updates_per_step must be non-negative");
  if (!(cfg.ref_capacity_bps > 0.0)) throw std::invalid_argument("ref_capacity_bps must be positive");
  if (cfg.training_episodes < 0 || cfg.eval_episodes < 0) throw std::invalid_argument("episode counts must be >= 0");
  if (cfg.vicinity.radius_m < 0.0) throw std::invalid_argument("vicinity radius must be non-negative");
  if (cfg.wcs.iteration_cap_per_ue < 1) throw std::invalid_argument("WCS iteration cap must be positive");
}

}  // namespace mmho
