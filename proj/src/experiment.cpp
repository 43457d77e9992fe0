#include "mmho/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mmho/baselines.hpp"
#include "mmho/ddpg/encoding.hpp"
#include "mmho/ddpg/noise.hpp"
#include "mmho/log.hpp"
#include "mmho/rng.hpp"

namespace mmho {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void write_text(const std::filesystem::path& path, const std::string& text) { ddpg::write_file_atomic(path, text); }

void write_config_echo(const ScenarioConfig& cfg, const std::filesystem::path& dir) {
  write_text(dir / "config.json", to_json(cfg).dump(2) + "\n");
}

std::string curve_csv(const std::vector<CurvePoint>& curve) {
  std::ostringstream out;
  out << "episode,seed,total_reward,f1_gbps,f2_outages,f3_handovers,mean_critic_loss,exploration_sigma\n";
  out << std::setprecision(17);
  for (const auto& c : curve)
    out << c.episode << ',' << c.seed << ',' << c.total_reward << ',' << c.f1_gbps << ',' << c.f2_outages << ','
        << c.f3_handovers << ',' << c.mean_critic_loss << ',' << c.exploration_sigma << '\n';
  return out.str();
}

nlohmann::json net_health(const ddpg::DenseNet& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : net.layers())
    layers.push_back({{"weight_finite", l.weight.allFinite()},
                      {"bias_finite", l.bias.allFinite()},
                      {"weight_max_abs", l.weight.allFinite() ? l.weight.cwiseAbs().maxCoeff() : -1.0}});
  return layers;
}

[[noreturn]] void abort_training(const std::optional<std::filesystem::path>& out_dir, const ddpg::DdpgAgent& agent,
                                 int episode, int slot, const ddpg::TrainStats& stats) {
  std::ostringstream msg;
  msg << "non-finite training state at episode " << episode << " slot " << slot << " (critic loss "
      << stats.critic_loss << ", actor objective " << stats.actor_objective << ")";
  if (out_dir) {
    nlohmann::json diag = {{"episode", episode},
                           {"slot", slot},
                           {"critic_loss", std::isfinite(stats.critic_loss) ? stats.critic_loss : -1.0},
                           {"critic_loss_finite", std::isfinite(stats.critic_loss)},
                           {"actor_objective_finite", std::isfinite(stats.actor_objective)},
                           {"actor", net_health(agent.actor())},
                           {"critic", net_health(agent.critic())}};
    write_text(*out_dir / "diagnostic.json", diag.dump(2) + "\n");
    msg << "; diagnostic written to " << (*out_dir / "diagnostic.json").string();
  }
  throw std::runtime_error(msg.str());
}

ddpg::StateEncoder encoder_for(const ScenarioConfig& cfg) {
  auto enc = ddpg::StateEncoder::for_scenario(cfg.scenario, cfg.env);
  enc.ref_capacity_bps = cfg.ref_capacity_bps;
  enc.ref_rate_bps = cfg.ref_capacity_bps;
  return enc;
}

}  // namespace

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::ddpg: return "ddpg";
    case PolicyKind::rand: return "rand";
    case PolicyKind::wcs: return "wcs";
  }
  return "?";
}

PolicyKind policy_from_string(std::string_view name) {
  if (name == "ddpg") return PolicyKind::ddpg;
  if (name == "rand") return PolicyKind::rand;
  if (name == "wcs") return PolicyKind::wcs;
  throw std::invalid_argument("unknown policy '" + std::string(name) + "' (expected ddpg, rand or wcs)");
}

std::uint64_t training_seed(const ScenarioConfig& cfg, int episode) {
  return derive_seed(cfg.seed, StreamTag::episode, {0, static_cast<std::uint64_t>(episode)});
}

std::uint64_t evaluation_seed(const ScenarioConfig& cfg, int episode) {
  return derive_seed(cfg.seed, StreamTag::episode, {1, static_cast<std::uint64_t>(episode)});
}

EpisodeResult run_episode(const ScenarioConfig& cfg, std::uint64_t seed, const Policy& policy) {
  const auto start = Clock::now();
  Environment env(cfg.scenario, cfg.env, seed);
  EpisodeResult res;
  res.log.seed = seed;
  res.log.num_ue = env.num_ue();
  res.log.num_slots = env.horizon();
  res.log.window = cfg.env.window;
  res.log.weights = cfg.env.weights;
  res.log.rows.reserve(static_cast<std::size_t>(env.horizon() * env.num_ue()));
  while (!env.done()) {
    const NetworkState before = env.state();
    const BackupAction action = policy(env);
    const SlotOutcome out = env.step(action);
    res.log.record(before, env.thresholds(), out);
  }
  res.metrics = compute_metrics(res.log);
  res.metrics.wall_time_s = seconds_since(start);
  return res;
}

Policy ddpg_policy(const ddpg::DdpgAgent& agent, const ddpg::StateEncoder& encoder) {
  return [&agent, encoder](const Environment& env) {
    const ddpg::Vector scores = agent.act(encoder.encode(env.state()));
    return encoder.decode(scores, env.state(), env.current_handover_set());
  };
}

Policy rand_policy(const ScenarioConfig& cfg, std::uint64_t episode_seed) {
  auto rng = std::make_shared<Rng>(make_stream(episode_seed, StreamTag::baseline, {0}));
  const VicinityRule rule = cfg.vicinity;
  return [rng, rule](const Environment& env) {
    return random_backup(env.state(), env.current_handover_set(), env.scenario().zone, rule, *rng);
  };
}

Policy wcs_policy(const ScenarioConfig& cfg, std::uint64_t episode_seed) {
  auto rng = std::make_shared<Rng>(make_stream(episode_seed, StreamTag::baseline, {1}));
  const WcsParams params = cfg.wcs;
  return [rng, params](const Environment& env) { return wcs_backup(env, *rng, params); };
}

ddpg::DdpgAgent agent_from_checkpoint(const ddpg::PolicyCheckpoint& ckpt, const ScenarioConfig& cfg) {
  const auto enc = encoder_for(cfg);
  if (ckpt.actor.input_dim() != enc.state_dim() || ckpt.actor.output_dim() != enc.action_dim())
    throw std::invalid_argument("checkpoint network shape (" + std::to_string(ckpt.actor.input_dim()) + " -> " +
                                std::to_string(ckpt.actor.output_dim()) + ") does not match the scenario (" +
                                std::to_string(enc.state_dim()) + " -> " + std::to_string(enc.action_dim()) + ")");
  return ddpg::DdpgAgent(ckpt.actor, ckpt.critic, ckpt.actor_target, ckpt.critic_target, cfg.ddpg);
}

TrainingResult run_training(const ScenarioConfig& cfg, const std::optional<std::filesystem::path>& out_dir,
                            const std::function<void(const CurvePoint&)>& progress) {
  validate(cfg);
  const auto start = Clock::now();
  if (out_dir) {
    std::filesystem::create_directories(*out_dir);
    write_config_echo(cfg, *out_dir);
  }
  const auto enc = encoder_for(cfg);
  ddpg::DdpgAgent agent(enc.state_dim(), enc.action_dim(), cfg.ddpg, cfg.seed);
  ddpg::ReplayBuffer buffer(cfg.ddpg.buffer_capacity);
  ddpg::OUNoise noise(enc.action_dim(), cfg.ddpg.ou_theta, cfg.ddpg.ou_sigma_start);
  Rng explore = make_stream(cfg.seed, StreamTag::exploration);
  Rng replay = make_stream(cfg.seed, StreamTag::replay);
  const auto min_fill = static_cast<std::size_t>(std::max(cfg.ddpg.warmup, cfg.ddpg.batch_size));

  TrainingResult result;
  for (int ep = 0; ep < cfg.training_episodes; ++ep) {
    const std::uint64_t seed = training_seed(cfg, ep);
    Environment env(cfg.scenario, cfg.env, seed);
    noise.reset();
    noise.set_sigma(ddpg::linear_decay(cfg.ddpg.ou_sigma_start, cfg.ddpg.ou_sigma_end, ep, cfg.training_episodes));

    EpisodeLog log;
    log.seed = seed;
    log.num_ue = env.num_ue();
    log.num_slots = env.horizon();
    log.window = cfg.env.window;
    log.weights = cfg.env.weights;
    double loss_sum = 0.0;
    int updates = 0;

    ddpg::Vector s = enc.encode(env.state());
    while (!env.done()) {
      const NetworkState before = env.state();
      const ddpg::Vector a = (agent.act(s) + noise.sample(explore)).cwiseMax(-1.0).cwiseMin(1.0);
      const std::vector<int> hset = env.current_handover_set();
      const SlotOutcome out = env.step(enc.decode(a, before, hset));
      log.record(before, env.thresholds(), out);
      ddpg::Vector s_next = enc.encode(env.state());
      ddpg::Transition tr{s, a, out.reward.total * cfg.ddpg.reward_scale, s_next, env.done(), {}, {}};
      if (cfg.ddpg.mask_inactive_actions) {
        tr.action_mask = enc.action_mask(hset);
        tr.next_action_mask = enc.action_mask(env.current_handover_set());
      }
      buffer.push(std::move(tr));
      for (int u = 0; buffer.size() >= min_fill && u < cfg.ddpg.updates_per_step; ++u) {
        const ddpg::TrainStats stats = agent.train_step(buffer, replay);
        if (!std::isfinite(stats.critic_loss) || !std::isfinite(stats.actor_objective) || !agent.all_finite())
          abort_training(out_dir, agent, ep, out.slot, stats);
        loss_sum += stats.critic_loss;
        ++updates;
      }
      s = std::move(s_next);
    }

    const MetricsRecord m = compute_metrics(log);
    CurvePoint c;
    c.episode = ep;
    c.seed = seed;
    c.total_reward = m.total_reward;
    c.f1_gbps = m.f1_gbps;
    c.f2_outages = m.f2_outages;
    c.f3_handovers = m.f3_handovers;
    c.mean_critic_loss = updates > 0 ? loss_sum / updates : 0.0;
    c.exploration_sigma = noise.sigma();
    result.curve.push_back(c);
    if (progress) progress(c);
  }

  result.checkpoint = ddpg::PolicyCheckpoint{agent.actor(), agent.critic(), agent.actor_target(),
                                             agent.critic_target_net(), cfg.seed, cfg.training_episodes,
                                             nlohmann::json{{"config", to_json(cfg)}}};
  result.wall_time_s = seconds_since(start);
  if (out_dir) {
    write_text(*out_dir / "training_curve.csv", curve_csv(result.curve));
    ddpg::save_checkpoint(result.checkpoint, *out_dir / "checkpoint.bin");
  }
  return result;
}

EvaluationResult run_evaluation(const ScenarioConfig& cfg, PolicyKind policy, const ddpg::PolicyCheckpoint* checkpoint) {
  validate(cfg);
  if (policy == PolicyKind::ddpg && checkpoint == nullptr)
    throw std::invalid_argument("ddpg evaluation needs a checkpoint");
  const auto start = Clock::now();
  const auto enc = encoder_for(cfg);
  std::optional<ddpg::DdpgAgent> agent;
  if (policy == PolicyKind::ddpg) agent.emplace(agent_from_checkpoint(*checkpoint, cfg));

  const int n = cfg.eval_episodes;
  std::vector<EpisodeResult> results(static_cast<std::size_t>(n));
  std::atomic<int> next{0};
  const auto work = [&] {
    for (int ep = next.fetch_add(1); ep < n; ep = next.fetch_add(1)) {
      const std::uint64_t seed = evaluation_seed(cfg, ep);
      Policy p;
      switch (policy) {
        case PolicyKind::ddpg: p = ddpg_policy(*agent, enc); break;
        case PolicyKind::rand: p = rand_policy(cfg, seed); break;
        case PolicyKind::wcs: p = wcs_policy(cfg, seed); break;
      }
      auto& r = results[static_cast<std::size_t>(ep)];
      r = run_episode(cfg, seed, p);
      r.metrics.episode = ep;
      if (ep >= cfg.slot_log_episodes) r.log.rows = {};
    }
  };

  int workers = cfg.workers > 0 ? cfg.workers : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, std::max(n, 1));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    {
      std::vector<std::jthread> pool;
      for (int w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          try {
            work();
          } catch (...) {
            errors[static_cast<std::size_t>(w)] = std::current_exception();
            next.store(n);
          }
        });
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  EvaluationResult out;
  out.policy = policy;
  for (auto& r : results) {
    out.records.push_back(r.metrics);
    if (r.metrics.episode < cfg.slot_log_episodes) out.slot_logs.push_back(std::move(r.log));
  }
  out.wall_time_s = seconds_since(start);
  return out;
}

void write_evaluation(const EvaluationResult& result, const ScenarioConfig& cfg, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_config_echo(cfg, out_dir);
  const std::string name(to_string(result.policy));
  std::ostringstream episodes, slots;
  write_episode_csv(episodes, result.records);
  write_slot_csv(slots, result.slot_logs);
  write_text(out_dir / ("eval_" + name + ".csv"), episodes.str());
  write_text(out_dir / ("slots_" + name + ".csv"), slots.str());
}

PolicySummary summarize(const EvaluationResult& result) {
  std::vector<double> f1, f2, f3, rw;
  for (const auto& r : result.records) {
    f1.push_back(r.f1_gbps);
    f2.push_back(static_cast<double>(r.f2_outages));
    f3.push_back(static_cast<double>(r.f3_handovers));
    rw.push_back(r.total_reward);
  }
  return {result.policy, mean_stderr(f1), mean_stderr(f2), mean_stderr(f3), mean_stderr(rw)};
}

BenchResult run_bench(const ScenarioConfig& cfg, const std::filesystem::path& out_dir,
                      const std::optional<std::filesystem::path>& checkpoint) {
  validate(cfg);
  std::filesystem::create_directories(out_dir);
  write_config_echo(cfg, out_dir);
  BenchResult bench;
  ddpg::PolicyCheckpoint ckpt;
  if (checkpoint) {
    ckpt = ddpg::load_checkpoint(*checkpoint);
  } else {
    TrainingResult tr = run_training(cfg, out_dir / "train");
    bench.training_wall_time_s = tr.wall_time_s;
    ckpt = std::move(tr.checkpoint);
  }
  for (PolicyKind kind : {PolicyKind::ddpg, PolicyKind::rand, PolicyKind::wcs}) {
    EvaluationResult ev = run_evaluation(cfg, kind, &ckpt);
    write_evaluation(ev, cfg, out_dir);
    bench.summaries.push_back(summarize(ev));
    bench.evaluations.push_back(std::move(ev));
  }
  const auto column = [](const EvaluationResult& ev, auto field) {
    std::vector<double> v;
    for (const auto& r : ev.records) v.push_back(static_cast<double>(field(r)));
    return v;
  };
  const auto f2 = [](const MetricsRecord& r) { return r.f2_outages; };
  const auto f3 = [](const MetricsRecord& r) { return r.f3_handovers; };
  bench.p_f2_ddpg_below_rand = paired_less_p_value(column(bench.evaluations[0], f2), column(bench.evaluations[1], f2));
  bench.p_f3_ddpg_below_rand = paired_less_p_value(column(bench.evaluations[0], f3), column(bench.evaluations[1], f3));
  write_text(out_dir / "summary.txt", format_summary(bench));
  return bench;
}

std::string format_summary(const BenchResult& bench) {
  std::ostringstream out;
  out << std::fixed;
  out << "policy   episodes   F1 sum rate [Gbps]      F2 outages           F3 handovers         reward\n";
  for (std::size_t k = 0; k < bench.summaries.size(); ++k) {
    const auto& s = bench.summaries[k];
    const auto pm = [&](const MeanStderr& m, int prec) {
      std::ostringstream c;
      c << std::fixed << std::setprecision(prec) << m.mean << " +- " << m.stderr_;
      return c.str();
    };
    out << std::left << std::setw(9) << to_string(s.policy) << std::setw(11) << bench.evaluations[k].records.size()
        << std::setw(24) << pm(s.f1, 2) << std::setw(21) << pm(s.f2, 2) << std::setw(21) << pm(s.f3, 2)
        << pm(s.reward, 2) << '\n';
  }
  out << std::setprecision(4);
  out << "paired one-sided p (ddpg < rand): F2 " << bench.p_f2_ddpg_below_rand << ", F3 " << bench.p_f3_ddpg_below_rand
      << '\n';
  out << std::setprecision(1) << "wall time [s]: training " << bench.training_wall_time_s;
  for (const auto& ev : bench.evaluations) out << ", " << to_string(ev.policy) << ' ' << ev.wall_time_s;
  out << '\n';
  return out.str();
}

}  // namespace mmho
