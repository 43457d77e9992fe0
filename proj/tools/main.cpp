// Command-line front end: train, eval, bench, probe-channel, channel-dump, print-config.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "mmho/channel.hpp"
#include "mmho/config.hpp"
#include "mmho/ddpg/checkpoint.hpp"
#include "mmho/experiment.hpp"
#include "mmho/link.hpp"
#include "mmho/rng.hpp"

namespace fs = std::filesystem;

namespace {

mmho::ScenarioConfig resolve_config(const std::string& path, int episodes_override, int train_override,
                                    int workers_override) {
  mmho::ScenarioConfig cfg = path.empty() ? mmho::default_config() : mmho::load_config(path);
  if (episodes_override >= 0) cfg.eval_episodes = episodes_override;
  if (train_override >= 0) cfg.training_episodes = train_override;
  if (workers_override >= 0) cfg.workers = workers_override;
  mmho::validate(cfg);
  return cfg;
}

int cmd_probe(const mmho::ScenarioConfig& cfg, double d, int samples, std::uint64_t seed) {
  const auto& ch = cfg.env.channel;
  const double plos = mmho::p_los(d);
  std::cout << std::setprecision(6) << "distance_m        " << d << '\n'
            << "p_los             " << plos << '\n'
            << "p_nlos            " << mmho::p_nlos(d) << '\n'
            << "reference_loss_db " << mmho::reference_loss_db(ch) << '\n'
            << "pathloss_los_db   " << mmho::mean_pathloss_db(d, true, ch) << '\n'
            << "pathloss_nlos_db  " << mmho::mean_pathloss_db(d, false, ch) << '\n';
  if (samples > 0) {
    mmho::Rng rng = mmho::make_stream(seed, mmho::StreamTag::channel, {0xd1});
    const mmho::Point3 bs{0.0, 0.0, 0.0};
    const mmho::Point3 ue{d, 0.0, 0.0};
    int los = 0;
    double gain_db = 0.0;
    for (int k = 0; k < samples; ++k) {
      const auto c = mmho::sample_channel(ue, bs, rng, ch);
      los += c.los ? 1 : 0;
      gain_db += 20.0 * std::log10(mmho::svd_beamforming(c.H).gain);
    }
    std::cout << "sampled_los_rate  " << static_cast<double>(los) / samples << '\n'
              << "mean_bf_gain_db   " << gain_db / samples << "  (" << samples << " draws)\n";
  }
  return 0;
}

int cmd_channel_dump(const mmho::ScenarioConfig& cfg, double d_min, double d_max, double d_step, int per_distance,
                     std::uint64_t seed, const std::string& out_path) {
  if (!(d_min > 0.0) || !(d_max >= d_min) || !(d_step > 0.0))
    throw std::invalid_argument("channel-dump needs 0 < d-min <= d-max and d-step > 0");
  std::ostringstream out;
  out << "d_m,draw,los,pathloss_db,frobenius_norm,bf_gain\n" << std::setprecision(17);
  const int steps = static_cast<int>(std::floor((d_max - d_min) / d_step + 1e-9));
  for (int s = 0; s <= steps; ++s) {
    const double d = d_min + s * d_step;
    for (int k = 0; k < per_distance; ++k) {
      mmho::Rng rng = mmho::make_stream(seed, mmho::StreamTag::channel, {0xd2, static_cast<std::uint64_t>(s),
                                                                         static_cast<std::uint64_t>(k)});
      const auto c = mmho::sample_channel({d, 0.0, 0.0}, {0.0, 0.0, 0.0}, rng, cfg.env.channel);
      out << d << ',' << k << ',' << int{c.los} << ',' << c.pathloss_db << ',' << c.H.norm() << ','
          << mmho::svd_beamforming(c.H).gain << '\n';
    }
  }
  if (out_path.empty()) {
    std::cout << out.str();
  } else {
    mmho::ddpg::write_file_atomic(out_path, out.str());
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"mmWave handover simulator with a DDPG backup-BS policy and reference baselines"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", checkpoint_path, policy_name;
  int eval_episodes = -1, train_episodes = -1, workers = -1;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "scenario config (JSON); defaults when omitted");
    sub->add_option("--workers", workers, "evaluation worker threads (0 = all cores)");
  };

  auto* train = app.add_subcommand("train", "train the DDPG policy and save a checkpoint");
  add_common(train);
  train->add_option("--out", out_dir, "output directory")->required();
  train->add_option("--episodes", train_episodes, "override the training episode count");

  auto* eval = app.add_subcommand("eval", "evaluate one policy on held-out episodes");
  add_common(eval);
  eval->add_option("--policy", policy_name, "ddpg, rand or wcs")->required()->check(CLI::IsMember({"ddpg", "rand", "wcs"}));
  eval->add_option("--checkpoint", checkpoint_path, "checkpoint file (ddpg only)");
  eval->add_option("--out", out_dir, "output directory");
  eval->add_option("--episodes", eval_episodes, "override the evaluation episode count");

  auto* bench = app.add_subcommand("bench", "train, evaluate all policies, write a summary table");
  add_common(bench);
  bench->add_option("--out", out_dir, "output directory");
  bench->add_option("--checkpoint", checkpoint_path, "skip training and use this checkpoint");
  bench->add_option("--episodes", eval_episodes, "override the evaluation episode count");
  bench->add_option("--train-episodes", train_episodes, "override the training episode count");

  double probe_d = 0.0;
  int probe_samples = 0;
  std::uint64_t seed = 1;
  auto* probe = app.add_subcommand("probe-channel", "print blockage and pathloss quantities at a distance");
  probe->add_option("--config", config_path, "scenario config (JSON)");
  probe->add_option("--d", probe_d, "UE-BS distance in meters")->required()->check(CLI::PositiveNumber);
  probe->add_option("--samples", probe_samples, "also draw this many channels");
  probe->add_option("--seed", seed, "seed for sampled channels");

  double d_min = 1.0, d_max = 200.0, d_step = 1.0;
  int per_distance = 1;
  std::string dump_out;
  auto* dump = app.add_subcommand("channel-dump", "CSV of sampled channels over a distance sweep");
  dump->add_option("--config", config_path, "scenario config (JSON)");
  dump->add_option("--d-min", d_min, "first distance [m]");
  dump->add_option("--d-max", d_max, "last distance [m]");
  dump->add_option("--d-step", d_step, "distance step [m]");
  dump->add_option("--draws", per_distance, "channels per distance");
  dump->add_option("--seed", seed, "seed");
  dump->add_option("--out", dump_out, "CSV path (stdout when omitted)");

  auto* print = app.add_subcommand("print-config", "print the fully resolved config");
  print->add_option("--config", config_path, "scenario config (JSON)");

  CLI11_PARSE(app, argc, argv);

  try {
    const mmho::ScenarioConfig cfg = resolve_config(config_path, eval_episodes, train_episodes, workers);
    if (*train) {
      const auto result = mmho::run_training(cfg, fs::path(out_dir), [&](const mmho::CurvePoint& c) {
        if ((c.episode + 1) % 10 == 0 || c.episode + 1 == cfg.training_episodes)
          std::clog << "episode " << c.episode + 1 << "/" << cfg.training_episodes << " reward " << c.total_reward
                    << " F2 " << c.f2_outages << " F3 " << c.f3_handovers << '\n';
      });
      std::cout << "checkpoint written to " << (fs::path(out_dir) / "checkpoint.bin").string() << " ("
                << result.wall_time_s << " s)\n";
    } else if (*eval) {
      const mmho::PolicyKind kind = mmho::policy_from_string(policy_name);
      std::optional<mmho::ddpg::PolicyCheckpoint> ckpt;
      if (kind == mmho::PolicyKind::ddpg) {
        if (checkpoint_path.empty()) throw std::invalid_argument("--checkpoint is required for --policy ddpg");
        ckpt = mmho::ddpg::load_checkpoint(checkpoint_path);
      }
      const auto result = mmho::run_evaluation(cfg, kind, ckpt ? &*ckpt : nullptr);
      mmho::write_evaluation(result, cfg, out_dir);
      const auto s = mmho::summarize(result);
      std::cout << std::fixed << std::setprecision(3) << mmho::to_string(kind) << ": F1 " << s.f1.mean << " +- "
                << s.f1.stderr_ << " Gbps, F2 " << s.f2.mean << " +- " << s.f2.stderr_ << ", F3 " << s.f3.mean
                << " +- " << s.f3.stderr_ << " over " << result.records.size() << " episodes\n";
    } else if (*bench) {
      std::optional<fs::path> ckpt;
      if (!checkpoint_path.empty()) ckpt = checkpoint_path;
      const auto result = mmho::run_bench(cfg, out_dir, ckpt);
      std::cout << mmho::format_summary(result);
    } else if (*probe) {
      return cmd_probe(cfg, probe_d, probe_samples, seed);
    } else if (*dump) {
      return cmd_channel_dump(cfg, d_min, d_max, d_step, per_distance, seed, dump_out);
    } else if (*print) {
      std::cout << mmho::to_json(cfg).dump(2) << '\n';
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
