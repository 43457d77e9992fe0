#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mmho/config.hpp"
#include "mmho/experiment.hpp"
#include "mmho/metrics.hpp"

using namespace mmho;
namespace fs = std::filesystem;

namespace {

ScenarioConfig small_config() {
  ScenarioConfig cfg = desk_config();
  cfg.scenario.duration_s = 2.0;  // 20 slots
  cfg.ddpg.actor_hidden = {32, 16};
  cfg.ddpg.critic_hidden = {32, 16};
  cfg.ddpg.batch_size = 8;
  cfg.ddpg.warmup = 8;
  cfg.training_episodes = 3;
  cfg.eval_episodes = 4;
  cfg.slot_log_episodes = 2;
  cfg.workers = 2;
  return cfg;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mmho_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

SlotLogRow row(int slot, int ue, int serving, int next_serving, double rate, double next_rate, double thr,
               bool handover) {
  SlotLogRow r;
  r.slot = slot;
  r.ue = ue;
  r.serving = serving;
  r.next_serving = next_serving;
  r.rate = rate;
  r.next_rate = next_rate;
  r.threshold = thr;
  r.handover = handover;
  return r;
}

}  // namespace

TEST_CASE("configuration round-trips through JSON") {
  ScenarioConfig cfg = small_config();
  cfg.env.window = 3;
  cfg.env.weights.lambda_outage = 30.0;
  cfg.seed = 99;
  const ScenarioConfig back = config_from_json(to_json(cfg));
  CHECK(to_json(back) == to_json(cfg));
  CHECK(back.env.window == 3);
  CHECK(back.seed == 99);
  CHECK(back.scenario.num_slots() == 20);

  // Partial documents fill in defaults.
  const ScenarioConfig partial = config_from_json(nlohmann::json{{"seed", 5}});
  CHECK(partial.seed == 5);
  CHECK(to_json(partial)["mdp"] == to_json(default_config())["mdp"]);
  CHECK(default_config().scenario.num_slots() == 1000);
  CHECK(desk_config().scenario.num_slots() == 200);
}

TEST_CASE("configuration rejects unknown keys and invalid values") {
  nlohmann::json j = to_json(default_config());
  j["mdp"]["windw_k"] = 2;
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
  CHECK_THROWS_AS(config_from_json(nlohmann::json{{"bogus", 1}}), std::invalid_argument);

  const auto rejects = [](auto mutate) {
    nlohmann::json doc = to_json(default_config());
    mutate(doc);
    INFO(doc.dump());
    CHECK_THROWS_AS(config_from_json(doc), std::invalid_argument);
  };
  rejects([](nlohmann::json& d) { d["mdp"]["window_k"] = 0; });
  rejects([](nlohmann::json& d) { d["mdp"]["lambda_outage"] = 5.0; });  // below lambda_handover
  rejects([](nlohmann::json& d) { d["mdp"]["rth_min_bps"] = 2e9; });    // above rth_max
  rejects([](nlohmann::json& d) { d["slot_s"] = 0.0; });
  rejects([](nlohmann::json& d) { d["ue"] = nlohmann::json::array(); });
  rejects([](nlohmann::json& d) { d["ddpg"]["gamma"] = 1.0; });
  rejects([](nlohmann::json& d) { d["ddpg"]["tau"] = 0.0; });
  rejects([](nlohmann::json& d) { d["ddpg"]["buffer_capacity"] = 4; });
  rejects([](nlohmann::json& d) { d["channel"]["carrier_hz"] = -1.0; });
  rejects([](nlohmann::json& d) { d["bs"][0]["xyz"] = {500.0, 0.0, 10.0}; });  // outside the zone

  // Zero penalties are allowed: the reward is the sum rate.
  nlohmann::json zero = to_json(default_config());
  zero["mdp"]["lambda_outage"] = 0.0;
  zero["mdp"]["lambda_handover"] = 0.0;
  CHECK_NOTHROW(config_from_json(zero));
}

TEST_CASE("metrics of an empty episode are zero") {
  EpisodeLog log;
  log.num_ue = 3;
  const MetricsRecord m = compute_metrics(log);
  CHECK(m.f1_gbps == 0.0);
  CHECK(m.f2_outages == 0);
  CHECK(m.f3_handovers == 0);
}

TEST_CASE("metrics of a hand-built two-slot log") {
  EpisodeLog log;
  log.num_ue = 2;
  log.num_slots = 2;
  log.window = 2;
  // UE 0: rates 1.0, 0.4, then 0.1 Gbps; threshold 0.3 -> slot 1 window (0.1 + 0.4) / 2 = 0.25 <= 0.3.
  // UE 1: rates 0.5, 0.5, 0.5; hands over 0 -> 1 at slot 0.
  log.rows = {row(0, 0, 0, 0, 1.0e9, 0.4e9, 0.3e9, false), row(0, 1, 0, 1, 0.5e9, 0.5e9, 0.3e9, true),
              row(1, 0, 0, 0, 0.4e9, 0.1e9, 0.3e9, false), row(1, 1, 1, 1, 0.5e9, 0.5e9, 0.3e9, false)};
  log.slot_rewards = {1.5 - 10.0, 0.9 - 20.0};
  const MetricsRecord m = compute_metrics(log);
  CHECK(m.f1_gbps == doctest::Approx(2.4).epsilon(1e-14));
  CHECK(m.f2_outages == 1);
  CHECK(m.f3_handovers == 1);
  CHECK(m.total_reward == doctest::Approx(2.4 - 20.0 - 10.0));

  EpisodeLog truncated = log;
  truncated.rows.pop_back();
  CHECK_THROWS_AS(compute_metrics(truncated), std::invalid_argument);
  EpisodeLog broken = log;
  broken.rows[2].rate = 0.7e9;  // disagrees with the previous slot's next_rate
  CHECK_THROWS_AS(compute_metrics(broken), std::invalid_argument);
}

TEST_CASE("summary statistics") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const MeanStderr ms = mean_stderr(v);
  CHECK(ms.mean == 2.5);
  CHECK(ms.stderr_ == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
  // Paired differences -1, -2, -1, -2: mean -1.5, sd 0.57735, t = -5.196, 3 dof -> p = 0.006918.
  const std::vector<double> a{0.0, 0.0, 1.0, 1.0}, b{1.0, 2.0, 2.0, 3.0};
  CHECK(paired_less_p_value(a, b) == doctest::Approx(0.006918).epsilon(1e-3));
  CHECK(paired_less_p_value(b, a) == doctest::Approx(1.0 - 0.006918).epsilon(1e-3));
  CHECK(paired_less_p_value(a, a) == 1.0);
  const std::vector<double> c{1.0, 1.0, 2.0, 2.0};
  CHECK(paired_less_p_value(a, c) == 0.0);
}

TEST_CASE("rewards decompose into the three metrics") {
  const ScenarioConfig cfg = small_config();
  for (PolicyKind kind : {PolicyKind::rand, PolicyKind::wcs}) {
    for (int e = 0; e < 3; ++e) {
      const std::uint64_t seed = evaluation_seed(cfg, e);
      const Policy policy = kind == PolicyKind::rand ? rand_policy(cfg, seed) : wcs_policy(cfg, seed);
      const EpisodeResult res = run_episode(cfg, seed, policy);
      const auto& m = res.metrics;
      const auto& w = cfg.env.weights;
      CHECK(m.total_reward ==
            doctest::Approx(m.f1_gbps - w.lambda_outage * m.f2_outages - w.lambda_handover * m.f3_handovers)
                .epsilon(1e-12));
      CHECK(res.log.rows.size() == static_cast<std::size_t>(cfg.scenario.num_slots() * cfg.scenario.num_ue()));
    }
  }
}

TEST_CASE("training and evaluation seeds are disjoint") {
  const ScenarioConfig cfg = default_config();
  std::vector<std::uint64_t> train, eval;
  for (int e = 0; e < 500; ++e) train.push_back(training_seed(cfg, e));
  for (int e = 0; e < 200; ++e) eval.push_back(evaluation_seed(cfg, e));
  std::sort(train.begin(), train.end());
  for (auto s : eval) CHECK_FALSE(std::binary_search(train.begin(), train.end(), s));
}

TEST_CASE("training with zero episodes yields an initialized checkpoint") {
  ScenarioConfig cfg = small_config();
  cfg.training_episodes = 0;
  const fs::path dir = scratch("train0");
  const TrainingResult tr = run_training(cfg, dir);
  CHECK(tr.curve.empty());
  CHECK(tr.checkpoint.training_episodes == 0);
  CHECK(tr.checkpoint.actor.all_finite());
  CHECK(fs::exists(dir / "checkpoint.bin"));
  CHECK(fs::exists(dir / "config.json"));
  CHECK(config_from_json(nlohmann::json::parse(read_file(dir / "config.json"))).seed == cfg.seed);
  fs::remove_all(dir);
}

TEST_CASE("training is deterministic in the seed") {
  ScenarioConfig cfg = small_config();
  cfg.training_episodes = 10;
  const fs::path a = scratch("train_a"), b = scratch("train_b");
  const TrainingResult ta = run_training(cfg, a);
  run_training(cfg, b);
  CHECK(ta.curve.size() == 10);
  CHECK(read_file(a / "training_curve.csv") == read_file(b / "training_curve.csv"));
  CHECK(read_file(a / "checkpoint.bin") == read_file(b / "checkpoint.bin"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("evaluation") {
  ScenarioConfig cfg = small_config();
  CHECK_THROWS_AS(run_evaluation(cfg, PolicyKind::ddpg, nullptr), std::invalid_argument);

  SUBCASE("CSV output is byte-identical across runs and worker counts") {
    const fs::path a = scratch("eval_a"), b = scratch("eval_b");
    write_evaluation(run_evaluation(cfg, PolicyKind::wcs), cfg, a);
    cfg.workers = 1;
    write_evaluation(run_evaluation(cfg, PolicyKind::wcs), cfg, b);
    CHECK(read_file(a / "eval_wcs.csv") == read_file(b / "eval_wcs.csv"));
    CHECK(read_file(a / "slots_wcs.csv") == read_file(b / "slots_wcs.csv"));
    CHECK(fs::exists(a / "config.json"));
    fs::remove_all(a);
    fs::remove_all(b);
  }

  SUBCASE("records come back in episode order with slot logs for the first episodes") {
    const EvaluationResult ev = run_evaluation(cfg, PolicyKind::rand);
    REQUIRE(ev.records.size() == 4);
    for (int e = 0; e < 4; ++e) {
      CHECK(ev.records[static_cast<std::size_t>(e)].episode == e);
      CHECK(ev.records[static_cast<std::size_t>(e)].seed == evaluation_seed(cfg, e));
    }
    CHECK(ev.slot_logs.size() == 2);
    for (const auto& log : ev.slot_logs) CHECK_NOTHROW(compute_metrics(log));
  }

  SUBCASE("with zero penalties the total reward is the sum rate") {
    cfg.env.weights.lambda_outage = 0.0;
    cfg.env.weights.lambda_handover = 0.0;
    const TrainingResult tr = run_training(cfg);
    for (PolicyKind kind : {PolicyKind::ddpg, PolicyKind::rand, PolicyKind::wcs}) {
      const EvaluationResult ev = run_evaluation(cfg, kind, &tr.checkpoint);
      for (const auto& r : ev.records) CHECK(r.total_reward == doctest::Approx(r.f1_gbps).epsilon(1e-12));
    }
  }
}

TEST_CASE("a lone UE beside its BS never hands over") {
  ScenarioConfig cfg = small_config();
  cfg.scenario.ue_speeds_kmh = {5.0};
  // Every policy keeps UEs outside the handover set on their BS; with no
  // competition and a short range the set stays empty.
  cfg.scenario.zone.width = 20.0;
  cfg.scenario.zone.depth = 20.0;
  cfg.scenario.zone.bs_positions = {{10.0, 10.0, 10.0}};
  cfg.env.rth_min_bps = 0.2e9;
  cfg.env.rth_max_bps = 0.2e9;
  for (PolicyKind kind : {PolicyKind::rand, PolicyKind::wcs}) {
    const EvaluationResult ev = run_evaluation(cfg, kind);
    for (const auto& r : ev.records) CHECK(r.f3_handovers == 0);
  }
}

TEST_CASE("policy names") {
  for (PolicyKind k : {PolicyKind::ddpg, PolicyKind::rand, PolicyKind::wcs}) CHECK(policy_from_string(to_string(k)) == k);
  CHECK_THROWS_AS(policy_from_string("greedy"), std::invalid_argument);
}
