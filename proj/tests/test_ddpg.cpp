#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <stdexcept>
#include <vector>

#include "mmho/ddpg/agent.hpp"
#include "mmho/ddpg/checkpoint.hpp"
#include "mmho/ddpg/encoding.hpp"
#include "mmho/ddpg/noise.hpp"
#include "mmho/ddpg/replay.hpp"
#include "mmho/env.hpp"
#include "support/toy_mdp.hpp"

using namespace mmho;
using namespace mmho::ddpg;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = u(rng);
  return m;
}

std::vector<double> flatten(const Gradients& g) {
  std::vector<double> out;
  for (const auto& l : g) {
    for (Eigen::Index c = 0; c < l.weight.cols(); ++c)
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r) out.push_back(l.weight(r, c));
    for (Eigen::Index r = 0; r < l.bias.size(); ++r) out.push_back(l.bias(r));
  }
  return out;
}

// Central differences of f over every parameter of net, in flatten() order of Gradients above.
template <typename F>
std::vector<double> numeric_gradient(DenseNet& net, F&& f, double h = 1e-6) {
  std::vector<double> out;
  for (auto& layer : net.layers()) {
    for (Eigen::Index c = 0; c < layer.weight.cols(); ++c)
      for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
        const double keep = layer.weight(r, c);
        layer.weight(r, c) = keep + h;
        const double up = f();
        layer.weight(r, c) = keep - h;
        const double down = f();
        layer.weight(r, c) = keep;
        out.push_back((up - down) / (2.0 * h));
      }
    for (Eigen::Index r = 0; r < layer.bias.size(); ++r) {
      const double keep = layer.bias(r);
      layer.bias(r) = keep + h;
      const double up = f();
      layer.bias(r) = keep - h;
      const double down = f();
      layer.bias(r) = keep;
      out.push_back((up - down) / (2.0 * h));
    }
  }
  return out;
}

double relative_error(const std::vector<double>& a, const std::vector<double>& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff += (a[i] - b[i]) * (a[i] - b[i]);
    scale += a[i] * a[i] + b[i] * b[i];
  }
  return std::sqrt(diff) / std::max(std::sqrt(scale), 1e-12);
}

Batch random_batch(int state_dim, int action_dim, int m, Rng& rng) {
  Batch b;
  b.states = random_matrix(state_dim, m, rng);
  b.actions = random_matrix(action_dim, m, rng);
  b.rewards = random_matrix(m, 1, rng).col(0);
  b.next_states = random_matrix(state_dim, m, rng);
  b.not_terminal = Vector::Ones(m);
  return b;
}

}  // namespace

TEST_CASE("network shapes and activations") {
  const DenseNet actor = make_actor(56, 28, {256, 128});
  CHECK(actor.input_dim() == 56);
  CHECK(actor.output_dim() == 28);
  CHECK(actor.layers().back().activation == Activation::tanh);
  const DenseNet critic = make_critic(56, 28, {256, 128});
  CHECK(critic.output_dim() == 1);
  CHECK(critic.side_layer() == 1);
  CHECK(critic.layers()[1].weight.cols() == 256 + 28);
  CHECK(activation_from_string(to_string(Activation::relu)) == Activation::relu);
  CHECK_THROWS(activation_from_string("sigmoid"));
}

TEST_CASE("actor outputs stay inside [-1, 1] and the forward pass is pure") {
  Rng rng(1);
  DenseNet actor = make_actor(6, 4, {16, 8});
  actor.init(rng, 1.0);
  const Matrix x = 10.0 * random_matrix(6, 50, rng);
  const Matrix y = actor.forward(x);
  CHECK(y.maxCoeff() <= 1.0);
  CHECK(y.minCoeff() >= -1.0);
  CHECK(actor.forward(x) == y);
}

TEST_CASE("final layer initialization is small") {
  Rng rng(2);
  DenseNet actor = make_actor(56, 28, {256, 128});
  actor.init(rng, 3e-3);
  CHECK(actor.layers().back().weight.cwiseAbs().maxCoeff() <= 3e-3);
  const double fan_in = 1.0 / std::sqrt(56.0);
  CHECK(actor.layers().front().weight.cwiseAbs().maxCoeff() <= fan_in);
}

TEST_CASE("backprop matches finite differences on random networks") {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const int in = 2 + trial % 4, side = 1 + trial % 3, out = 1 + trial % 2;
    const bool with_side = trial % 2 == 0;
    std::vector<Activation> acts{Activation::relu, Activation::tanh, trial % 3 ? Activation::identity : Activation::tanh};
    DenseNet net({in, 7, 5, out}, acts, with_side ? 1 : -1, with_side ? side : 0);
    net.init(rng, 0.5);
    const Matrix x = random_matrix(in, 4, rng);
    const Matrix s = random_matrix(side, 4, rng);
    const Matrix coeff = random_matrix(out, 4, rng);
    const Matrix* side_ptr = with_side ? &s : nullptr;

    DenseNet::Tape tape;
    net.forward(x, side_ptr, tape);
    const auto bp = net.backward(tape, coeff);
    const auto loss = [&] { return net.forward(x, side_ptr).cwiseProduct(coeff).sum(); };
    CHECK(relative_error(flatten(bp.grads), numeric_gradient(net, loss)) <= 1e-4);

    // Input and side-input gradients.
    Matrix xp = x;
    std::vector<double> num_dx, ana_dx;
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      for (Eigen::Index r = 0; r < x.rows(); ++r) {
        xp(r, c) = x(r, c) + 1e-6;
        const double up = net.forward(xp, side_ptr).cwiseProduct(coeff).sum();
        xp(r, c) = x(r, c) - 1e-6;
        const double down = net.forward(xp, side_ptr).cwiseProduct(coeff).sum();
        xp(r, c) = x(r, c);
        num_dx.push_back((up - down) / 2e-6);
        ana_dx.push_back(bp.d_input(r, c));
      }
    CHECK(relative_error(ana_dx, num_dx) <= 1e-4);
    if (with_side) {
      Matrix sp = s;
      std::vector<double> num_ds, ana_ds;
      for (Eigen::Index c = 0; c < s.cols(); ++c)
        for (Eigen::Index r = 0; r < s.rows(); ++r) {
          sp(r, c) = s(r, c) + 1e-6;
          const double up = net.forward(x, &sp).cwiseProduct(coeff).sum();
          sp(r, c) = s(r, c) - 1e-6;
          const double down = net.forward(x, &sp).cwiseProduct(coeff).sum();
          sp(r, c) = s(r, c);
          num_ds.push_back((up - down) / 2e-6);
          ana_ds.push_back(bp.d_side(r, c));
        }
      CHECK(relative_error(ana_ds, num_ds) <= 1e-4);
    }
  }
}

TEST_CASE("critic and actor objective gradients match finite differences") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    DdpgConfig cfg;
    cfg.actor_hidden = {6, 5};
    cfg.critic_hidden = {7, 4};
    cfg.final_layer_init = 0.3;
    DdpgAgent agent(3, 2, cfg, 100 + trial);
    const Batch batch = random_batch(3, 2, 5, rng);
    const Vector y = agent.critic_targets(batch);

    const Gradients gc = agent.critic_loss_gradient(batch, y);
    const auto critic_num = numeric_gradient(agent.critic(), [&] { return agent.critic_loss(batch, y); });
    CHECK(relative_error(flatten(gc), critic_num) <= 1e-4);

    const Gradients ga = agent.actor_objective_gradient(batch.states);
    const auto actor_num = numeric_gradient(agent.actor(), [&] { return agent.actor_objective(batch.states); });
    CHECK(relative_error(flatten(ga), actor_num) <= 1e-4);
  }
}

TEST_CASE("masked action entries carry no gradient and no value") {
  Rng rng(41);
  DdpgConfig cfg;
  cfg.actor_hidden = {6, 5};
  cfg.critic_hidden = {7, 4};
  cfg.final_layer_init = 0.3;
  for (int trial = 0; trial < 10; ++trial) {
    DdpgAgent agent(3, 4, cfg, 300 + trial);
    Batch batch = random_batch(3, 4, 5, rng);
    batch.action_masks = Matrix::Zero(4, 5);
    batch.action_masks.topRows(2).setOnes();
    batch.next_action_masks = Matrix::Ones(4, 5);
    batch.next_action_masks.row(3).setZero();

    // Masked gradients still match finite differences of the masked objective.
    const Gradients ga = agent.actor_objective_gradient(batch.states, nullptr, batch.action_masks);
    const auto num = numeric_gradient(agent.actor(), [&] { return agent.actor_objective(batch.states, batch.action_masks); });
    CHECK(relative_error(flatten(ga), num) <= 1e-4);
    // Output rows 2 and 3 of the actor never influence the objective.
    const auto& last = ga.back();
    CHECK(last.weight.bottomRows(2).isZero(0.0));
    CHECK(last.bias.tail(2).isZero(0.0));

    // Changing masked-out stored actions leaves the critic loss untouched.
    const Vector y = agent.critic_targets(batch);
    Batch perturbed = batch;
    perturbed.actions.bottomRows(2).array() += 0.7;
    CHECK(agent.critic_loss(perturbed, y) == agent.critic_loss(batch, y));
    const Gradients gc = agent.critic_loss_gradient(batch, y);
    const auto cnum = numeric_gradient(agent.critic(), [&] { return agent.critic_loss(batch, y); });
    CHECK(relative_error(flatten(gc), cnum) <= 1e-4);
  }
}

TEST_CASE("replay batches carry action masks") {
  ReplayBuffer buf(4);
  Vector mask(2);
  mask << 1.0, 0.0;
  buf.push({Vector::Zero(1), Vector::Ones(2), 1.0, Vector::Zero(1), false, mask, Vector::Ones(2)});
  buf.push({Vector::Zero(1), Vector::Ones(2), 2.0, Vector::Zero(1), true, Vector::Zero(2), Vector::Zero(2)});
  const Batch b = buf.gather({0, 1});
  REQUIRE(b.action_masks.cols() == 2);
  CHECK(b.action_masks.col(0) == mask);
  CHECK(b.next_action_masks.col(0) == Vector::Ones(2));
  CHECK(b.action_masks.col(1).isZero());

  ReplayBuffer mixed(4);
  mixed.push({Vector::Zero(1), Vector::Ones(2), 1.0, Vector::Zero(1), false, mask, mask});
  mixed.push({Vector::Zero(1), Vector::Ones(2), 1.0, Vector::Zero(1), false, {}, {}});
  CHECK_THROWS_AS(mixed.gather({0, 1}), std::invalid_argument);
}

TEST_CASE("critic targets") {
  DdpgConfig cfg;
  cfg.actor_hidden = {4};
  cfg.critic_hidden = {4};
  cfg.gamma = 0.0;
  DdpgAgent myopic(2, 2, cfg, 1);
  const Vector s = Vector::Ones(2);
  CHECK(myopic.critic_target(1.25, s, false) == 1.25);

  cfg.gamma = 0.99;
  DdpgAgent agent(2, 2, cfg, 1);
  CHECK(agent.critic_target(-3.0, s, true) == -3.0);
  // Force Q' = 10 by zeroing the target critic's last layer weights and setting its bias.
  DdpgAgent forced(agent.actor(), agent.critic(), agent.actor_target(), [&] {
    DenseNet c = agent.critic_target_net();
    c.layers().back().weight.setZero();
    c.layers().back().bias.setConstant(10.0);
    return c;
  }(), cfg);
  CHECK(forced.critic_target(1.0, s, false) == doctest::Approx(10.9).epsilon(1e-15));

  Rng batch_rng(5);
  Batch b = random_batch(2, 2, 3, batch_rng);
  b.rewards = Vector::Constant(3, 1.0);
  b.not_terminal << 1.0, 0.0, 1.0;
  const Vector y = forced.critic_targets(b);
  CHECK(y(0) == doctest::Approx(10.9));
  CHECK(y(1) == 1.0);
}

TEST_CASE("soft updates") {
  Rng rng(6);
  DenseNet online = make_actor(4, 3, {8});
  DenseNet target = make_actor(4, 3, {8});
  online.init(rng);
  target.init(rng);
  DenseNet copy = target;
  copy.soft_update_from(online, 1.0);
  CHECK(parameter_distance(copy, online) == 0.0);

  const double tau = 0.05;
  double prev = parameter_distance(target, online);
  for (int k = 0; k < 20; ++k) {
    target.soft_update_from(online, tau);
    const double d = parameter_distance(target, online);
    CHECK(d == doctest::Approx((1.0 - tau) * prev).epsilon(1e-9));
    prev = d;
  }
}

TEST_CASE("a small critic step does not increase the loss on its minibatch") {
  Rng rng(7);
  DdpgConfig base;
  base.actor_hidden = {8};
  base.critic_hidden = {8, 8};
  for (double lr : {1e-3, 1e-4, 1e-5}) {
    DdpgAgent agent(3, 2, base, 9);
    const Batch batch = random_batch(3, 2, 16, rng);
    const Vector y = agent.critic_targets(batch);
    const double before = agent.critic_loss(batch, y);
    Adam opt(agent.critic(), lr);
    opt.step(agent.critic(), agent.critic_loss_gradient(batch, y));
    CHECK(agent.critic_loss(batch, y) <= before);
  }
}

TEST_CASE("replay buffer") {
  ReplayBuffer buf(5);
  Rng rng(8);
  CHECK_THROWS(buf.sample(1, rng));
  for (int k = 0; k < 8; ++k) buf.push({Vector::Constant(2, k), Vector::Constant(1, k), double(k), Vector::Zero(2), false});
  CHECK(buf.size() == 5);
  std::set<double> rewards;
  for (std::size_t i = 0; i < buf.size(); ++i) rewards.insert(buf.at(i).reward);
  CHECK(rewards == std::set<double>{3, 4, 5, 6, 7});  // oldest overwritten
  CHECK_THROWS_AS(buf.push({Vector::Zero(2), Vector::Zero(1), std::nan(""), Vector::Zero(2), false}),
                  std::invalid_argument);

  ReplayBuffer big(1000);
  for (int k = 0; k < 40; ++k) big.push({Vector::Zero(1), Vector::Zero(1), double(k), Vector::Zero(1), k == 39});
  std::vector<int> hits(40, 0);
  for (int draw = 0; draw < 4000; ++draw) {
    const auto idx = big.sample_indices(32, rng);
    std::set<std::size_t> unique(idx.begin(), idx.end());
    REQUIRE(unique.size() == idx.size());
    for (auto i : idx) ++hits[i];
  }
  // Each index is included with probability 32/40.
  for (int h : hits) CHECK(std::abs(h / 4000.0 - 0.8) < 0.04);
  const Batch b = big.gather({39, 0});
  CHECK(b.not_terminal(0) == 0.0);
  CHECK(b.not_terminal(1) == 1.0);
}

TEST_CASE("OU noise is mean reverting and its sigma decays linearly") {
  OUNoise noise(3, 0.15, 0.2);
  Rng rng(9);
  double sq = 0.0;
  const int n = 20000;
  for (int k = 0; k < n; ++k) {
    const Vector& x = noise.sample(rng);
    REQUIRE(x.allFinite());
    sq += x(0) * x(0);
  }
  // Stationary variance of x <- (1 - theta) x + sigma eps is sigma^2 / (1 - (1 - theta)^2).
  const double var = 0.04 / (1.0 - 0.85 * 0.85);
  CHECK(sq / n == doctest::Approx(var).epsilon(0.1));
  noise.reset();
  CHECK(noise.state().isZero());
  CHECK(linear_decay(0.2, 0.02, 0, 100) == 0.2);
  CHECK(linear_decay(0.2, 0.02, 99, 100) == doctest::Approx(0.02));
  CHECK(linear_decay(0.2, 0.02, 50, 101) == doctest::Approx(0.11));
}

TEST_CASE("state encoding") {
  Scenario sc;
  sc.duration_s = 1.0;
  const EnvParams params;
  const auto enc = StateEncoder::for_scenario(sc, params);
  CHECK(enc.state_dim() == 56);
  CHECK(enc.action_dim() == 28);
  Environment env(sc, params, 3);
  const Vector v = enc.encode(env.state());
  CHECK(v.size() == 56);
  CHECK(v.minCoeff() >= 0.0);
  CHECK(v.maxCoeff() <= 1.0);
  CHECK(enc.encode(env.state()) == v);
  // One-hot serving block.
  for (int i = 0; i < 7; ++i) CHECK(v.segment(i * 8 + 2, 4).sum() == 1.0);

  EnvParams k4 = params;
  k4.window = 4;
  CHECK(StateEncoder::for_scenario(sc, k4).state_dim() == 7 * 10);
}

TEST_CASE("action decoding") {
  StateEncoder enc;
  enc.num_ue = 2;
  enc.num_bs = 4;
  NetworkState s;
  s.ues.resize(2);
  s.ues[0].serving = 3;
  s.ues[1].serving = 1;
  Vector scores(8);
  scores << 0.1, 0.9, -0.2, 0.3, 0.5, 0.5, -1.0, 0.0;
  CHECK(enc.decode(scores, s, std::vector<int>{}).backup_bs == std::vector<int>{3, 1});
  CHECK(enc.decode(scores, s, std::vector<int>{0}).backup_bs == std::vector<int>{1, 1});
  CHECK(enc.decode(scores, s, std::vector<int>{0, 1}).backup_bs == std::vector<int>{1, 0});  // tie -> lowest
  Vector shifted = scores;
  shifted.head(4).array() += 0.37;
  CHECK(enc.decode(shifted, s, std::vector<int>{0, 1}).backup_bs == std::vector<int>{1, 0});
  CHECK_THROWS(enc.decode(Vector::Zero(3), s, std::vector<int>{}));

  const Vector mask = enc.action_mask(std::vector<int>{1});
  CHECK(mask.head(4).isZero());
  CHECK(mask.tail(4) == Vector::Ones(4));
  CHECK(enc.action_mask(std::vector<int>{}).isZero());
  CHECK_THROWS(enc.action_mask(std::vector<int>{2}));
}

TEST_CASE("checkpoint round trip is bit exact") {
  DdpgConfig cfg;
  cfg.actor_hidden = {16, 8};
  cfg.critic_hidden = {16, 8};
  DdpgAgent agent(5, 3, cfg, 11);
  PolicyCheckpoint ckpt{agent.actor(), agent.critic(), agent.actor_target(), agent.critic_target_net(), 11, 42,
                        nlohmann::json{{"note", "test"}}};
  const auto path = std::filesystem::temp_directory_path() / "mmho_ckpt_roundtrip.bin";
  save_checkpoint(ckpt, path);
  const PolicyCheckpoint back = load_checkpoint(path);
  CHECK(back.actor.flatten() == ckpt.actor.flatten());
  CHECK(back.critic.flatten() == ckpt.critic.flatten());
  CHECK(back.actor_target.flatten() == ckpt.actor_target.flatten());
  CHECK(back.critic_target.flatten() == ckpt.critic_target.flatten());
  CHECK(back.critic.side_layer() == 1);
  CHECK(back.critic.side_dim() == 3);
  CHECK(back.actor.layers().back().activation == Activation::tanh);
  CHECK(back.rng_seed == 11);
  CHECK(back.training_episodes == 42);
  CHECK(back.metadata.at("note") == "test");

  // Truncated and foreign files are rejected.
  const auto size = std::filesystem::file_size(path);
  std::filesystem::resize_file(path, size - 9);
  CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
  {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    f << "not a checkpoint at all";
  }
  CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_checkpoint(path), std::runtime_error);
}

TEST_CASE("learner reaches the optimum of a two-state MDP") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const double frac = toy::train_fraction_of_optimum(seed, 2000);
    CHECK(frac >= 0.95);
  }
}
