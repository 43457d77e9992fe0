#pragma once

#include <cstdint>
#include <vector>

#include "mmho/ddpg/net.hpp"
#include "mmho/ddpg/replay.hpp"

namespace mmho::ddpg {

struct DdpgConfig {
  std::vector<int> actor_hidden{256, 128};
  std::vector<int> critic_hidden{256, 128};  // action joins at the second hidden layer's input
  double actor_lr = 1e-4;
  double critic_lr = 1e-3;
  double tau = 1e-3;
  double gamma = 0.99;
  int batch_size = 32;
  std::size_t buffer_capacity = 100000;
  int warmup = 32;  // transitions stored before the first update
  int updates_per_step = 1;  // minibatch updates per environment step
  double ou_theta = 0.15;
  double ou_sigma_start = 0.5;
  double ou_sigma_end = 0.1;
  double reward_scale = 0.01;  // multiplies rewards before they enter the buffer
  bool mask_inactive_actions = true;  // critic sees only the scores of UEs in the handover set
  double final_layer_init = 3e-3;
};

struct TrainStats {
  double critic_loss = 0.0;
  double actor_objective = 0.0;
};

/// Actor mu(s) -> tanh scores, critic Q(s, a), with slow-moving target copies.
class DdpgAgent {
 public:
  DdpgAgent(int state_dim, int action_dim, const DdpgConfig& config, std::uint64_t seed);
  DdpgAgent(DenseNet actor, DenseNet critic, DenseNet actor_target, DenseNet critic_target,
            const DdpgConfig& config);

  int state_dim() const { return actor_.input_dim(); }
  int action_dim() const { return actor_.output_dim(); }
  const DdpgConfig& config() const { return config_; }

  Vector act(const Vector& state) const;
  Matrix act_batch(const Matrix& states) const;
  double q_value(const Vector& state, const Vector& action) const;

  /// y = r + gamma * Q'(s', mu'(s')) with the target nets; no bootstrap when terminal.
  double critic_target(double reward, const Vector& next_state, bool terminal) const;
  Vector critic_targets(const Batch& batch) const;

  /// Gradient of mean squared TD error w.r.t. critic parameters.
  Gradients critic_loss_gradient(const Batch& batch, const Vector& targets, double* loss = nullptr) const;
  double critic_loss(const Batch& batch, const Vector& targets) const;

  /// Gradient of mean Q(s, mu(s) * mask) w.r.t. actor parameters (chain rule
  /// through the critic). An empty mask leaves every action entry active.
  Gradients actor_objective_gradient(const Matrix& states, double* objective = nullptr,
                                     const Matrix& masks = Matrix()) const;
  double actor_objective(const Matrix& states, const Matrix& masks = Matrix()) const;

  /// One critic step, one actor step, one soft target update.
  TrainStats train_step(const ReplayBuffer& buffer, Rng& rng);
  TrainStats train_on_batch(const Batch& batch);
  void soft_update(double tau);

  const DenseNet& actor() const { return actor_; }
  const DenseNet& critic() const { return critic_; }
  const DenseNet& actor_target() const { return actor_target_; }
  const DenseNet& critic_target_net() const { return critic_target_; }
  DenseNet& actor() { return actor_; }
  DenseNet& critic() { return critic_; }

  bool all_finite() const;

 private:
  DdpgConfig config_;
  DenseNet actor_, critic_, actor_target_, critic_target_;
  Adam actor_opt_, critic_opt_;
};

DenseNet make_actor(int state_dim, int action_dim, const std::vector<int>& hidden);
DenseNet make_critic(int state_dim, int action_dim, const std::vector<int>& hidden);

}  // namespace mmho::ddpg
