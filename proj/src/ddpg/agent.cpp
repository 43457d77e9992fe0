#include "mmho/ddpg/agent.hpp"

#include <stdexcept>

#include "mmho/rng.hpp"

namespace mmho::ddpg {

namespace {

Matrix apply_mask(const Matrix& actions, const Matrix& masks) {
  if (masks.size() == 0) return actions;
  return actions.cwiseProduct(masks);
}

}  // namespace

DenseNet make_actor(int state_dim, int action_dim, const std::vector<int>& hidden) {
  std::vector<int> sizes{state_dim};
  std::vector<Activation> acts;
  for (int h : hidden) {
    sizes.push_back(h);
    acts.push_back(Activation::relu);
  }
  sizes.push_back(action_dim);
  acts.push_back(Activation::tanh);
  return DenseNet(sizes, acts);
}

DenseNet make_critic(int state_dim, int action_dim, const std::vector<int>& hidden) {
  if (hidden.empty()) throw std::invalid_argument("critic needs at least one hidden layer");
  std::vector<int> sizes{state_dim};
  std::vector<Activation> acts;
  for (int h : hidden) {
    sizes.push_back(h);
    acts.push_back(Activation::relu);
  }
  sizes.push_back(1);
  acts.push_back(Activation::identity);
  // Action appended to the first hidden layer's output.
  return DenseNet(sizes, acts, 1, action_dim);
}

DdpgAgent::DdpgAgent(int state_dim, int action_dim, const DdpgConfig& config, std::uint64_t seed)
    : config_(config),
      actor_(make_actor(state_dim, action_dim, config.actor_hidden)),
      critic_(make_critic(state_dim, action_dim, config.critic_hidden)) {
  Rng rng = make_stream(seed, StreamTag::network_init);
  actor_.init(rng, config.final_layer_init);
  critic_.init(rng, config.final_layer_init);
  actor_target_ = actor_;
  critic_target_ = critic_;
  actor_opt_ = Adam(actor_, config.actor_lr);
  critic_opt_ = Adam(critic_, config.critic_lr);
}

DdpgAgent::DdpgAgent(DenseNet actor, DenseNet critic, DenseNet actor_target, DenseNet critic_target,
                     const DdpgConfig& config)
    : config_(config),
      actor_(std::move(actor)),
      critic_(std::move(critic)),
      actor_target_(std::move(actor_target)),
      critic_target_(std::move(critic_target)),
      actor_opt_(actor_, config.actor_lr),
      critic_opt_(critic_, config.critic_lr) {}

Vector DdpgAgent::act(const Vector& state) const { return actor_.forward(state).col(0); }

Matrix DdpgAgent::act_batch(const Matrix& states) const { return actor_.forward(states); }

double DdpgAgent::q_value(const Vector& state, const Vector& action) const {
  const Matrix a = action;
  return critic_.forward(state, &a)(0, 0);
}

double DdpgAgent::critic_target(double reward, const Vector& next_state, bool terminal) const {
  if (terminal || config_.gamma == 0.0) return reward;
  const Matrix a = actor_target_.forward(next_state);
  return reward + config_.gamma * critic_target_.forward(next_state, &a)(0, 0);
}

Vector DdpgAgent::critic_targets(const Batch& batch) const {
  const Matrix a = apply_mask(actor_target_.forward(batch.next_states), batch.next_action_masks);
  const Vector q = critic_target_.forward(batch.next_states, &a).row(0).transpose();
  return batch.rewards + config_.gamma * batch.not_terminal.cwiseProduct(q);
}

Gradients DdpgAgent::critic_loss_gradient(const Batch& batch, const Vector& targets, double* loss) const {
  DenseNet::Tape tape;
  const Matrix actions = apply_mask(batch.actions, batch.action_masks);
  const Matrix q = critic_.forward(batch.states, &actions, tape);
  const Eigen::RowVectorXd err = q.row(0) - targets.transpose();
  const double m = static_cast<double>(err.size());
  if (loss) *loss = err.squaredNorm() / m;
  const Matrix d_out = (2.0 / m) * err;
  return critic_.backward(tape, d_out).grads;
}

double DdpgAgent::critic_loss(const Batch& batch, const Vector& targets) const {
  const Matrix actions = apply_mask(batch.actions, batch.action_masks);
  const Matrix q = critic_.forward(batch.states, &actions);
  return (q.row(0) - targets.transpose()).squaredNorm() / static_cast<double>(targets.size());
}

Gradients DdpgAgent::actor_objective_gradient(const Matrix& states, double* objective, const Matrix& masks) const {
  DenseNet::Tape actor_tape, critic_tape;
  const Matrix a = apply_mask(actor_.forward(states, nullptr, actor_tape), masks);
  const Matrix q = critic_.forward(states, &a, critic_tape);
  const double m = static_cast<double>(states.cols());
  if (objective) *objective = q.sum() / m;
  const Matrix d_q = Matrix::Constant(1, states.cols(), 1.0 / m);
  const DenseNet::Backprop through_critic = critic_.backward(critic_tape, d_q);
  return actor_.backward(actor_tape, apply_mask(through_critic.d_side, masks)).grads;
}

double DdpgAgent::actor_objective(const Matrix& states, const Matrix& masks) const {
  const Matrix a = apply_mask(actor_.forward(states), masks);
  return critic_.forward(states, &a).sum() / static_cast<double>(states.cols());
}

TrainStats DdpgAgent::train_on_batch(const Batch& batch) {
  TrainStats stats;
  const Vector y = critic_targets(batch);
  const Gradients critic_grad = critic_loss_gradient(batch, y, &stats.critic_loss);
  critic_opt_.step(critic_, critic_grad);

  Gradients actor_grad = actor_objective_gradient(batch.states, &stats.actor_objective, batch.action_masks);
  for (auto& g : actor_grad) {  // ascend Q
    g.weight = -g.weight;
    g.bias = -g.bias;
  }
  actor_opt_.step(actor_, actor_grad);
  soft_update(config_.tau);
  return stats;
}

TrainStats DdpgAgent::train_step(const ReplayBuffer& buffer, Rng& rng) {
  return train_on_batch(buffer.sample(static_cast<std::size_t>(config_.batch_size), rng));
}

void DdpgAgent::soft_update(double tau) {
  actor_target_.soft_update_from(actor_, tau);
  critic_target_.soft_update_from(critic_, tau);
}

bool DdpgAgent::all_finite() const {
  return actor_.all_finite() && critic_.all_finite() && actor_target_.all_finite() && critic_target_.all_finite();
}

}  // namespace mmho::ddpg
