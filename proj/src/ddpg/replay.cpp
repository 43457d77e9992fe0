#include "mmho/ddpg/replay.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace mmho::ddpg {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw std::invalid_argument("replay buffer capacity must be positive");
  items_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(Transition t) {
  if (!std::isfinite(t.reward)) throw std::invalid_argument("replay buffer: non-finite reward");
  if (items_.size() < capacity_) {
    items_.push_back(std::move(t));
  } else {
    items_[next_] = std::move(t);
  }
  next_ = (next_ + 1) % capacity_;
}

std::vector<std::size_t> ReplayBuffer::sample_indices(std::size_t count, Rng& rng) const {
  const std::size_t n = items_.size();
  if (count > n) throw std::invalid_argument("replay buffer: minibatch larger than buffer");
  std::vector<std::size_t> picked;
  picked.reserve(count);
  for (std::size_t j = n - count; j < n; ++j) {
    std::uniform_int_distribution<std::size_t> dist(0, j);
    const std::size_t t = dist(rng);
    if (std::find(picked.begin(), picked.end(), t) == picked.end())
      picked.push_back(t);
    else
      picked.push_back(j);
  }
  return picked;
}

Batch ReplayBuffer::gather(const std::vector<std::size_t>& indices) const {
  Batch b;
  const auto m = static_cast<Eigen::Index>(indices.size());
  const auto& first = items_.at(indices.front());
  b.states.resize(first.state.size(), m);
  b.actions.resize(first.action.size(), m);
  b.rewards.resize(m);
  b.next_states.resize(first.next_state.size(), m);
  b.not_terminal.resize(m);
  const bool masked = first.action_mask.size() > 0;
  if (masked) {
    b.action_masks.resize(first.action.size(), m);
    b.next_action_masks.resize(first.action.size(), m);
  }
  for (Eigen::Index k = 0; k < m; ++k) {
    const Transition& t = items_.at(indices[static_cast<std::size_t>(k)]);
    b.states.col(k) = t.state;
    b.actions.col(k) = t.action;
    b.rewards(k) = t.reward;
    b.next_states.col(k) = t.next_state;
    b.not_terminal(k) = t.terminal ? 0.0 : 1.0;
    if (masked) {
      if (t.action_mask.size() != t.action.size() || t.next_action_mask.size() != t.action.size())
        throw std::invalid_argument("replay buffer mixes masked and unmasked transitions");
      b.action_masks.col(k) = t.action_mask;
      b.next_action_masks.col(k) = t.next_action_mask;
    }
  }
  return b;
}

Batch ReplayBuffer::sample(std::size_t count, Rng& rng) const { return gather(sample_indices(count, rng)); }

}  // namespace mmho::ddpg
