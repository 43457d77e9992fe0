#pragma once

#include <cstddef>
#include <vector>

#include "mmho/ddpg/net.hpp"

namespace mmho::ddpg {

struct Transition {
  Vector state;
  Vector action;  // raw squashed scores, before decoding
  double reward = 0.0;
  Vector next_state;
  bool terminal = false;
  // 1 where the entry can change the decoded action; empty means all entries do.
  Vector action_mask;
  Vector next_action_mask;
};

struct Batch {
  Matrix states;       // state_dim x M
  Matrix actions;      // action_dim x M
  Vector rewards;      // M
  Matrix next_states;  // state_dim x M
  Vector not_terminal; // 1 where bootstrapping applies
  Matrix action_masks;       // action_dim x M, or empty when unmasked
  Matrix next_action_masks;  // masks of the next states
};

/// Fixed-capacity ring buffer; overwrites the oldest transition once full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  void push(Transition t);
  std::size_t size() const { return items_.size(); }
  std::size_t capacity() const { return capacity_; }
  const Transition& at(std::size_t i) const { return items_[i]; }

  /// Uniform sample of `count` distinct indices (Floyd's algorithm).
  std::vector<std::size_t> sample_indices(std::size_t count, Rng& rng) const;
  Batch sample(std::size_t count, Rng& rng) const;
  Batch gather(const std::vector<std::size_t>& indices) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;
  std::vector<Transition> items_;
};

}  // namespace mmho::ddpg
