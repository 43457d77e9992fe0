#pragma once

#include "mmho/ddpg/net.hpp"

namespace mmho::ddpg {

/// Mean-reverting exploration noise, x <- x - theta*x + sigma*N(0,1), per action dimension.
class OUNoise {
 public:
  OUNoise(int dim, double theta, double sigma) : theta_(theta), sigma_(sigma), state_(Vector::Zero(dim)) {}

  void reset() { state_.setZero(); }
  void set_sigma(double sigma) { sigma_ = sigma; }
  double sigma() const { return sigma_; }
  double theta() const { return theta_; }
  const Vector& state() const { return state_; }

  const Vector& sample(Rng& rng);

 private:
  double theta_;
  double sigma_;
  Vector state_;
};

/// Linear schedule from `start` to `end` over `episodes` episodes.
double linear_decay(double start, double end, int episode, int episodes);

}  // namespace mmho::ddpg
