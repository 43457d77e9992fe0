#include "mmho/ddpg/noise.hpp"

#include <algorithm>
#include <random>

namespace mmho::ddpg {

const Vector& OUNoise::sample(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (Eigen::Index k = 0; k < state_.size(); ++k) state_(k) += -theta_ * state_(k) + sigma_ * gauss(rng);
  return state_;
}

double linear_decay(double start, double end, int episode, int episodes) {
  if (episodes <= 1) return start;
  const double frac = std::clamp(static_cast<double>(episode) / (episodes - 1), 0.0, 1.0);
  return start + (end - start) * frac;
}

}  // namespace mmho::ddpg
