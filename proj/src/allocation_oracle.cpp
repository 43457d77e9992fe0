#include "mmho/allocation_oracle.hpp"

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mmho::oracle {

AllocationResult oracle_allocate(std::span<const ShareRequest> requests, int num_bs) {
  AllocationResult result;
  result.share.assign(requests.size(), 0.0);
  result.satisfied.assign(static_cast<std::size_t>(num_bs), {});
  result.num_satisfied.assign(static_cast<std::size_t>(num_bs), 0);
  result.remainder_recipient.assign(static_cast<std::size_t>(num_bs), -1);

  for (int j = 0; j < num_bs; ++j) {
    std::vector<int> ues;
    for (std::size_t i = 0; i < requests.size(); ++i)
      if (requests[i].serving_bs == j) ues.push_back(static_cast<int>(i));
    if (ues.empty()) continue;
    if (ues.size() > static_cast<std::size_t>(kMaxUesPerBs))
      throw std::invalid_argument("oracle_allocate: instance too large for brute force");

    const int n = static_cast<int>(ues.size());
    int best_size = 0;
    double best_value = 0.0;
    std::uint32_t best_mask = 0;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
      double budget = 0.0, value = 0.0;
      for (int b = 0; b < n; ++b) {
        if (!(mask & (1u << b))) continue;
        budget += requests[static_cast<std::size_t>(ues[static_cast<std::size_t>(b)])].deficit_share;
        value += requests[static_cast<std::size_t>(ues[static_cast<std::size_t>(b)])].deficit_share *
                 requests[static_cast<std::size_t>(ues[static_cast<std::size_t>(b)])].capacity;
      }
      if (budget > 1.0 + kBudgetSlack) continue;
      const int size = std::popcount(mask);
      bool better = size > best_size || (size == best_size && value > best_value);
      if (size == best_size && value == best_value && mask != best_mask) {
        // Lexicographically smaller id list wins: compare lowest differing bit.
        const std::uint32_t diff = mask ^ best_mask;
        const std::uint32_t low = diff & (~diff + 1u);
        better = (mask & low) != 0;
      }
      if (better) {
        best_size = size;
        best_value = value;
        best_mask = mask;
      }
    }

    int strongest = ues.front();
    for (int ue : ues)
      if (requests[static_cast<std::size_t>(ue)].capacity > requests[static_cast<std::size_t>(strongest)].capacity)
        strongest = ue;
    result.remainder_recipient[static_cast<std::size_t>(j)] = strongest;

    double committed = 0.0;
    for (int b = 0; b < n; ++b) {
      if (!(best_mask & (1u << b))) continue;
      const int ue = ues[static_cast<std::size_t>(b)];
      result.satisfied[static_cast<std::size_t>(j)].push_back(ue);
      if (n > 1) {
        result.share[static_cast<std::size_t>(ue)] = requests[static_cast<std::size_t>(ue)].deficit_share;
        committed += requests[static_cast<std::size_t>(ue)].deficit_share;
      }
    }
    result.num_satisfied[static_cast<std::size_t>(j)] = best_size;
    if (n == 1) {
      result.share[static_cast<std::size_t>(strongest)] = 1.0;
    } else {
      const double rest = 1.0 - committed;
      result.share[static_cast<std::size_t>(strongest)] += rest > 0.0 ? rest : 0.0;
    }
  }
  return result;
}

}  // namespace mmho::oracle
