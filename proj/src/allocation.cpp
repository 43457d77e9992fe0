#include "mmho/allocation.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mmho {

double required_share(std::span<const double> recent_rates, double rate_threshold, double capacity,
                      int window, double margin) {
  const double achieved = std::accumulate(recent_rates.begin(), recent_rates.end(), 0.0);
  const double deficit = std::max(0.0, window * rate_threshold * (1.0 + margin) - achieved);
  if (deficit == 0.0) return 0.0;
  if (!(capacity > 0.0)) return kUnsatisfiable;
  return deficit / capacity;
}

namespace {

// Calls visit(combo) for every k-subset of [0, n) in lexicographic order.
template <typename Visit>
void for_each_combination(int n, int k, Visit&& visit) {
  std::vector<int> idx(static_cast<std::size_t>(k));
  std::iota(idx.begin(), idx.end(), 0);
  if (k > n) return;
  while (true) {
    visit(idx);
    int pos = k - 1;
    while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == n - k + pos) --pos;
    if (pos < 0) return;
    ++idx[static_cast<std::size_t>(pos)];
    for (int q = pos + 1; q < k; ++q) idx[static_cast<std::size_t>(q)] = idx[static_cast<std::size_t>(q - 1)] + 1;
  }
}

}  // namespace

SatisfiableSet max_satisfiable(std::span<const ShareRequest> requests, std::span<const int> ues,
                               const AllocationParams& params, bool* used_greedy) {
  SatisfiableSet out;
  if (ues.empty()) return out;

  std::vector<int> sorted_ues(ues.begin(), ues.end());
  std::sort(sorted_ues.begin(), sorted_ues.end());

  // Max cardinality: the k smallest deficits fit iff any k-subset fits.
  std::vector<int> by_deficit = sorted_ues;
  std::stable_sort(by_deficit.begin(), by_deficit.end(), [&](int a, int b) {
    return requests[static_cast<std::size_t>(a)].deficit_share < requests[static_cast<std::size_t>(b)].deficit_share;
  });
  double used = 0.0;
  for (int ue : by_deficit) {
    const double need = requests[static_cast<std::size_t>(ue)].deficit_share;
    if (used + need > 1.0 + kBudgetSlack) break;
    used += need;
    ++out.count;
  }
  if (out.count == 0) return out;

  const int n = static_cast<int>(sorted_ues.size());
  if (n > params.exhaustive_cap) {
    if (used_greedy) *used_greedy = true;
    out.members.assign(by_deficit.begin(), by_deficit.begin() + out.count);
    std::sort(out.members.begin(), out.members.end());
    return out;
  }

  double best_value = -1.0;
  std::vector<int> best;
  for_each_combination(n, out.count, [&](const std::vector<int>& combo) {
    double budget = 0.0;
    double value = 0.0;
    for (int c : combo) {
      const ShareRequest& r = requests[static_cast<std::size_t>(sorted_ues[static_cast<std::size_t>(c)])];
      budget += r.deficit_share;
      value += r.deficit_share * r.capacity;
    }
    if (budget > 1.0 + kBudgetSlack || value <= best_value) return;
    best_value = value;
    best = combo;
  });
  out.members.reserve(best.size());
  for (int c : best) out.members.push_back(sorted_ues[static_cast<std::size_t>(c)]);
  return out;
}

AllocationResult allocate(std::span<const ShareRequest> requests, int num_bs, const AllocationParams& params) {
  AllocationResult result;
  result.share.assign(requests.size(), 0.0);
  result.satisfied.assign(static_cast<std::size_t>(num_bs), {});
  result.num_satisfied.assign(static_cast<std::size_t>(num_bs), 0);
  result.remainder_recipient.assign(static_cast<std::size_t>(num_bs), -1);

  std::vector<std::vector<int>> members(static_cast<std::size_t>(num_bs));
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const int bs = requests[i].serving_bs;
    if (bs < 0 || bs >= num_bs) throw std::out_of_range("allocate: serving BS index out of range");
    members[static_cast<std::size_t>(bs)].push_back(static_cast<int>(i));
  }

  for (int j = 0; j < num_bs; ++j) {
    const auto& ues = members[static_cast<std::size_t>(j)];
    if (ues.empty()) continue;

    bool greedy = false;
    SatisfiableSet best = max_satisfiable(requests, ues, params, &greedy);
    result.used_greedy_fallback |= greedy;

    int strongest = ues.front();
    for (int ue : ues)
      if (requests[static_cast<std::size_t>(ue)].capacity > requests[static_cast<std::size_t>(strongest)].capacity)
        strongest = ue;
    result.remainder_recipient[static_cast<std::size_t>(j)] = strongest;

    if (ues.size() == 1) {
      // A lone UE gets the whole BS.
      result.share[static_cast<std::size_t>(strongest)] = 1.0;
    } else {
      double committed = 0.0;
      for (int ue : best.members) {
        result.share[static_cast<std::size_t>(ue)] = requests[static_cast<std::size_t>(ue)].deficit_share;
        committed += requests[static_cast<std::size_t>(ue)].deficit_share;
      }
      result.share[static_cast<std::size_t>(strongest)] += std::max(0.0, 1.0 - committed);
    }
    result.num_satisfied[static_cast<std::size_t>(j)] = best.count;
    result.satisfied[static_cast<std::size_t>(j)] = std::move(best.members);
  }
  return result;
}

}  // namespace mmho
