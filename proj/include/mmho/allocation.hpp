#pragma once

// Per-slot resource sharing among UEs of each BS. Each BS first serves the
// largest set of UEs whose threshold-meeting shares fit in its budget,
// preferring the set with the most rate, then hands the leftover budget to
// its strongest UE.

#include <limits>
#include <span>
#include <vector>

namespace mmho {

inline constexpr double kUnsatisfiable = std::numeric_limits<double>::infinity();

/// Budget comparisons accept sums up to 1 + kBudgetSlack.
inline constexpr double kBudgetSlack = 1e-12;

struct ShareRequest {
  double deficit_share = 0.0;  // share needed to meet the K-window threshold
  double capacity = 0.0;       // bits/s toward the serving BS in the next slot
  int serving_bs = 0;
};

struct AllocationParams {
  int exhaustive_cap = 16;  // exhaustive subset search up to this many UEs per BS
};

struct AllocationResult {
  std::vector<double> share;               // per UE
  std::vector<std::vector<int>> satisfied; // per BS, ascending UE ids
  std::vector<int> num_satisfied;          // per BS
  std::vector<int> remainder_recipient;    // per BS, -1 when the BS is idle
  bool used_greedy_fallback = false;
};

/// max{0, K*R_th*(1+margin) - sum(recent_rates)} / capacity, where
/// recent_rates holds the K-1 latest achieved rates. Returns kUnsatisfiable
/// when capacity is zero and a deficit remains.
double required_share(std::span<const double> recent_rates, double rate_threshold, double capacity,
                      int window, double margin = 0.0);

struct SatisfiableSet {
  int count = 0;
  std::vector<int> members;  // UE ids, ascending
};

/// Largest subset of `ues` whose deficit shares fit in one BS budget; among
/// those, the subset maximizing sum(deficit * capacity).
/// Lexicographically smallest ids win ties.
SatisfiableSet max_satisfiable(std::span<const ShareRequest> requests, std::span<const int> ues,
                               const AllocationParams& params = {}, bool* used_greedy = nullptr);

AllocationResult allocate(std::span<const ShareRequest> requests, int num_bs,
                          const AllocationParams& params = {});

}  // namespace mmho
