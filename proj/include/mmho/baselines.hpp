#pragma once

// Reference handover policies: uniform random backup among nearby BSs, and
// worst-connection-swapping local search on the one-slot reward.

#include <functional>
#include <span>
#include <vector>

#include "mmho/env.hpp"
#include "mmho/rng.hpp"

namespace mmho {

struct VicinityRule {
  double radius_m = 100.0;  // planar distance; the nearest BS always qualifies
};

std::vector<int> vicinity(const Point3& ue, const Zone& zone, const VicinityRule& rule);

/// Uniform choice among vicinity BSs other than the serving one (the serving
/// BS only if it is the sole candidate). UEs outside the handover set keep
/// their serving BS.
BackupAction random_backup(const NetworkState& state, std::span<const int> handover_set, const Zone& zone,
                           const VicinityRule& rule, Rng& rng);

/// Rates of the next slot weigh in place of the current ones, since the
/// current slot's rates do not depend on the backup choice.
double one_slot_score(const SlotOutcome& outcome, const RewardWeights& weights);

struct CandidateEval {
  double score = 0.0;
  std::vector<double> next_rates;
};

using CandidateEvaluator = std::function<CandidateEval(const BackupAction&)>;

struct WcsParams {
  int iteration_cap_per_ue = 3;  // cap = this * |U| single-UE reassignments
};

/// Local search starting from "nobody moves": repeatedly move the handover
/// UE with the worst predicted rate to the BS that most improves the score;
/// at a local optimum apply one random swap and search once more. Returns
/// the best assignment seen, never worse than the start.
BackupAction wcs_backup(const NetworkState& state, std::span<const int> handover_set, int num_bs,
                        const CandidateEvaluator& evaluate, Rng& rng, const WcsParams& params = {});

/// Convenience overload scoring candidates with Environment::evaluate.
BackupAction wcs_backup(const Environment& env, Rng& rng, const WcsParams& params = {});

}  // namespace mmho
