#include "mmho/baselines.hpp"

#include <algorithm>
#include <numeric>
#include <random>

namespace mmho {

std::vector<int> vicinity(const Point3& ue, const Zone& zone, const VicinityRule& rule) {
  std::vector<int> out;
  int nearest = 0;
  for (int j = 0; j < zone.num_bs(); ++j) {
    const double d = planar_distance(ue, zone.bs_positions[static_cast<std::size_t>(j)]);
    if (d <= rule.radius_m) out.push_back(j);
    if (d < planar_distance(ue, zone.bs_positions[static_cast<std::size_t>(nearest)])) nearest = j;
  }
  if (out.empty()) out.push_back(nearest);
  return out;
}

BackupAction random_backup(const NetworkState& state, std::span<const int> handover_set, const Zone& zone,
                           const VicinityRule& rule, Rng& rng) {
  BackupAction action;
  action.backup_bs = state.serving();
  for (int i : handover_set) {
    const UeState& ue = state.ues[static_cast<std::size_t>(i)];
    std::vector<int> cands = vicinity(ue.position, zone, rule);
    if (cands.size() > 1) std::erase(cands, ue.serving);
    std::uniform_int_distribution<std::size_t> pick(0, cands.size() - 1);
    action.backup_bs[static_cast<std::size_t>(i)] = cands[pick(rng)];
  }
  return action;
}

double one_slot_score(const SlotOutcome& outcome, const RewardWeights& weights) {
  double rate = 0.0;
  for (double r : outcome.next_rates) rate += r / weights.rate_unit_bps;
  return rate - weights.lambda_outage * outcome.reward.outages - weights.lambda_handover * outcome.reward.handovers;
}

BackupAction wcs_backup(const NetworkState& state, std::span<const int> handover_set, int num_bs,
                        const CandidateEvaluator& evaluate, Rng& rng, const WcsParams& params) {
  BackupAction assign;
  assign.backup_bs = state.serving();
  if (handover_set.empty()) return assign;

  const int n_ue = static_cast<int>(state.ues.size());
  const int cap = params.iteration_cap_per_ue * n_ue;
  CandidateEval current = evaluate(assign);
  BackupAction best_assign = assign;
  double best_score = current.score;
  bool perturbed = false;
  int iterations = 0;

  while (iterations < cap) {
    std::vector<int> order(handover_set.begin(), handover_set.end());
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return current.next_rates[static_cast<std::size_t>(a)] < current.next_rates[static_cast<std::size_t>(b)];
    });

    bool improved = false;
    for (int i : order) {
      const auto iu = static_cast<std::size_t>(i);
      int best_bs = assign.backup_bs[iu];
      CandidateEval best_eval = current;
      for (int j = 0; j < num_bs; ++j) {
        if (j == assign.backup_bs[iu]) continue;
        BackupAction cand = assign;
        cand.backup_bs[iu] = j;
        CandidateEval e = evaluate(cand);
        if (e.score > best_eval.score + 1e-12) {
          best_eval = std::move(e);
          best_bs = j;
        }
      }
      ++iterations;
      if (best_bs != assign.backup_bs[iu]) {
        assign.backup_bs[iu] = best_bs;
        current = std::move(best_eval);
        improved = true;
        break;
      }
      if (iterations >= cap) break;
    }
    if (current.score > best_score) {
      best_score = current.score;
      best_assign = assign;
    }
    if (improved) continue;
    if (perturbed || n_ue < 2) break;

    // Local optimum: swap a random handover UE's BS with an arbitrary other UE's.
    perturbed = true;
    std::uniform_int_distribution<std::size_t> pick_h(0, handover_set.size() - 1);
    const int i = handover_set[pick_h(rng)];
    std::uniform_int_distribution<int> pick_other(0, n_ue - 2);
    int k = pick_other(rng);
    if (k >= i) ++k;
    const int bs_i = assign.backup_bs[static_cast<std::size_t>(i)];
    assign.backup_bs[static_cast<std::size_t>(i)] = assign.backup_bs[static_cast<std::size_t>(k)];
    if (std::find(handover_set.begin(), handover_set.end(), k) != handover_set.end())
      assign.backup_bs[static_cast<std::size_t>(k)] = bs_i;
    current = evaluate(assign);
    if (current.score > best_score) {
      best_score = current.score;
      best_assign = assign;
    }
  }
  return best_assign;
}

BackupAction wcs_backup(const Environment& env, Rng& rng, const WcsParams& params) {
  const RewardWeights& weights = env.params().weights;
  const CandidateEvaluator eval = [&](const BackupAction& a) {
    const SlotOutcome out = env.evaluate(a);
    return CandidateEval{one_slot_score(out, weights), out.next_rates};
  };
  return wcs_backup(env.state(), env.current_handover_set(), env.num_bs(), eval, rng, params);
}

}  // namespace mmho
