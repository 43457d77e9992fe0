#include "mmho/metrics.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/students_t.hpp>

namespace mmho {

void EpisodeLog::record(const NetworkState& before, std::span<const double> thresholds, const SlotOutcome& outcome) {
  const auto n = before.ues.size();
  std::vector<bool> in_set(n, false);
  for (int i : outcome.handover_set) in_set[static_cast<std::size_t>(i)] = true;
  for (std::size_t i = 0; i < n; ++i) {
    SlotLogRow row;
    row.slot = outcome.slot;
    row.ue = static_cast<int>(i);
    row.x = before.ues[i].position.x;
    row.y = before.ues[i].position.y;
    row.serving = outcome.serving[i];
    row.next_serving = outcome.next_serving[i];
    row.capacity = outcome.capacities[i];
    row.share = outcome.shares[i];
    row.rate = outcome.rates[i];
    row.next_rate = outcome.next_rates[i];
    row.threshold = thresholds[i];
    row.in_handover_set = in_set[i];
    row.handover = outcome.handover[i];
    row.outage = outcome.outage[i];
    rows.push_back(row);
  }
  slot_rewards.push_back(outcome.reward.total);
}

MetricsRecord compute_metrics(const EpisodeLog& log) {
  MetricsRecord m;
  m.seed = log.seed;
  if (log.num_slots == 0) return m;
  const auto n_ue = static_cast<std::size_t>(log.num_ue);
  if (n_ue == 0 || log.window < 1) throw std::invalid_argument("episode log has no UEs or no window");
  const std::size_t expected = n_ue * static_cast<std::size_t>(log.num_slots);
  if (log.rows.size() != expected)
    throw std::invalid_argument("truncated episode log: " + std::to_string(log.rows.size()) + " of " +
                                std::to_string(expected) + " rows");

  const auto row_at = [&](int slot, std::size_t ue) -> const SlotLogRow& {
    return log.rows[static_cast<std::size_t>(slot) * n_ue + ue];
  };
  const double unit = log.weights.rate_unit_bps;
  const double k = static_cast<double>(log.window);
  for (int t = 0; t < log.num_slots; ++t) {
    for (std::size_t i = 0; i < n_ue; ++i) {
      const SlotLogRow& r = row_at(t, i);
      if (r.slot != t || r.ue != static_cast<int>(i)) throw std::invalid_argument("episode log rows out of order");
      if (t + 1 < log.num_slots) {
        const SlotLogRow& nx = row_at(t + 1, i);
        if (nx.serving != r.next_serving || nx.rate != r.next_rate)
          throw std::invalid_argument("episode log rows do not chain between slots");
      }
      m.f1_gbps += r.rate / unit;
      // Window R^{t+1}, R^t, ..., R^{t-K+2}; rates before the episode count as zero.
      double sum = r.next_rate;
      for (int back = 0; back <= log.window - 2; ++back)
        if (t - back >= 0) sum += row_at(t - back, i).rate;
      if (sum / k <= r.threshold) ++m.f2_outages;
      if (r.serving != r.next_serving) ++m.f3_handovers;
    }
  }
  for (double r : log.slot_rewards) m.total_reward += r;
  return m;
}

void write_episode_csv(std::ostream& out, std::span<const MetricsRecord> records) {
  out << "episode,seed,f1_gbps,f2_outages,f3_handovers,total_reward\n";
  out << std::setprecision(17);
  for (const auto& r : records)
    out << r.episode << ',' << r.seed << ',' << r.f1_gbps << ',' << r.f2_outages << ',' << r.f3_handovers << ','
        << r.total_reward << '\n';
}

void write_slot_csv(std::ostream& out, std::span<const EpisodeLog> logs) {
  out << "seed,slot,ue,x,y,serving,next_serving,capacity_bps,share,rate_bps,next_rate_bps,threshold_bps,"
         "in_handover_set,handover,outage\n";
  out << std::setprecision(17);
  for (const auto& log : logs)
    for (const auto& r : log.rows)
      out << log.seed << ',' << r.slot << ',' << r.ue << ',' << r.x << ',' << r.y << ',' << r.serving << ','
          << r.next_serving << ',' << r.capacity << ',' << r.share << ',' << r.rate << ',' << r.next_rate << ','
          << r.threshold << ',' << int{r.in_handover_set} << ',' << int{r.handover} << ',' << int{r.outage} << '\n';
}

MeanStderr mean_stderr(std::span<const double> values) {
  MeanStderr s;
  if (values.empty()) return s;
  const double n = static_cast<double>(values.size());
  for (double v : values) s.mean += v;
  s.mean /= n;
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stderr_ = std::sqrt(ss / (n - 1.0) / n);
  return s;
}

double paired_less_p_value(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("paired test needs equal-length samples");
  if (a.size() < 2) return 1.0;
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  const MeanStderr d = mean_stderr(diff);
  if (d.stderr_ == 0.0) return d.mean < 0.0 ? 0.0 : 1.0;
  const boost::math::students_t dist(static_cast<double>(a.size() - 1));
  return boost::math::cdf(dist, d.mean / d.stderr_);
}

}  // namespace mmho
