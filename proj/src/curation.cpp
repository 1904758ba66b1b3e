#include "qqt/curation.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace qqt {

BucketLadder BucketLadder::validated(std::vector<Bucket> buckets, std::string metric_name) {
  if (buckets.empty()) throw std::invalid_argument("BucketLadder: at least one bucket required");
  std::set<std::string> ids;
  for (const auto& bucket : buckets) {
    if (!ids.insert(bucket.id).second)
      throw std::invalid_argument("BucketLadder: duplicate bucket id '" + bucket.id + "'");
    if (bucket.size < 1) throw std::invalid_argument("BucketLadder: bucket sizes must be >= 1");
    UtilityParams::validated(bucket.params.a, bucket.params.b, bucket.params.d,
                             bucket.params.tau);
  }
  return BucketLadder{std::move(buckets), std::move(metric_name)};
}

std::vector<std::string> BucketLadder::quality_order_warnings() const {
  std::vector<std::string> warnings;
  for (std::size_t i = 1; i < buckets.size(); ++i)
    if (std::fabs(buckets[i].params.b) > std::fabs(buckets[i - 1].params.b))
      warnings.push_back("bucket '" + buckets[i].id + "' has |b| above the better-ranked '" +
                         buckets[i - 1].id + "'");
  return warnings;
}

std::vector<MixtureSpec> enumerate_strategies(const BucketLadder& ladder) {
  std::vector<MixtureSpec> strategies;
  std::vector<MixturePool> prefix;
  for (const auto& bucket : ladder.buckets) {
    prefix.push_back(MixturePool{bucket.id, bucket.params, bucket.size});
    strategies.push_back(MixtureSpec::make(prefix));
  }
  return strategies;
}

StrategyReport predict_report(const BucketLadder& ladder, double a,
                              const std::vector<std::int64_t>& budgets) {
  if (budgets.empty()) throw std::invalid_argument("predict_report: empty budget list");
  for (std::size_t i = 1; i < budgets.size(); ++i)
    if (budgets[i] <= budgets[i - 1])
      throw std::invalid_argument("predict_report: budgets must be strictly increasing");

  const std::vector<MixtureSpec> strategies = enumerate_strategies(ladder);
  StrategyReport report;
  report.budgets = budgets;
  for (const auto& strategy : strategies) {
    std::string label;
    for (const auto& pool : strategy.pools()) {
      if (!label.empty()) label += "+";
      label += pool.id;
    }
    report.strategy_labels.push_back(label);

    std::vector<double> errors;
    errors.reserve(budgets.size());
    const double strategy_d = weighted_d(strategy);
    for (std::int64_t budget : budgets)
      errors.push_back(eval_mixture_loss(strategy, a, strategy_d, budget));
    report.per_strategy_error.push_back(std::move(errors));
  }

  for (std::size_t j = 0; j < budgets.size(); ++j) {
    int best = 0;
    for (std::size_t s = 1; s < strategies.size(); ++s)
      if (report.per_strategy_error[s][j] < report.per_strategy_error[best][j])
        best = static_cast<int>(s);
    report.best_strategy_per_budget.push_back(best);
  }

  for (std::size_t j = 1; j < budgets.size(); ++j) {
    const int prev = report.best_strategy_per_budget[j - 1];
    const int next = report.best_strategy_per_budget[j];
    if (prev != next)
      report.crossovers.push_back(CrossoverInterval{budgets[j - 1], budgets[j], prev, next});
  }
  return report;
}

std::vector<CrossoverInterval> crossover_budgets(const StrategyReport& report) {
  return report.crossovers;
}

std::vector<std::int64_t> geometric_budgets(std::int64_t lo, std::int64_t hi, int points) {
  if (lo < 1 || hi < lo) throw std::invalid_argument("geometric_budgets: need 1 <= lo <= hi");
  if (points < 2) throw std::invalid_argument("geometric_budgets: need at least 2 points");
  std::vector<std::int64_t> budgets;
  const double log_lo = std::log(static_cast<double>(lo));
  const double log_hi = std::log(static_cast<double>(hi));
  for (int i = 0; i < points; ++i) {
    const double t = static_cast<double>(i) / (points - 1);
    std::int64_t budget =
        static_cast<std::int64_t>(std::llround(std::exp(log_lo + t * (log_hi - log_lo))));
    if (i == 0) budget = lo;
    if (i == points - 1) budget = hi;
    if (budgets.empty() || budget > budgets.back()) budgets.push_back(budget);
  }
  return budgets;
}

}  // namespace qqt
