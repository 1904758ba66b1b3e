#ifndef QQT_CURATION_HPP
#define QQT_CURATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qqt/mixture.hpp"
#include "qqt/scaling.hpp"

namespace qqt {

struct Bucket {
  std::string id;
  UtilityParams params;
  std::int64_t size;
};

/// Quality-ranked buckets, best first ("top 10%", "top 10-20%", ...).
/// |b| usually shrinks down the ladder; that is an empirical tendency, not a
/// requirement, so violations only produce warnings.
struct BucketLadder {
  std::vector<Bucket> buckets;
  std::string metric_name;

  static BucketLadder validated(std::vector<Bucket> buckets, std::string metric_name);

  // One line per adjacent pair whose |b| increases down the ladder.
  std::vector<std::string> quality_order_warnings() const;
};

// Prefix unions of the ladder: {bucket_1}, {bucket_1,bucket_2}, ..., each as
// a mixture with the contrastive tau stretch applied. Strategy i trains on
// the best i+1 buckets.
std::vector<MixtureSpec> enumerate_strategies(const BucketLadder& ladder);

struct CrossoverInterval {
  std::int64_t budget_lo;  // best strategy at this budget is from_strategy
  std::int64_t budget_hi;  // and to_strategy from this budget on
  int from_strategy;
  int to_strategy;
};

/// Predicted error of every prefix strategy at every budget, with the
/// per-budget winner and the budget intervals where the winner changes.
struct StrategyReport {
  std::vector<std::int64_t> budgets;
  std::vector<std::string> strategy_labels;
  std::vector<std::vector<double>> per_strategy_error;  // [strategy][budget]
  std::vector<int> best_strategy_per_budget;
  std::vector<CrossoverInterval> crossovers;
};

// Fills the error matrix via the mixture closed form with the shared
// normalizer a and each strategy's size-weighted d. Ties at a budget go to
// the smaller (more aggressive) strategy.
StrategyReport predict_report(const BucketLadder& ladder, double a,
                              const std::vector<std::int64_t>& budgets);

// The report's crossover intervals; empty when one strategy wins everywhere.
std::vector<CrossoverInterval> crossover_budgets(const StrategyReport& report);

// Geometrically spaced budgets from lo to hi inclusive, deduplicated after
// rounding to whole samples.
std::vector<std::int64_t> geometric_budgets(std::int64_t lo, std::int64_t hi, int points);

}  // namespace qqt

#endif
