#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "qqt/curation.hpp"

using namespace qqt;

namespace {

Bucket bucket(const std::string& id, double b, double d, double tau,
              std::int64_t size = 12800000) {
  return Bucket{id, UtilityParams::validated(0.5, b, d, tau), size};
}

// two buckets with the usual best/worst exponents; the top bucket carries a
// higher irreducible error, so enough repetition lets the union win
BucketLadder qqt_ladder(double tau_top, double tau_low) {
  return BucketLadder::validated(
      {bucket("top10", -0.18, 0.05, tau_top), bucket("top1020", -0.10, 0.01, tau_low)},
      "imagenet_error");
}

}  // namespace

TEST_CASE("enumerate_strategies builds prefix unions with stretched half-lives") {
  const auto ladder = BucketLadder::validated(
      {bucket("b1", -0.18, 0.05, 10), bucket("b2", -0.15, 0.05, 8),
       bucket("b3", -0.12, 0.05, 6), bucket("b4", -0.10, 0.05, 4)},
      "avg18_error");
  const auto strategies = enumerate_strategies(ladder);
  REQUIRE(strategies.size() == 4);
  for (std::size_t s = 0; s < strategies.size(); ++s) {
    CHECK(strategies[s].pool_count() == s + 1);
    CHECK(strategies[s].combined_size() ==
          static_cast<std::int64_t>(s + 1) * 12800000);  // size additivity
    // tau stretch: every constituent of strategy s has tau_hat = (s+1)*tau
    for (std::size_t i = 0; i <= s; ++i)
      CHECK(strategies[s].tau_hat(i) ==
            doctest::Approx((s + 1) * ladder.buckets[i].params.tau).epsilon(1e-14));
  }

  const auto solo = BucketLadder::validated({bucket("only", -0.2, 0.05, 5)}, "e");
  CHECK(enumerate_strategies(solo).size() == 1);
}

TEST_CASE("BucketLadder validation and ordering warnings") {
  CHECK_THROWS_AS(BucketLadder::validated({}, "e"), std::invalid_argument);
  CHECK_THROWS_AS(BucketLadder::validated(
                      {bucket("x", -0.2, 0.05, 5), bucket("x", -0.1, 0.05, 5)}, "e"),
                  std::invalid_argument);

  CHECK(qqt_ladder(4, 4).quality_order_warnings().empty());
  const auto inverted = BucketLadder::validated(
      {bucket("weak", -0.10, 0.05, 5), bucket("strong", -0.18, 0.05, 5)}, "e");
  REQUIRE(inverted.quality_order_warnings().size() == 1);
  CHECK(inverted.quality_order_warnings()[0].find("strong") != std::string::npos);
}

TEST_CASE("aggressive filtering wins small budgets, the union wins large ones") {
  const auto budgets = geometric_budgets(8000000, 2560000000LL, 30);
  const auto report = predict_report(qqt_ladder(4, 4), 0.5, budgets);

  REQUIRE(report.best_strategy_per_budget.size() == budgets.size());
  CHECK(report.best_strategy_per_budget.front() == 0);
  CHECK(report.best_strategy_per_budget.back() == 1);
  REQUIRE(report.crossovers.size() == 1);  // exactly one switch
  CHECK(report.crossovers[0].from_strategy == 0);
  CHECK(report.crossovers[0].to_strategy == 1);
  // found by bisection against the closed form: the switch sits near 54.8M
  CHECK(report.crossovers[0].budget_lo < 54750000);
  CHECK(report.crossovers[0].budget_hi >= 54750000);
  CHECK(crossover_budgets(report).size() == 1);
}

TEST_CASE("the crossover budget grows with the top bucket's half-life") {
  const auto budgets = geometric_budgets(8000000, 2560000000LL, 60);
  double previous = 0.0;
  for (double tau_top : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const auto report = predict_report(qqt_ladder(tau_top, 4.0), 0.5, budgets);
    REQUIRE(report.crossovers.size() == 1);
    const double where = static_cast<double>(report.crossovers[0].budget_hi);
    CHECK(where > previous);
    previous = where;
  }
}

TEST_CASE("identical buckets tie and the tie goes to the aggressive strategy") {
  const auto ladder = BucketLadder::validated(
      {bucket("first", -0.15, 0.05, 6), bucket("second", -0.15, 0.05, 6)}, "e");
  // budgets inside everyone's first epoch
  const std::vector<std::int64_t> budgets = {1000000, 4000000, 12800000};
  const auto report = predict_report(ladder, 0.5, budgets);
  for (std::size_t j = 0; j < budgets.size(); ++j) {
    CHECK(report.per_strategy_error[0][j] == report.per_strategy_error[1][j]);
    CHECK(report.best_strategy_per_budget[j] == 0);
  }
  CHECK(report.crossovers.empty());
  CHECK(crossover_budgets(report).empty());
}

TEST_CASE("below one epoch the ranking follows the raw exponents") {
  const auto ladder = BucketLadder::validated(
      {bucket("b1", -0.18, 0.05, 10), bucket("b2", -0.15, 0.05, 10),
       bucket("b3", -0.12, 0.05, 10), bucket("b4", -0.10, 0.05, 10)},
      "e");
  // no strategy repeats anything below 12.8M samples
  const std::vector<std::int64_t> budgets = {1000000, 5000000, 12000000};
  const auto report = predict_report(ladder, 0.5, budgets);
  for (std::size_t j = 0; j < budgets.size(); ++j) {
    for (std::size_t s = 1; s < report.per_strategy_error.size(); ++s)
      CHECK(report.per_strategy_error[s][j] > report.per_strategy_error[s - 1][j]);
    CHECK(report.best_strategy_per_budget[j] == 0);
  }
}

TEST_CASE("rescaling the shared normalizer never changes the winner") {
  // shared d across buckets, distinct tau
  const auto ladder = BucketLadder::validated(
      {bucket("b1", -0.18, 0.05, 2), bucket("b2", -0.14, 0.05, 12),
       bucket("b3", -0.10, 0.05, 30)},
      "e");
  const auto budgets = geometric_budgets(1000000, 10000000000LL, 40);
  const auto base = predict_report(ladder, 0.5, budgets);
  for (double scale : {0.2, 1.7, 3.0}) {
    const auto scaled = predict_report(ladder, 0.5 * scale, budgets);
    CHECK(scaled.best_strategy_per_budget == base.best_strategy_per_budget);
    for (std::size_t s = 0; s < base.per_strategy_error.size(); ++s)
      for (std::size_t j = 0; j < budgets.size(); ++j) {
        const double base_reducible = base.per_strategy_error[s][j] - 0.05;
        const double scaled_reducible = scaled.per_strategy_error[s][j] - 0.05;
        CHECK(scaled_reducible == doctest::Approx(scale * base_reducible).epsilon(1e-12));
      }
  }
}

TEST_CASE("crossovers are stable under 10x budget-grid refinement") {
  const auto ladder = qqt_ladder(4, 4);
  const auto coarse = predict_report(ladder, 0.5, geometric_budgets(8000000, 2560000000LL, 25));
  const auto fine = predict_report(ladder, 0.5, geometric_budgets(8000000, 2560000000LL, 250));
  REQUIRE(coarse.crossovers.size() == 1);
  REQUIRE(fine.crossovers.size() == 1);
  CHECK(fine.crossovers[0].from_strategy == coarse.crossovers[0].from_strategy);
  CHECK(fine.crossovers[0].to_strategy == coarse.crossovers[0].to_strategy);
  // the refined interval nests inside the coarse one
  CHECK(fine.crossovers[0].budget_lo >= coarse.crossovers[0].budget_lo);
  CHECK(fine.crossovers[0].budget_hi <= coarse.crossovers[0].budget_hi);
}

TEST_CASE("a three-bucket ladder tuned for switches near 100M and 350M") {
  // parameters found by inverse search against the closed form; true switches
  // sit at 103.7M and 358.3M
  const auto ladder = BucketLadder::validated({bucket("top10", -0.18, 0.05, 4),
                                               bucket("top1020", -0.14, 0.0376, 4),
                                               bucket("top2030", -0.10, 0.01385, 1)},
                                              "imagenet_error");
  const auto report =
      predict_report(ladder, 0.5, geometric_budgets(32000000, 640000000, 25));
  REQUIRE(report.crossovers.size() == 2);
  CHECK(report.crossovers[0].from_strategy == 0);
  CHECK(report.crossovers[0].to_strategy == 1);
  CHECK(report.crossovers[1].from_strategy == 1);
  CHECK(report.crossovers[1].to_strategy == 2);
  CHECK(report.crossovers[0].budget_lo < 100000000);
  CHECK(report.crossovers[0].budget_hi >= 100000000);
  CHECK(report.crossovers[1].budget_lo < 350000000);
  CHECK(report.crossovers[1].budget_hi >= 350000000);
}

TEST_CASE("predict_report input validation") {
  const auto ladder = qqt_ladder(4, 4);
  CHECK_THROWS_AS(predict_report(ladder, 0.5, {}), std::invalid_argument);
  CHECK_THROWS_AS(predict_report(ladder, 0.5, {2000000, 1000000}), std::invalid_argument);
  CHECK_THROWS_AS(geometric_budgets(0, 100, 5), std::invalid_argument);
  CHECK_THROWS_AS(geometric_budgets(100, 10, 5), std::invalid_argument);
  CHECK_THROWS_AS(geometric_budgets(10, 100, 1), std::invalid_argument);
}

TEST_CASE("geometric_budgets spans the range with increasing values") {
  const auto budgets = geometric_budgets(32000000, 640000000, 25);
  CHECK(budgets.front() == 32000000);
  CHECK(budgets.back() == 640000000);
  CHECK(budgets.size() == 25);
  for (std::size_t i = 1; i < budgets.size(); ++i) CHECK(budgets[i] > budgets[i - 1]);
}
