// Acceptance suite: every criterion prints one [PASS]/[FAIL] line.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <doctest.h>

#include "qqt/commands.hpp"
#include "qqt/curation.hpp"
#include "qqt/fitting.hpp"
#include "qqt/io.hpp"
#include "qqt/mixture.hpp"
#include "qqt/scaling.hpp"
#include "qqt/simulate.hpp"

using namespace qqt;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool ok = true;
  std::string detail;

  void require(bool condition, const std::string& message) {
    if (!condition && ok) {
      ok = false;
      detail = message;
    }
  }
};

void report(int criterion, const char* name, const Outcome& outcome) {
  std::printf("[%s] criterion %d: %s%s%s\n", outcome.ok ? "PASS" : "FAIL", criterion, name,
              outcome.ok ? "" : " -- ", outcome.detail.c_str());
  std::fflush(stdout);
  CHECK_MESSAGE(outcome.ok, "criterion ", criterion, ": ", outcome.detail);
}

class GridSampler {
 public:
  explicit GridSampler(std::uint64_t seed) : rng_(seed), grid_(ParamGrid::standard()) {}

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }
  std::size_t index(std::size_t size) { return static_cast<std::size_t>(rng_() % size); }

  UtilityParams draw_params() {
    return UtilityParams::validated(grid_.a_values[20 + index(79)],
                                    grid_.b_values[index(grid_.b_values.size())],
                                    grid_.d_values[index(grid_.d_values.size())],
                                    grid_.tau_values[index(grid_.tau_values.size())]);
  }

  const ParamGrid& grid() const { return grid_; }

 private:
  std::mt19937_64 rng_;
  ParamGrid grid_;
};

std::string work_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "qqt_acceptance";
  fs::create_directories(dir);
  return (dir / name).string();
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<std::int64_t> fit_budgets(std::int64_t pool_size) {
  std::vector<std::int64_t> budgets;
  for (double e : {0.5, 1., 2., 3., 4., 5., 6., 7., 8., 9., 10., 13., 16., 20., 25., 30., 40.,
                   50.})
    budgets.push_back(static_cast<std::int64_t>(e * static_cast<double>(pool_size)));
  return budgets;
}

}  // namespace

TEST_CASE("criterion 1: single-pool ODE oracle") {
  const auto start = std::chrono::steady_clock::now();
  GridSampler sampler(101);
  Outcome outcome;
  const std::int64_t pool_size = 100000;
  for (int draw = 0; draw < 20; ++draw) {
    const UtilityParams params = sampler.draw_params();
    const auto traj = sim::integrate_single(params, pool_size, 10 * pool_size,
                                            sim::SimConfig{1e-3, 0.0, 0});
    for (std::int64_t j = 1; j <= 10; ++j) {
      const double closed = eval_loss(params, EpochSchedule::validated(pool_size, j * pool_size));
      const double integrated =
          sim::trajectory_value_at(traj, static_cast<double>(j) * pool_size);
      const double rel = std::fabs(integrated - closed) / closed;
      outcome.require(rel <= 1e-6, "draw " + std::to_string(draw) + " epoch " +
                                       std::to_string(j) + " rel " + std::to_string(rel));
    }
  }
  outcome.require(elapsed_seconds(start) <= 60.0, "runtime over 1 minute");
  report(1, "integrator matches eval_loss at 10 epoch boundaries, 20 grid draws, <=1e-6",
         outcome);
}

TEST_CASE("criterion 2: mixture ODE oracle") {
  const auto start = std::chrono::steady_clock::now();
  GridSampler sampler(202);
  Outcome outcome;
  for (int draw = 0; draw < 11; ++draw) {
    const std::size_t n_pools = draw < 6 ? 2 : 3;
    std::vector<MixturePool> pools;
    for (std::size_t i = 0; i < n_pools; ++i) {
      const auto size =
          static_cast<std::int64_t>(10000 + sampler.index(190000));  // n0 >= 1e4
      pools.push_back(MixturePool{"p" + std::to_string(i), sampler.draw_params(), size});
    }
    const MixtureSpec mix = MixtureSpec::make(pools);
    const double a = weighted_a(mix);
    const double d = weighted_d(mix);
    const auto traj =
        sim::integrate_mixture(mix, a, d, 10 * mix.combined_size(), sim::SimConfig{1e-3, 0.0, 0});
    for (std::int64_t epochs : {2, 5, 10}) {
      const std::int64_t total = epochs * mix.combined_size();
      const double closed = eval_mixture_loss(mix, a, d, total);
      const double integrated = sim::trajectory_value_at(traj, static_cast<double>(total));
      const double rel = std::fabs(integrated - closed) / closed;
      outcome.require(rel <= 0.01, "mixture " + std::to_string(draw) + " at " +
                                       std::to_string(epochs) + " epochs rel " +
                                       std::to_string(rel));
    }
  }
  outcome.require(elapsed_seconds(start) <= 120.0, "runtime over 2 minutes");
  report(2, "alternating-pool integrator endpoints within 1% of eval_mixture_loss", outcome);
}

TEST_CASE("criterion 3: equivalence of the utility and combined formulations") {
  GridSampler sampler(303);
  Outcome outcome;
  for (int draw = 0; draw < 10; ++draw) {
    const std::size_t n_pools = draw % 2 == 0 ? 2 : 3;
    const auto size = static_cast<std::int64_t>(1000000 + sampler.index(9000000));  // n0 >= 1e6
    const double tau = sampler.grid().tau_values[sampler.index(50)];
    const double d = sampler.grid().d_values[sampler.index(5)];
    const double a = sampler.grid().a_values[20 + sampler.index(79)];
    std::vector<MixturePool> pools;
    for (std::size_t i = 0; i < n_pools; ++i) {
      // equal sizes and equal tau give every pool one shared decay factor
      const double b = sampler.grid().b_values[sampler.index(100)];
      pools.push_back(MixturePool{"p" + std::to_string(i),
                                  UtilityParams::validated(a, b, d, tau), size});
    }
    const MixtureSpec mix = MixtureSpec::make(pools);
    for (std::int64_t epochs = 1; epochs <= 10; ++epochs) {
      const std::int64_t total = epochs * mix.combined_size();
      const double theorem1 = eval_mixture_loss(mix, a, d, total);
      const double f3 = eval_loss_f3(mix, a, d, total);
      const double rel = std::fabs(theorem1 - f3) / theorem1;
      outcome.require(rel <= 1e-6, "config " + std::to_string(draw) + " epoch " +
                                       std::to_string(epochs) + " rel " + std::to_string(rel));
    }
  }
  report(3, "shared-decay mixtures: theorem1 and f3 formulations agree within 1e-6 over 10 epochs",
         outcome);
}

TEST_CASE("criterion 4: grid fit recovery") {
  const auto start = std::chrono::steady_clock::now();
  const ParamGrid grid = ParamGrid::standard();
  Outcome outcome;
  const std::int64_t pool_size = 1000000;
  const auto budgets = fit_budgets(pool_size);
  const double a_true = grid.a_values[49];

  // grid-aligned pools: exact recovery at zero loss
  const std::vector<double> b_targets = {-0.18, -0.16, -0.13, -0.10};
  const std::vector<double> taus = {20.0, 10.0, 5.0, 2.0};
  const std::vector<double> ds = {0.05, 0.05, 0.02, 0.01};
  std::vector<PoolObservations> aligned;
  for (std::size_t i = 0; i < 4; ++i)
    aligned.push_back(sim::generate_observations(
        UtilityParams::validated(a_true, grid.snap_b(b_targets[i]), ds[i], taus[i]), pool_size,
        budgets, sim::SimConfig{1e-3, 0.0, 0}, "pool" + std::to_string(i)));
  const FitResult exact = fit_joint(aligned, grid);
  outcome.require(exact.total_l2_loss == 0.0, "aligned pools: nonzero total loss");
  outcome.require(exact.a == a_true, "aligned pools: wrong normalizer");
  for (std::size_t i = 0; i < 4; ++i) {
    const PoolFit& fit = exact.per_pool.at("pool" + std::to_string(i));
    outcome.require(fit.b == grid.snap_b(b_targets[i]) && fit.tau == taus[i] &&
                        fit.d == ds[i],
                    "aligned pool " + std::to_string(i) + " not recovered exactly");
  }

  // off-grid, one dimension at a time: recovery within one grid step
  {
    const double b_true = grid.snap_b(-0.2) + 0.3 * (grid.snap_b(-0.19) - grid.snap_b(-0.2));
    const auto obs = sim::generate_observations(
        UtilityParams::validated(a_true, b_true, 0.05, 10.0), pool_size, budgets,
        sim::SimConfig{1e-3, 0.0, 0}, "offb");
    const PoolFit fit = fit_single_pool(obs, a_true, grid);
    outcome.require(fit.b >= grid.snap_b(-0.2) - 1e-12 && fit.b <= grid.snap_b(-0.19) + 1e-12,
                    "off-grid b recovered outside its bracketing grid pair");
  }
  {
    const auto obs = sim::generate_observations(
        UtilityParams::validated(a_true, grid.snap_b(-0.2), 0.05, 10.3), pool_size, budgets,
        sim::SimConfig{1e-3, 0.0, 0}, "offtau");
    const PoolFit fit = fit_single_pool(obs, a_true, grid);
    outcome.require(fit.tau == 10.0 || fit.tau == 11.0,
                    "off-grid tau recovered outside {10,11}: got " + std::to_string(fit.tau));
  }
  {
    const double a_off = grid.a_values[49] + 0.25 * (grid.a_values[50] - grid.a_values[49]);
    const auto obs = sim::generate_observations(
        UtilityParams::validated(a_off, grid.snap_b(-0.2), 0.05, 10.0), pool_size, budgets,
        sim::SimConfig{1e-3, 0.0, 0}, "offa");
    const FitResult fit = fit_joint({obs}, grid);
    outcome.require(fit.a >= grid.a_values[49] - 1e-12 && fit.a <= grid.a_values[50] + 1e-12,
                    "off-grid a recovered outside its bracketing grid pair");
  }
  {
    const auto obs = sim::generate_observations(
        UtilityParams::validated(a_true, grid.snap_b(-0.2), 0.055, 10.0), pool_size, budgets,
        sim::SimConfig{1e-3, 0.0, 0}, "offd");
    const PoolFit fit = fit_single_pool(obs, a_true, grid);
    outcome.require(fit.d == 0.05 || fit.d == 0.10,
                    "off-grid d recovered outside {0.05,0.10}: got " + std::to_string(fit.d));
  }

  // noisy observations: loss bounded by the noise floor
  const double sigma = 0.002;
  std::vector<PoolObservations> noisy;
  for (std::size_t i = 0; i < 4; ++i)
    noisy.push_back(sim::generate_observations(
        UtilityParams::validated(a_true, grid.snap_b(b_targets[i]), ds[i], taus[i]), pool_size,
        budgets, sim::SimConfig{1e-3, sigma, 900 + i}, "pool" + std::to_string(i)));
  const FitResult under_noise = fit_joint(noisy, grid);
  for (std::size_t i = 0; i < 4; ++i) {
    const double bound = static_cast<double>(budgets.size()) * 4.0 * sigma * sigma;
    const double loss = under_noise.per_pool.at("pool" + std::to_string(i)).l2_loss;
    outcome.require(loss <= bound, "noisy pool " + std::to_string(i) + " loss " +
                                       std::to_string(loss) + " above 4*sigma^2 per point");
  }

  outcome.require(elapsed_seconds(start) <= 600.0, "runtime over 10 minutes");
  report(4, "exact on-grid recovery, one-step off-grid recovery, noise-floor loss", outcome);
}

TEST_CASE("criterion 5: a shared half-life fits strictly worse") {
  const ParamGrid grid = ParamGrid::standard();
  Outcome outcome;
  const double a_true = grid.a_values[49];
  std::vector<PoolObservations> all_obs;
  const std::vector<double> taus = {2.0, 8.0, 30.0};
  for (std::size_t i = 0; i < taus.size(); ++i)
    all_obs.push_back(sim::generate_observations(
        UtilityParams::validated(a_true, grid.snap_b(-0.18 + 0.04 * static_cast<double>(i)),
                                 0.05, taus[i]),
        1000000, fit_budgets(1000000), sim::SimConfig{1e-3, 0.0, 0},
        "pool" + std::to_string(i)));

  const FitResult per_pool = fit_joint(all_obs, grid);
  const FitResult shared = fit_joint_shared_tau(all_obs, grid);
  outcome.require(per_pool.total_l2_loss == 0.0, "per-pool tau did not recover exactly");
  outcome.require(shared.total_l2_loss > per_pool.total_l2_loss,
                  "shared tau not strictly worse");
  report(5, "distinct-tau pools: shared-tau constrained fit has strictly higher loss", outcome);
}

TEST_CASE("criterion 6: rescaling-exponent sweep") {
  Outcome outcome;
  std::vector<MixturePool> pools = {
      MixturePool{"good", UtilityParams::validated(0.5, -0.18, 0.05, 5.0), 1000000},
      MixturePool{"bad", UtilityParams::validated(0.5, -0.10, 0.05, 3.0), 1000000}};
  std::vector<double> k_grid;
  for (double k = 0.0; k <= 2.0 + 1e-9; k += 0.25) k_grid.push_back(k);

  auto merged_log = [&](double k_generate) {
    // the merged pool is simulated, not evaluated: boundary values come from
    // the alternating-pool integrator
    const MixtureSpec generator = MixtureSpec::make(pools, k_generate);
    const double a = weighted_a(generator);
    const double d = weighted_d(generator);
    const auto traj = sim::integrate_mixture(generator, a, d, 10 * generator.combined_size(),
                                             sim::SimConfig{1e-3, 0.0, 0});
    std::vector<ObsPoint> points;
    for (std::int64_t epochs = 1; epochs <= 10; ++epochs) {
      const std::int64_t total = epochs * generator.combined_size();
      points.push_back(
          ObsPoint{total, sim::trajectory_value_at(traj, static_cast<double>(total))});
    }
    return PoolObservations::validated("merged", generator.combined_size(), std::move(points));
  };

  auto argmin_k = [](const std::vector<std::pair<double, double>>& losses) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < losses.size(); ++i)
      if (losses[i].second < losses[best].second) best = i;
    return losses[best].first;
  };

  const MixtureSpec mix = MixtureSpec::make(pools);
  const double with_rescaling = argmin_k(sweep_k_exponent(merged_log(1.0), mix, k_grid));
  outcome.require(with_rescaling == 1.0,
                  "p*tau log: argmin k = " + std::to_string(with_rescaling));
  const double without_rescaling = argmin_k(sweep_k_exponent(merged_log(0.0), mix, k_grid));
  outcome.require(without_rescaling == 0.0,
                  "tau log: argmin k = " + std::to_string(without_rescaling));
  report(6, "simulated merged logs recover k=1 with rescaling and k=0 without", outcome);
}

TEST_CASE("criterion 7: compute-dependent filtering crossover") {
  Outcome outcome;
  auto ladder = [](double tau_top) {
    return BucketLadder::validated(
        {Bucket{"top10", UtilityParams::validated(0.5, -0.18, 0.05, tau_top), 12800000},
         Bucket{"top1020", UtilityParams::validated(0.5, -0.10, 0.01, 4.0), 12800000}},
        "imagenet_error");
  };
  const auto budgets = geometric_budgets(8000000, 2560000000LL, 60);

  double previous_crossover = 0.0;
  for (double tau_top : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    const StrategyReport report_at_tau = predict_report(ladder(tau_top), 0.5, budgets);
    outcome.require(report_at_tau.best_strategy_per_budget.front() == 0,
                    "aggressive strategy does not win the smallest budget");
    outcome.require(report_at_tau.best_strategy_per_budget.back() == 1,
                    "the union does not win the largest budget");
    outcome.require(report_at_tau.crossovers.size() == 1,
                    "tau_top " + std::to_string(tau_top) + ": expected exactly one switch, got " +
                        std::to_string(report_at_tau.crossovers.size()));
    if (!report_at_tau.crossovers.empty()) {
      const double where = static_cast<double>(report_at_tau.crossovers[0].budget_hi);
      outcome.require(where > previous_crossover,
                      "crossover budget not increasing with tau_top");
      previous_crossover = where;
    }
  }
  report(7, "one-to-two-bucket switch happens once and moves later as tau grows", outcome);
}

TEST_CASE("criterion 8: composition identities hold exactly") {
  Outcome outcome;
  const auto pool = [](const std::string& id, double b) {
    return MixturePool{id, UtilityParams::validated(0.5, b, 0.05, 7.0), 250000};
  };
  const auto mix = MixtureSpec::make({pool("p1", -0.18), pool("p2", -0.10)});
  outcome.require(effective_utility(mix, 1) == (-0.18 + -0.10) / 2.0,
                  "epoch-1 effective utility is not the exact mean");
  const auto mix4 = MixtureSpec::make(
      {pool("p1", -0.18), pool("p2", -0.16), pool("p3", -0.13), pool("p4", -0.10)});
  outcome.require(effective_utility(mix4, 1) == (-0.18 + -0.16 + -0.13 + -0.10) / 4.0,
                  "four-pool epoch-1 effective utility is not the exact mean");
  for (std::int64_t p : {1, 2, 3, 4, 7}) {
    outcome.require(rescale_tau(10.0, 12800000, p * 12800000) == 10.0 * static_cast<double>(p),
                    "rescale_tau(10, N, " + std::to_string(p) + "N) != " + std::to_string(10 * p));
    outcome.require(rescale_tau(3.0, 4096, p * 4096) == 3.0 * static_cast<double>(p),
                    "rescale_tau(3, N, pN) inexact");
  }
  report(8, "mean-utility and tau-rescaling identities are exact", outcome);
}

TEST_CASE("criterion 9: CLI simulate -> fit -> extrapolate round trip") {
  Outcome outcome;
  const ParamGrid grid = ParamGrid::standard();
  const auto params = UtilityParams::validated(grid.a_values[49], grid.snap_b(-0.18), 0.05,
                                               10.0);
  io::write_manifest(work_path("pools.json"), {{"solo", 1000000, 1, "round trip"}});

  cli::SimulateOptions simulate;
  simulate.a = params.a;
  simulate.b = params.b;
  simulate.d = params.d;
  simulate.tau = params.tau;
  simulate.has_inline_params = true;
  simulate.pool_id = "solo";
  simulate.pool_size = "1M";
  simulate.budgets = "0.5M,1M,2M,3M,4M,5M,6M,7M,8M,9M,10M,13M,16M,20M,25M,30M,40M,50M";
  simulate.out_path = work_path("obs.csv");
  outcome.require(cli::cmd_simulate(simulate) == cli::kExitOk, "simulate failed");

  cli::FitOptions fit;
  fit.observations_path = work_path("obs.csv");
  fit.manifest_path = work_path("pools.json");
  fit.out_path = work_path("fit.json");
  outcome.require(cli::cmd_fit(fit) == cli::kExitOk, "fit failed");

  cli::ExtrapolateOptions extrapolate;
  extrapolate.fit_path = work_path("fit.json");
  extrapolate.manifest_path = work_path("pools.json");
  extrapolate.pool_id = "solo";
  extrapolate.budgets = simulate.budgets;
  extrapolate.out_path = work_path("series.csv");
  outcome.require(cli::cmd_extrapolate(extrapolate) == cli::kExitOk, "extrapolate failed");

  // predictions reproduce the generating curve at every generated budget
  const std::string series = io::read_file(work_path("series.csv"));
  std::size_t pos = series.find('\n') + 1;
  int checked = 0;
  while (pos < series.size()) {
    const std::size_t comma = series.find(',', pos);
    const std::size_t end = series.find('\n', pos);
    const std::int64_t n = std::stoll(series.substr(pos, comma - pos));
    const double predicted = std::stod(series.substr(comma + 1, end - comma - 1));
    const double truth = eval_loss(params, EpochSchedule::validated(1000000, n));
    outcome.require(std::fabs(predicted - truth) <= 1e-9,
                    "prediction at n=" + std::to_string(n) + " off by " +
                        std::to_string(std::fabs(predicted - truth)));
    ++checked;
    pos = end + 1;
  }
  outcome.require(checked == 18, "series row count wrong");

  // byte-stable reruns of every stage
  simulate.out_path = work_path("obs_rerun.csv");
  fit.out_path = work_path("fit_rerun.json");
  extrapolate.out_path = work_path("series_rerun.csv");
  fit.observations_path = work_path("obs_rerun.csv");
  extrapolate.fit_path = work_path("fit_rerun.json");
  outcome.require(cli::cmd_simulate(simulate) == cli::kExitOk, "rerun simulate failed");
  outcome.require(cli::cmd_fit(fit) == cli::kExitOk, "rerun fit failed");
  outcome.require(cli::cmd_extrapolate(extrapolate) == cli::kExitOk, "rerun extrapolate failed");
  outcome.require(io::read_file(work_path("obs.csv")) == io::read_file(work_path("obs_rerun.csv")),
                  "observation logs differ across reruns");
  outcome.require(
      io::read_file(work_path("fit.json")) == io::read_file(work_path("fit_rerun.json")),
      "fit results differ across reruns");
  outcome.require(
      io::read_file(work_path("series.csv")) == io::read_file(work_path("series_rerun.csv")),
      "series differ across reruns");
  report(9, "noise-free round trip reproduces the curve to 1e-9 with byte-stable files",
         outcome);
}
