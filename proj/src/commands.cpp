#include "qqt/commands.hpp"

#include <cstdio>
#include <map>
#include <stdexcept>

#include "qqt/curation.hpp"
#include "qqt/fitting.hpp"
#include "qqt/io.hpp"
#include "qqt/mixture.hpp"
#include "qqt/scaling.hpp"
#include "qqt/simulate.hpp"

namespace qqt::cli {

namespace {

int input_error(const std::exception& e) {
  std::fprintf(stderr, "error: %s\n", e.what());
  return kExitInputError;
}

UtilityParams pool_params(const FitResult& fit, const std::string& pool_id) {
  auto it = fit.per_pool.find(pool_id);
  if (it == fit.per_pool.end())
    throw std::invalid_argument("pool '" + pool_id + "' is not in the fit result");
  return UtilityParams::validated(fit.a, it->second.b, it->second.d, it->second.tau);
}

std::int64_t pool_size_of(const std::vector<io::ManifestEntry>& manifest,
                          const std::string& pool_id) {
  for (const auto& entry : manifest)
    if (entry.pool_id == pool_id) return entry.size;
  throw std::invalid_argument("pool '" + pool_id + "' is not in the manifest");
}

std::vector<std::string> parse_id_list(const std::string& text) {
  std::vector<std::string> ids;
  std::string current;
  for (char c : text + ",") {
    if (c == ',') {
      if (!current.empty()) ids.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (ids.empty()) throw std::invalid_argument("empty pool id list");
  return ids;
}

MixtureSpec mixture_from(const FitResult& fit, const std::vector<io::ManifestEntry>& manifest,
                         const std::vector<std::string>& pool_ids) {
  std::vector<MixturePool> pools;
  pools.reserve(pool_ids.size());
  for (const auto& id : pool_ids)
    pools.push_back(MixturePool{id, pool_params(fit, id), pool_size_of(manifest, id)});
  return MixtureSpec::make(std::move(pools));
}

}  // namespace

int cmd_fit(const FitOptions& options) {
  try {
    const ParamGrid grid = ParamGrid::with_resolution(options.a_steps, options.b_steps,
                                                      options.tau_min, options.tau_max);
    if (grid.empty()) {
      std::fprintf(stderr, "error: grid options produce an empty search space\n");
      return kExitSearchFailure;
    }
    const auto manifest = io::read_manifest(options.manifest_path);
    const auto rows = io::read_observation_rows(options.observations_path, options.as_accuracy);
    const auto observations = io::assemble_observations(rows, manifest,
                                                        options.observations_path);

    const FitResult result = options.shared_tau ? fit_joint_shared_tau(observations, grid)
                                                : fit_joint(observations, grid);
    io::write_fit_result(options.out_path, result);

    std::printf("a = %s\n", io::format_number(result.a).c_str());
    for (const auto& [pool_id, fit] : result.per_pool)
      std::printf("%s: b = %s, tau = %s, d = %s, l2 = %s\n", pool_id.c_str(),
                  io::format_number(fit.b).c_str(), io::format_number(fit.tau).c_str(),
                  io::format_number(fit.d).c_str(), io::format_number(fit.l2_loss).c_str());
    std::printf("total_l2 = %s\n", io::format_number(result.total_l2_loss).c_str());
    return kExitOk;
  } catch (const std::exception& e) {
    return input_error(e);
  }
}

int cmd_extrapolate(const ExtrapolateOptions& options) {
  try {
    const FitResult fit = io::read_fit_result(options.fit_path);
    const auto manifest = io::read_manifest(options.manifest_path);
    const UtilityParams params = pool_params(fit, options.pool_id);
    const std::int64_t pool_size = pool_size_of(manifest, options.pool_id);
    const auto budgets = io::parse_budget_list(options.budgets);

    std::vector<std::pair<std::int64_t, double>> rows;
    rows.reserve(budgets.size());
    for (std::int64_t budget : budgets)
      rows.emplace_back(budget, eval_loss(params, EpochSchedule::validated(pool_size, budget)));
    io::write_series(options.out_path, rows);
    std::printf("wrote %zu predictions for pool '%s'\n", rows.size(), options.pool_id.c_str());
    return kExitOk;
  } catch (const std::exception& e) {
    return input_error(e);
  }
}

int cmd_mix(const MixOptions& options) {
  try {
    if (options.formulation != "theorem1" && options.formulation != "f3")
      throw std::invalid_argument("formulation must be 'theorem1' or 'f3'");
    const FitResult fit = io::read_fit_result(options.fit_path);
    const auto manifest = io::read_manifest(options.manifest_path);
    const MixtureSpec mix = mixture_from(fit, manifest, parse_id_list(options.pool_ids));
    const auto budgets = io::parse_budget_list(options.budgets);
    const double d = weighted_d(mix);

    std::vector<std::pair<std::int64_t, double>> rows;
    rows.reserve(budgets.size());
    for (std::int64_t budget : budgets) {
      const double error = options.formulation == "f3"
                               ? eval_loss_f3(mix, fit.a, d, budget)
                               : eval_mixture_loss(mix, fit.a, d, budget);
      rows.emplace_back(budget, error);
    }
    io::write_series(options.out_path, rows);
    std::printf("wrote %zu %s predictions for %zu pools\n", rows.size(),
                options.formulation.c_str(), mix.pool_count());
    return kExitOk;
  } catch (const std::exception& e) {
    return input_error(e);
  }
}

int cmd_recommend(const RecommendOptions& options) {
  try {
    const FitResult fit = io::read_fit_result(options.fit_path);
    const auto manifest = io::read_manifest(options.manifest_path);
    const auto budgets = io::parse_budget_list(options.budgets);

    std::vector<Bucket> buckets;
    buckets.reserve(manifest.size());
    for (const auto& entry : manifest)
      buckets.push_back(Bucket{entry.pool_id, pool_params(fit, entry.pool_id), entry.size});
    const BucketLadder ladder = BucketLadder::validated(std::move(buckets), "error");
    for (const auto& warning : ladder.quality_order_warnings())
      std::fprintf(stderr, "warning: %s\n", warning.c_str());

    const StrategyReport report = predict_report(ladder, fit.a, budgets);
    io::write_strategy_report(options.report_path, report);
    io::write_strategy_series(options.series_path, report);

    for (std::size_t j = 0; j < report.budgets.size(); ++j)
      std::printf("budget %lld: best strategy %s (error %s)\n",
                  static_cast<long long>(report.budgets[j]),
                  report.strategy_labels[report.best_strategy_per_budget[j]].c_str(),
                  io::format_number(
                      report.per_strategy_error[report.best_strategy_per_budget[j]][j])
                      .c_str());
    if (report.crossovers.empty()) {
      std::printf("no crossovers: one strategy dominates over the budget grid\n");
    } else {
      for (const auto& x : report.crossovers)
        std::printf("crossover in (%lld, %lld]: %s -> %s\n",
                    static_cast<long long>(x.budget_lo), static_cast<long long>(x.budget_hi),
                    report.strategy_labels[x.from_strategy].c_str(),
                    report.strategy_labels[x.to_strategy].c_str());
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return input_error(e);
  }
}

int cmd_simulate(const SimulateOptions& options) {
  try {
    UtilityParams params{};
    if (options.has_inline_params) {
      params = UtilityParams::validated(options.a, options.b, options.d, options.tau);
    } else {
      if (options.fit_path.empty())
        throw std::invalid_argument("either inline --a/--b/--d/--tau or --fit is required");
      params = pool_params(io::read_fit_result(options.fit_path), options.pool_id);
    }
    const std::int64_t pool_size = io::parse_budget(options.pool_size);
    const auto budgets = io::parse_budget_list(options.budgets);
    const auto cfg = sim::SimConfig::validated(1e-3, options.noise, options.seed);

    const PoolObservations obs =
        sim::generate_observations(params, pool_size, budgets, cfg, options.pool_id);
    io::write_observation_log(options.out_path, {obs});
    std::printf("wrote %zu observations for pool '%s'\n", obs.points.size(),
                options.pool_id.c_str());
    return kExitOk;
  } catch (const std::exception& e) {
    return input_error(e);
  }
}

int cmd_sweep_k(const SweepKOptions& options) {
  try {
    const FitResult fit = io::read_fit_result(options.fit_path);
    const auto manifest = io::read_manifest(options.manifest_path);
    const auto pool_ids = parse_id_list(options.pool_ids);
    const MixtureSpec mix = mixture_from(fit, manifest, pool_ids);

    const auto rows = io::read_observation_rows(options.observations_path);
    for (const auto& row : rows)
      if (row.pool_id != rows.front().pool_id)
        throw std::invalid_argument(options.observations_path +
                                    ": merged log must contain a single pool_id");
    std::vector<ObsPoint> points;
    points.reserve(rows.size());
    for (const auto& row : rows) points.push_back(ObsPoint{row.samples_seen, row.error});
    const auto merged = PoolObservations::validated(rows.front().pool_id, mix.combined_size(),
                                                    std::move(points));

    if (mix.pool_count() == 1)
      std::fprintf(stderr, "warning: single-pool mixture, losses are independent of k\n");

    const auto losses =
        sweep_k_exponent(merged, mix, io::parse_double_list(options.k_grid));
    io::write_k_sweep(options.out_path, losses);

    std::size_t argmin = 0;
    for (std::size_t i = 1; i < losses.size(); ++i)
      if (losses[i].second < losses[argmin].second) argmin = i;
    std::printf("argmin k = %s (l2 = %s)\n", io::format_number(losses[argmin].first).c_str(),
                io::format_number(losses[argmin].second).c_str());
    return kExitOk;
  } catch (const std::exception& e) {
    return input_error(e);
  }
}

}  // namespace qqt::cli
