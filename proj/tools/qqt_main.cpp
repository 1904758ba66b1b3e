// qqt: fit, extrapolate, and plan compute-aware data filtering from
// per-pool scaling observations.
#include <CLI11.hpp>

#include "qqt/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Scaling-law toolkit for heterogeneous data pools under repetition"};
  app.require_subcommand(1);

  qqt::cli::FitOptions fit;
  auto* fit_cmd = app.add_subcommand(
      "fit", "Grid-search scaling parameters from an observation log");
  fit_cmd->add_option("--observations", fit.observations_path, "Observation log CSV")
      ->required();
  fit_cmd->add_option("--manifest", fit.manifest_path, "Pool manifest JSON")->required();
  fit_cmd->add_option("--out", fit.out_path, "Output fit result JSON")->required();
  fit_cmd->add_flag("--accuracy", fit.as_accuracy,
                    "Third log column holds accuracy; convert to error on read");
  fit_cmd->add_flag("--shared-tau", fit.shared_tau, "Constrain one half-life across pools");
  fit_cmd->add_option("--a-steps", fit.a_steps, "Normalizer grid resolution");
  fit_cmd->add_option("--b-steps", fit.b_steps, "Utility-exponent grid resolution");
  fit_cmd->add_option("--tau-min", fit.tau_min, "Smallest half-life in the grid");
  fit_cmd->add_option("--tau-max", fit.tau_max, "Largest half-life in the grid");

  qqt::cli::ExtrapolateOptions extrapolate;
  auto* extrapolate_cmd = app.add_subcommand(
      "extrapolate", "Predict one pool's error curve at arbitrary budgets");
  extrapolate_cmd->add_option("--fit", extrapolate.fit_path, "Fit result JSON")->required();
  extrapolate_cmd->add_option("--manifest", extrapolate.manifest_path, "Pool manifest JSON")
      ->required();
  extrapolate_cmd->add_option("--pool", extrapolate.pool_id, "Pool id")->required();
  extrapolate_cmd
      ->add_option("--budgets", extrapolate.budgets, "Comma-separated budgets, e.g. 32M,640M")
      ->required();
  extrapolate_cmd->add_option("--out", extrapolate.out_path, "Output series CSV")->required();

  qqt::cli::MixOptions mix;
  auto* mix_cmd = app.add_subcommand(
      "mix", "Predict the error curve of a pool mixture without joint training");
  mix_cmd->add_option("--fit", mix.fit_path, "Fit result JSON")->required();
  mix_cmd->add_option("--manifest", mix.manifest_path, "Pool manifest JSON")->required();
  mix_cmd->add_option("--pools", mix.pool_ids, "Comma-separated constituent pool ids")
      ->required();
  mix_cmd->add_option("--budgets", mix.budgets, "Comma-separated budgets")->required();
  mix_cmd->add_option("--formulation", mix.formulation, "theorem1 (default) or f3");
  mix_cmd->add_option("--out", mix.out_path, "Output series CSV")->required();

  qqt::cli::RecommendOptions recommend;
  auto* recommend_cmd = app.add_subcommand(
      "recommend", "Rank prefix filtering strategies per budget and report crossovers");
  recommend_cmd->add_option("--fit", recommend.fit_path, "Fit result JSON")->required();
  recommend_cmd->add_option("--manifest", recommend.manifest_path, "Pool manifest JSON")
      ->required();
  recommend_cmd->add_option("--budgets", recommend.budgets, "Comma-separated budgets")
      ->required();
  recommend_cmd->add_option("--out", recommend.report_path, "Output report JSON")->required();
  recommend_cmd->add_option("--series", recommend.series_path, "Output plot-series CSV")
      ->required();

  qqt::cli::SimulateOptions simulate;
  auto* simulate_cmd = app.add_subcommand(
      "simulate", "Generate a synthetic observation log from scaling parameters");
  auto* sim_a = simulate_cmd->add_option("--a", simulate.a, "Normalizer");
  auto* sim_b = simulate_cmd->add_option("--b", simulate.b, "Utility exponent (negative)");
  auto* sim_d = simulate_cmd->add_option("--d", simulate.d, "Irreducible error");
  auto* sim_tau = simulate_cmd->add_option("--tau", simulate.tau, "Half-life in epochs");
  simulate_cmd->add_option("--fit", simulate.fit_path, "Fit result JSON (instead of --a..--tau)");
  simulate_cmd->add_option("--pool", simulate.pool_id, "Pool id to simulate / emit");
  simulate_cmd->add_option("--pool-size", simulate.pool_size, "Pool size, e.g. 12.8M")
      ->required();
  simulate_cmd->add_option("--budgets", simulate.budgets, "Comma-separated budgets")
      ->required();
  simulate_cmd->add_option("--noise", simulate.noise, "Gaussian noise sigma on errors");
  simulate_cmd->add_option("--seed", simulate.seed, "RNG seed");
  simulate_cmd->add_option("--out", simulate.out_path, "Output observation log CSV")
      ->required();

  qqt::cli::SweepKOptions sweep;
  auto* sweep_cmd = app.add_subcommand(
      "sweep-k", "Score half-life rescaling exponents against a merged-pool log");
  sweep_cmd->add_option("--observations", sweep.observations_path, "Merged-pool log CSV")
      ->required();
  sweep_cmd->add_option("--fit", sweep.fit_path, "Fit result JSON")->required();
  sweep_cmd->add_option("--manifest", sweep.manifest_path, "Pool manifest JSON")->required();
  sweep_cmd->add_option("--pools", sweep.pool_ids, "Comma-separated constituent pool ids")
      ->required();
  sweep_cmd->add_option("--k-grid", sweep.k_grid, "Comma-separated exponents");
  sweep_cmd->add_option("--out", sweep.out_path, "Output (k, l2_loss) CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return qqt::cli::kExitInputError;
  }

  simulate.has_inline_params = *sim_a || *sim_b || *sim_d || *sim_tau;
  if (simulate.has_inline_params && !(*sim_a && *sim_b && *sim_d && *sim_tau)) {
    std::fprintf(stderr, "error: --a, --b, --d and --tau must be given together\n");
    return qqt::cli::kExitInputError;
  }

  if (fit_cmd->parsed()) return qqt::cli::cmd_fit(fit);
  if (extrapolate_cmd->parsed()) return qqt::cli::cmd_extrapolate(extrapolate);
  if (mix_cmd->parsed()) return qqt::cli::cmd_mix(mix);
  if (recommend_cmd->parsed()) return qqt::cli::cmd_recommend(recommend);
  if (simulate_cmd->parsed()) return qqt::cli::cmd_simulate(simulate);
  if (sweep_cmd->parsed()) return qqt::cli::cmd_sweep_k(sweep);
  return qqt::cli::kExitInputError;
}
