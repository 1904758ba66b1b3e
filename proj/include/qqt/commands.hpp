#ifndef QQT_COMMANDS_HPP
#define QQT_COMMANDS_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace qqt::cli {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitSearchFailure = 3;

struct FitOptions {
  std::string observations_path;
  std::string manifest_path;
  std::string out_path;
  bool as_accuracy = false;
  bool shared_tau = false;
  int a_steps = 100;
  int b_steps = 100;
  int tau_min = 1;
  int tau_max = 50;
};

struct ExtrapolateOptions {
  std::string fit_path;
  std::string manifest_path;
  std::string pool_id;
  std::string budgets;
  std::string out_path;
};

struct MixOptions {
  std::string fit_path;
  std::string manifest_path;
  std::string pool_ids;  // comma separated
  std::string budgets;
  std::string formulation = "theorem1";  // or "f3"
  std::string out_path;
};

struct RecommendOptions {
  std::string fit_path;
  std::string manifest_path;
  std::string budgets;
  std::string report_path;
  std::string series_path;
};

struct SimulateOptions {
  // Either inline parameters ...
  double a = 0.0, b = 0.0, d = -1.0, tau = 0.0;
  bool has_inline_params = false;
  // ... or a fitted pool.
  std::string fit_path;
  std::string manifest_path;
  std::string pool_id = "pool";
  std::string pool_size;  // budget syntax, e.g. "12.8M"
  std::string budgets;
  double noise = 0.0;
  std::uint64_t seed = 0;
  std::string out_path;
};

struct SweepKOptions {
  std::string observations_path;  // merged-pool log
  std::string fit_path;
  std::string manifest_path;
  std::string pool_ids;  // constituents, comma separated
  std::string k_grid = "0,0.25,0.5,0.75,1,1.25,1.5,1.75,2";
  std::string out_path;
};

int cmd_fit(const FitOptions& options);
int cmd_extrapolate(const ExtrapolateOptions& options);
int cmd_mix(const MixOptions& options);
int cmd_recommend(const RecommendOptions& options);
int cmd_simulate(const SimulateOptions& options);
int cmd_sweep_k(const SweepKOptions& options);

}  // namespace qqt::cli

#endif
