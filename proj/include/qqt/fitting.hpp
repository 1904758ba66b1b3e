#ifndef QQT_FITTING_HPP
#define QQT_FITTING_HPP

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "qqt/mixture.hpp"
#include "qqt/scaling.hpp"

namespace qqt {

struct ObsPoint {
  std::int64_t samples_seen;
  double error;  // downstream zero-shot error in [0,1]
};

/// One pool's empirical learning curve: (samples_seen, error) observations
/// against which scaling parameters are fitted.
struct PoolObservations {
  std::string pool_id;
  std::int64_t pool_size;
  std::vector<ObsPoint> points;

  // Requires non-empty points, strictly increasing samples_seen, errors in [0,1].
  static PoolObservations validated(std::string pool_id, std::int64_t pool_size,
                                    std::vector<ObsPoint> points);
};

/// Discrete search space for the grid fit. The normalizer spans [0.001,1]
/// linearly; |b| spans [0.005,0.5] geometrically (two orders of magnitude);
/// tau runs over the integers in [1,50]; d is a fixed five-value set.
struct ParamGrid {
  std::vector<double> a_values;    // ascending
  std::vector<double> b_values;    // ascending (most negative first)
  std::vector<double> tau_values;  // ascending
  std::vector<double> d_values;    // ascending

  static ParamGrid standard();
  // Custom resolution with the standard ranges. Steps of zero (or an empty
  // tau range) produce an empty grid; callers treat that as a search failure.
  static ParamGrid with_resolution(int a_steps, int b_steps, int tau_min, int tau_max);

  bool empty() const;
  // Compact encoding of the grid spacing, stored in fit results so a reader
  // can rebuild the grid and snap parameters back onto it.
  std::string version() const;
  static ParamGrid from_version(const std::string& version);

  double snap_a(double a) const;
  double snap_b(double b) const;
  double snap_tau(double tau) const;
  double snap_d(double d) const;
};

struct PoolFit {
  double b = 0.0;
  double tau = 0.0;
  double d = 0.0;
  double l2_loss = 0.0;
};

struct FitResult {
  double a = 0.0;
  std::map<std::string, PoolFit> per_pool;
  double total_l2_loss = 0.0;
  std::string grid_version;
};

// Sum of squared residuals of the closed-form predictions against the
// observed errors. Zero iff every point lies exactly on the curve.
double l2_fit_loss(const UtilityParams& params, const PoolObservations& obs);

// Exhaustive search over (b, tau, d) at a fixed normalizer. Ties resolve to
// the smallest grid indices in (b, tau, d) order, so results do not depend
// on evaluation order.
PoolFit fit_single_pool(const PoolObservations& obs, double a_fixed, const ParamGrid& grid);

// Joint fit: one shared normalizer across pools, per-pool (b, tau, d),
// minimizing the summed L2 loss. Deterministic; ties resolve to the
// smallest grid indices in (a, b, tau, d) order.
FitResult fit_joint(const std::vector<PoolObservations>& all_obs, const ParamGrid& grid);

// Constrained variant forcing a single tau across pools; used to quantify
// how much per-pool half-lives matter.
FitResult fit_joint_shared_tau(const std::vector<PoolObservations>& all_obs,
                               const ParamGrid& grid);

// For each exponent k, stretches every constituent half-life by
// (N_hat/N_i)^k instead of (N_hat/N_i) and scores the mixture prediction
// against a merged-pool log. Returned pairs are sorted by k.
std::vector<std::pair<double, double>> sweep_k_exponent(const PoolObservations& merged_obs,
                                                        const MixtureSpec& constituents,
                                                        std::vector<double> k_grid);

}  // namespace qqt

#endif
