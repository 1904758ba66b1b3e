#ifndef QQT_SIMULATE_HPP
#define QQT_SIMULATE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qqt/fitting.hpp"
#include "qqt/mixture.hpp"
#include "qqt/scaling.hpp"

namespace qqt::sim {

struct SimConfig {
  double step_fraction = 1e-3;  // integration step as a fraction of pool size, in (0,1]
  double noise_sigma = 0.0;     // additive gaussian noise on emitted observations
  std::uint64_t seed = 0;       // RNG seed; fixed seed => bit-identical output

  static SimConfig validated(double step_fraction, double noise_sigma, std::uint64_t seed);
};

struct TrajectoryPoint {
  double samples_seen;
  double y;
};
using Trajectory = std::vector<TrajectoryPoint>;

// y value at the trajectory point nearest to samples_seen; throws if the
// nearest grid point is further than half a step away.
double trajectory_value_at(const Trajectory& traj, double samples_seen);

// Integrates dy/dn = (y-d)/n * b_e with the per-epoch decayed exponent b_e,
// anchored to the closed form at the end of epoch 1 (epoch-1 points are the
// exact power law). Steps are uniform in n, step_fraction*pool_size wide;
// each step advances log(y-d) over log n by an RK2 midpoint rule. Checks
// eval_loss through an independent code path.
Trajectory integrate_single(const UtilityParams& params, std::int64_t pool_size,
                            std::int64_t total_samples, const SimConfig& cfg);

// Same integrator over a pool mixture: each step draws its exponent from one
// constituent in proportional round-robin order, with that constituent's own
// decayed utility for the current mixture epoch. Independent check of the
// weighted-mean composition in eval_mixture_loss.
Trajectory integrate_mixture(const MixtureSpec& mix, double a, double d,
                             std::int64_t total_samples, const SimConfig& cfg);

// Emits (budget, eval_loss(budget) + noise) per budget, clamped to [0,1].
// Budgets must be strictly increasing.
PoolObservations generate_observations(const UtilityParams& params, std::int64_t pool_size,
                                       const std::vector<std::int64_t>& budgets,
                                       const SimConfig& cfg,
                                       const std::string& pool_id = "pool");

}  // namespace qqt::sim

#endif
