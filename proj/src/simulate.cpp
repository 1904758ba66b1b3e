#include "qqt/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace qqt::sim {

SimConfig SimConfig::validated(double step_fraction, double noise_sigma, std::uint64_t seed) {
  if (!(step_fraction > 0.0) || step_fraction > 1.0)
    throw std::invalid_argument("SimConfig: step_fraction must lie in (0,1]");
  if (!(noise_sigma >= 0.0))
    throw std::invalid_argument("SimConfig: noise_sigma must be >= 0");
  return SimConfig{step_fraction, noise_sigma, seed};
}

double trajectory_value_at(const Trajectory& traj, double samples_seen) {
  if (traj.empty()) throw std::invalid_argument("trajectory_value_at: empty trajectory");
  auto it = std::lower_bound(traj.begin(), traj.end(), samples_seen,
                             [](const TrajectoryPoint& p, double n) { return p.samples_seen < n; });
  const TrajectoryPoint* best = it != traj.end() ? &*it : &traj.back();
  if (it != traj.begin() &&
      std::fabs(std::prev(it)->samples_seen - samples_seen) <
          std::fabs(best->samples_seen - samples_seen))
    best = &*std::prev(it);
  if (std::fabs(best->samples_seen - samples_seen) > 1e-9 * std::max(1.0, samples_seen))
    throw std::invalid_argument("trajectory_value_at: no trajectory point at requested n");
  return best->y;
}

namespace {

// One RK2 midpoint step for d(y-d)/dt = exponent*(y-d) over t = log n.
double rk2_factor(double exponent, double dt) {
  const double u = exponent * dt;
  return 1.0 + u + 0.5 * u * u;
}

// Appends the points of one epoch segment [seg_start, seg_end], stepping
// uniformly in n with width h and advancing z = y - d by the RK2 rule.
void integrate_segment(double seg_start, double seg_end, double h, double exponent, double d,
                       double& z, Trajectory& traj) {
  const double span = seg_end - seg_start;
  const auto steps = static_cast<std::int64_t>(std::ceil(span / h - 1e-12));
  for (std::int64_t s = 1; s <= steps; ++s) {
    const double n_prev = s == 1 ? seg_start : seg_start + static_cast<double>(s - 1) * h;
    const double n_next = s == steps ? seg_end : seg_start + static_cast<double>(s) * h;
    z *= rk2_factor(exponent, std::log(n_next / n_prev));
    traj.push_back({n_next, z + d});
  }
}

// Analytic power-law points for the first epoch, where the closed form is
// the exact ODE solution through the anchor.
void emit_first_epoch(double a, double exponent, double d, double h, double end,
                      Trajectory& traj) {
  const auto steps = static_cast<std::int64_t>(std::ceil(end / h - 1e-12));
  for (std::int64_t s = 1; s <= steps; ++s) {
    const double n = s == steps ? end : static_cast<double>(s) * h;
    traj.push_back({n, a * std::pow(n, exponent) + d});
  }
}

void check_run(std::int64_t pool_size, std::int64_t total_samples, const SimConfig& cfg) {
  SimConfig::validated(cfg.step_fraction, cfg.noise_sigma, cfg.seed);
  if (pool_size < 1) throw std::invalid_argument("integrate: pool_size must be >= 1");
  if (static_cast<double>(total_samples) < cfg.step_fraction * static_cast<double>(pool_size))
    throw std::invalid_argument("integrate: total_samples shorter than one integration step");
}

}  // namespace

Trajectory integrate_single(const UtilityParams& params, std::int64_t pool_size,
                            std::int64_t total_samples, const SimConfig& cfg) {
  check_run(pool_size, total_samples, cfg);
  const auto schedule = EpochSchedule::validated(pool_size, total_samples);
  const double h = cfg.step_fraction * static_cast<double>(pool_size);
  const double delta = delta_from_tau(params.tau);

  Trajectory traj;
  emit_first_epoch(params.a, params.b, params.d, h, schedule.samples_at_end(1), traj);
  if (total_samples <= pool_size) return traj;

  // Anchor at the end of epoch 1 and integrate the remaining epochs.
  double z = params.a * std::pow(static_cast<double>(pool_size), params.b);
  double decayed = delta;
  for (std::int64_t j = 2; j <= schedule.epoch_count(); ++j) {
    integrate_segment(schedule.boundary(j - 1), schedule.samples_at_end(j), h,
                      params.b * decayed, params.d, z, traj);
    decayed *= delta;
  }
  return traj;
}

Trajectory integrate_mixture(const MixtureSpec& mix, double a, double d,
                             std::int64_t total_samples, const SimConfig& cfg) {
  check_run(mix.combined_size(), total_samples, cfg);
  if (!(a > 0.0)) throw std::invalid_argument("integrate_mixture: a must be > 0");
  if (!(d >= 0.0)) throw std::invalid_argument("integrate_mixture: d must be >= 0");
  const auto schedule = EpochSchedule::validated(mix.combined_size(), total_samples);
  const double h = cfg.step_fraction * static_cast<double>(mix.combined_size());
  const std::size_t n_pools = mix.pool_count();

  Trajectory traj;
  emit_first_epoch(a, effective_utility(mix, 1), d, h, schedule.samples_at_end(1), traj);
  if (total_samples <= mix.combined_size()) return traj;

  double z = a * std::pow(static_cast<double>(mix.combined_size()), effective_utility(mix, 1));
  std::vector<double> decayed(n_pools, 1.0);
  for (std::int64_t j = 2; j <= schedule.epoch_count(); ++j) {
    for (std::size_t i = 0; i < n_pools; ++i) decayed[i] *= mix.delta_hat(i);

    const double seg_start = schedule.boundary(j - 1);
    const double seg_end = schedule.samples_at_end(j);
    const auto steps = static_cast<std::int64_t>(std::ceil((seg_end - seg_start) / h - 1e-12));

    // Proportional round-robin: each step takes its exponent from the pool
    // furthest behind its size share.
    std::vector<double> taken(n_pools, 0.0);
    for (std::int64_t s = 1; s <= steps; ++s) {
      std::size_t pick = 0;
      double most_behind = -1.0;
      for (std::size_t i = 0; i < n_pools; ++i) {
        const double deficit = mix.weight(i) * static_cast<double>(s) - taken[i];
        if (deficit > most_behind + 1e-15) {
          most_behind = deficit;
          pick = i;
        }
      }
      taken[pick] += 1.0;

      const double n_prev = s == 1 ? seg_start : seg_start + static_cast<double>(s - 1) * h;
      const double n_next = s == steps ? seg_end : seg_start + static_cast<double>(s) * h;
      const double exponent = mix.pools()[pick].params.b * decayed[pick];
      z *= rk2_factor(exponent, std::log(n_next / n_prev));
      traj.push_back({n_next, z + d});
    }
  }
  return traj;
}

namespace {

// Box-Muller over raw mt19937_64 words; avoids std::normal_distribution so
// fixed seeds give identical streams on every standard library.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double next() {
    const double u1 = (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;          // [0,1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace

PoolObservations generate_observations(const UtilityParams& params, std::int64_t pool_size,
                                       const std::vector<std::int64_t>& budgets,
                                       const SimConfig& cfg, const std::string& pool_id) {
  SimConfig::validated(cfg.step_fraction, cfg.noise_sigma, cfg.seed);
  if (budgets.empty()) throw std::invalid_argument("generate_observations: empty budget list");
  for (std::size_t i = 1; i < budgets.size(); ++i)
    if (budgets[i] <= budgets[i - 1])
      throw std::invalid_argument("generate_observations: budgets must be strictly increasing");

  GaussianSource gauss(cfg.seed);
  std::vector<ObsPoint> points;
  points.reserve(budgets.size());
  for (std::int64_t budget : budgets) {
    double error = eval_loss(params, EpochSchedule::validated(pool_size, budget));
    if (cfg.noise_sigma > 0.0) error += cfg.noise_sigma * gauss.next();
    error = std::clamp(error, 0.0, 1.0);
    points.push_back({budget, error});
  }
  return PoolObservations::validated(pool_id, pool_size, std::move(points));
}

}  // namespace qqt::sim
