#include "qqt/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

namespace qqt {

PoolObservations PoolObservations::validated(std::string pool_id, std::int64_t pool_size,
                                             std::vector<ObsPoint> points) {
  if (pool_size < 1) throw std::invalid_argument("PoolObservations: pool_size must be >= 1");
  if (points.empty()) throw std::invalid_argument("PoolObservations: points must be non-empty");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].samples_seen < 1)
      throw std::invalid_argument("PoolObservations: samples_seen must be >= 1");
    if (i > 0 && points[i].samples_seen <= points[i - 1].samples_seen)
      throw std::invalid_argument("PoolObservations: samples_seen must be strictly increasing");
    if (!(points[i].error >= 0.0 && points[i].error <= 1.0))
      throw std::invalid_argument("PoolObservations: error values must lie in [0,1]");
  }
  return PoolObservations{std::move(pool_id), pool_size, std::move(points)};
}

ParamGrid ParamGrid::standard() { return with_resolution(100, 100, 1, 50); }

ParamGrid ParamGrid::with_resolution(int a_steps, int b_steps, int tau_min, int tau_max) {
  ParamGrid grid;
  for (int i = 0; i < a_steps; ++i) {
    const double t = a_steps > 1 ? static_cast<double>(i) / (a_steps - 1) : 0.0;
    grid.a_values.push_back(0.001 + t * (1.0 - 0.001));
  }
  for (int i = 0; i < b_steps; ++i) {
    const double t = b_steps > 1 ? static_cast<double>(i) / (b_steps - 1) : 0.0;
    grid.b_values.push_back(-(0.005 * std::pow(0.5 / 0.005, t)));
  }
  std::sort(grid.b_values.begin(), grid.b_values.end());
  for (int t = tau_min; t <= tau_max; ++t) grid.tau_values.push_back(static_cast<double>(t));
  grid.d_values = {0.01, 0.02, 0.05, 0.10, 0.2};
  return grid;
}

bool ParamGrid::empty() const {
  return a_values.empty() || b_values.empty() || tau_values.empty() || d_values.empty();
}

std::string ParamGrid::version() const {
  std::ostringstream out;
  out << "a:lin:" << a_values.size() << ":0.001:1"
      << ";b:geo:" << b_values.size() << ":-0.5:-0.005"
      << ";tau:int:" << static_cast<long long>(tau_values.front()) << ":"
      << static_cast<long long>(tau_values.back()) << ";d:fixed5";
  return out.str();
}

ParamGrid ParamGrid::from_version(const std::string& version) {
  int a_steps = 0, b_steps = 0, tau_min = 0, tau_max = 0;
  if (std::sscanf(version.c_str(), "a:lin:%d:0.001:1;b:geo:%d:-0.5:-0.005;tau:int:%d:%d;d:fixed5",
                  &a_steps, &b_steps, &tau_min, &tau_max) != 4)
    throw std::invalid_argument("ParamGrid: unrecognized grid version '" + version + "'");
  ParamGrid grid = with_resolution(a_steps, b_steps, tau_min, tau_max);
  if (grid.empty() || grid.version() != version)
    throw std::invalid_argument("ParamGrid: inconsistent grid version '" + version + "'");
  return grid;
}

namespace {

double snap_to(const std::vector<double>& values, double x, const char* what) {
  if (values.empty()) throw std::invalid_argument(std::string("ParamGrid: empty ") + what);
  double best = values.front();
  for (double v : values)
    if (std::fabs(v - x) < std::fabs(best - x)) best = v;
  return best;
}

}  // namespace

double ParamGrid::snap_a(double a) const { return snap_to(a_values, a, "a grid"); }
double ParamGrid::snap_b(double b) const { return snap_to(b_values, b, "b grid"); }
double ParamGrid::snap_tau(double tau) const { return snap_to(tau_values, tau, "tau grid"); }
double ParamGrid::snap_d(double d) const { return snap_to(d_values, d, "d grid"); }

double l2_fit_loss(const UtilityParams& params, const PoolObservations& obs) {
  double loss = 0.0;
  for (const auto& point : obs.points) {
    const auto schedule = EpochSchedule::validated(obs.pool_size, point.samples_seen);
    const double residual = eval_loss(params, schedule) - point.error;
    loss += residual * residual;
  }
  return loss;
}

namespace {

// Per-pool tables that make the inner grid loop O(1) per candidate.
//
// The prediction factors as a*exp(b*G(tau, point)) + d with
// G = log m_1 + sum_j delta^(j-1) log(m_j/n_{j-1}), so for each (b, tau) we
// reduce the points to three sums and evaluate the squared loss of any
// (a, d) from them:
//   loss = a^2*S_ee + 2a*(d*S_e - S_ey) + (n*d^2 - 2d*S_y + S_yy)
struct PoolTables {
  std::size_t n_points = 0;
  double sum_y = 0.0, sum_yy = 0.0;
  std::vector<double> sum_ee, sum_e, sum_ey;  // indexed [b_idx * n_tau + tau_idx]
  std::size_t n_tau = 0;

  PoolTables(const PoolObservations& obs, const ParamGrid& grid) {
    n_points = obs.points.size();
    n_tau = grid.tau_values.size();
    for (const auto& p : obs.points) {
      sum_y += p.error;
      sum_yy += p.error * p.error;
    }

    std::vector<double> growth(n_tau * n_points);
    for (std::size_t t = 0; t < n_tau; ++t) {
      const double delta = delta_from_tau(grid.tau_values[t]);
      for (std::size_t p = 0; p < n_points; ++p) {
        const auto schedule =
            EpochSchedule::validated(obs.pool_size, obs.points[p].samples_seen);
        const std::int64_t epochs = schedule.epoch_count();
        double g = std::log(schedule.samples_at_end(1));
        double decayed = delta;
        for (std::int64_t j = 2; j <= epochs; ++j) {
          g += decayed * std::log(schedule.samples_at_end(j) / schedule.boundary(j - 1));
          decayed *= delta;
        }
        growth[t * n_points + p] = g;
      }
    }

    const std::size_t n_b = grid.b_values.size();
    sum_ee.assign(n_b * n_tau, 0.0);
    sum_e.assign(n_b * n_tau, 0.0);
    sum_ey.assign(n_b * n_tau, 0.0);
    for (std::size_t bi = 0; bi < n_b; ++bi) {
      const double b = grid.b_values[bi];
      for (std::size_t t = 0; t < n_tau; ++t) {
        double ee = 0.0, e = 0.0, ey = 0.0;
        for (std::size_t p = 0; p < n_points; ++p) {
          const double pred = std::exp(b * growth[t * n_points + p]);
          ee += pred * pred;
          e += pred;
          ey += pred * obs.points[p].error;
        }
        const std::size_t idx = bi * n_tau + t;
        sum_ee[idx] = ee;
        sum_e[idx] = e;
        sum_ey[idx] = ey;
      }
    }
  }

  double loss_at(std::size_t b_idx, std::size_t tau_idx, double a, double d) const {
    const std::size_t idx = b_idx * n_tau + tau_idx;
    const double loss = a * a * sum_ee[idx] + 2.0 * a * (d * sum_e[idx] - sum_ey[idx]) +
                        (static_cast<double>(n_points) * d * d - 2.0 * d * sum_y + sum_yy);
    return loss > 0.0 ? loss : 0.0;
  }
};

struct BestCandidate {
  double loss = std::numeric_limits<double>::infinity();
  std::size_t b_idx = 0, tau_idx = 0, d_idx = 0;
};

// Minimum over (b, tau, d) at fixed a. Strictly-less comparison over loops
// in ascending index order implements the lexicographic tie-break.
BestCandidate best_at_a(const PoolTables& tables, const ParamGrid& grid, double a) {
  BestCandidate best;
  for (std::size_t bi = 0; bi < grid.b_values.size(); ++bi)
    for (std::size_t ti = 0; ti < grid.tau_values.size(); ++ti)
      for (std::size_t di = 0; di < grid.d_values.size(); ++di) {
        const double loss = tables.loss_at(bi, ti, a, grid.d_values[di]);
        if (loss < best.loss) best = BestCandidate{loss, bi, ti, di};
      }
  return best;
}

// Minimum over (b, d) at fixed (a, tau).
BestCandidate best_at_a_tau(const PoolTables& tables, const ParamGrid& grid, double a,
                            std::size_t tau_idx) {
  BestCandidate best;
  best.tau_idx = tau_idx;
  for (std::size_t bi = 0; bi < grid.b_values.size(); ++bi)
    for (std::size_t di = 0; di < grid.d_values.size(); ++di) {
      const double loss = tables.loss_at(bi, tau_idx, a, grid.d_values[di]);
      if (loss < best.loss) best = BestCandidate{loss, bi, tau_idx, di};
    }
  return best;
}

PoolFit materialize(const BestCandidate& c, const PoolObservations& obs, double a,
                    const ParamGrid& grid) {
  PoolFit fit;
  fit.b = grid.b_values[c.b_idx];
  fit.tau = grid.tau_values[c.tau_idx];
  fit.d = grid.d_values[c.d_idx];
  fit.l2_loss = l2_fit_loss(UtilityParams::validated(a, fit.b, fit.d, fit.tau), obs);
  return fit;
}

void require_unique_ids(const std::vector<PoolObservations>& all_obs) {
  std::set<std::string> ids;
  for (const auto& obs : all_obs)
    if (!ids.insert(obs.pool_id).second)
      throw std::invalid_argument("fit: duplicate pool_id '" + obs.pool_id + "'");
}

}  // namespace

PoolFit fit_single_pool(const PoolObservations& obs, double a_fixed, const ParamGrid& grid) {
  if (grid.empty()) throw std::invalid_argument("fit_single_pool: empty grid");
  if (obs.points.empty()) throw std::invalid_argument("fit_single_pool: empty observations");
  const PoolTables tables(obs, grid);
  return materialize(best_at_a(tables, grid, a_fixed), obs, a_fixed, grid);
}

FitResult fit_joint(const std::vector<PoolObservations>& all_obs, const ParamGrid& grid) {
  if (grid.empty()) throw std::invalid_argument("fit_joint: empty grid");
  if (all_obs.empty()) throw std::invalid_argument("fit_joint: at least one pool required");
  require_unique_ids(all_obs);

  std::vector<PoolTables> tables;
  tables.reserve(all_obs.size());
  for (const auto& obs : all_obs) tables.emplace_back(obs, grid);

  double best_total = std::numeric_limits<double>::infinity();
  std::size_t best_a_idx = 0;
  std::vector<BestCandidate> best_pool_fits;
  for (std::size_t ai = 0; ai < grid.a_values.size(); ++ai) {
    std::vector<BestCandidate> fits;
    fits.reserve(tables.size());
    double total = 0.0;
    for (const auto& t : tables) {
      fits.push_back(best_at_a(t, grid, grid.a_values[ai]));
      total += fits.back().loss;
    }
    if (total < best_total) {
      best_total = total;
      best_a_idx = ai;
      best_pool_fits = std::move(fits);
    }
  }

  FitResult result;
  result.a = grid.a_values[best_a_idx];
  result.grid_version = grid.version();
  for (std::size_t i = 0; i < all_obs.size(); ++i) {
    const PoolFit fit = materialize(best_pool_fits[i], all_obs[i], result.a, grid);
    result.per_pool.emplace(all_obs[i].pool_id, fit);
    result.total_l2_loss += fit.l2_loss;
  }
  return result;
}

FitResult fit_joint_shared_tau(const std::vector<PoolObservations>& all_obs,
                               const ParamGrid& grid) {
  if (grid.empty()) throw std::invalid_argument("fit_joint_shared_tau: empty grid");
  if (all_obs.empty())
    throw std::invalid_argument("fit_joint_shared_tau: at least one pool required");
  require_unique_ids(all_obs);

  std::vector<PoolTables> tables;
  tables.reserve(all_obs.size());
  for (const auto& obs : all_obs) tables.emplace_back(obs, grid);

  double best_total = std::numeric_limits<double>::infinity();
  std::size_t best_a_idx = 0;
  std::vector<BestCandidate> best_pool_fits;
  for (std::size_t ai = 0; ai < grid.a_values.size(); ++ai)
    for (std::size_t ti = 0; ti < grid.tau_values.size(); ++ti) {
      std::vector<BestCandidate> fits;
      fits.reserve(tables.size());
      double total = 0.0;
      for (const auto& t : tables) {
        fits.push_back(best_at_a_tau(t, grid, grid.a_values[ai], ti));
        total += fits.back().loss;
      }
      if (total < best_total) {
        best_total = total;
        best_a_idx = ai;
        best_pool_fits = std::move(fits);
      }
    }

  FitResult result;
  result.a = grid.a_values[best_a_idx];
  result.grid_version = grid.version();
  for (std::size_t i = 0; i < all_obs.size(); ++i) {
    const PoolFit fit = materialize(best_pool_fits[i], all_obs[i], result.a, grid);
    result.per_pool.emplace(all_obs[i].pool_id, fit);
    result.total_l2_loss += fit.l2_loss;
  }
  return result;
}

std::vector<std::pair<double, double>> sweep_k_exponent(const PoolObservations& merged_obs,
                                                        const MixtureSpec& constituents,
                                                        std::vector<double> k_grid) {
  if (k_grid.empty()) throw std::invalid_argument("sweep_k_exponent: empty k grid");
  std::sort(k_grid.begin(), k_grid.end());
  const double a = weighted_a(constituents);
  const double d = weighted_d(constituents);

  std::vector<std::pair<double, double>> losses;
  losses.reserve(k_grid.size());
  for (double k : k_grid) {
    const MixtureSpec rescaled = MixtureSpec::make(constituents.pools(), k);
    double loss = 0.0;
    for (const auto& point : merged_obs.points) {
      const double residual = eval_mixture_loss(rescaled, a, d, point.samples_seen) - point.error;
      loss += residual * residual;
    }
    losses.emplace_back(k, loss);
  }
  return losses;
}

}  // namespace qqt
