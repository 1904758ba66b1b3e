#include "qqt/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace qqt {

double rescale_tau(double tau, std::int64_t own_size, std::int64_t combined_size) {
  if (!(tau > 0.0)) throw std::domain_error("rescale_tau: tau must be > 0");
  if (own_size < 1) throw std::domain_error("rescale_tau: own_size must be >= 1");
  if (combined_size < own_size)
    throw std::domain_error("rescale_tau: combined_size must be >= own_size");
  return static_cast<double>(combined_size) / static_cast<double>(own_size) * tau;
}

MixtureSpec MixtureSpec::make(std::vector<MixturePool> pools, double rescale_exponent) {
  if (pools.empty()) throw std::invalid_argument("MixtureSpec: at least one pool required");
  std::set<std::string> ids;
  std::int64_t combined = 0;
  for (const auto& p : pools) {
    if (p.size < 1) throw std::invalid_argument("MixtureSpec: pool sizes must be >= 1");
    if (!ids.insert(p.id).second)
      throw std::invalid_argument("MixtureSpec: duplicate pool id '" + p.id + "'");
    UtilityParams::validated(p.params.a, p.params.b, p.params.d, p.params.tau);
    combined += p.size;
  }

  MixtureSpec mix;
  mix.pools_ = std::move(pools);
  mix.combined_size_ = combined;
  const double n_hat = static_cast<double>(combined);
  for (const auto& p : mix.pools_) {
    const double stretch = std::pow(n_hat / static_cast<double>(p.size), rescale_exponent);
    const double tau_hat = stretch * p.params.tau;
    mix.tau_hat_.push_back(tau_hat);
    mix.delta_hat_.push_back(delta_from_tau(tau_hat));
    mix.weight_.push_back(static_cast<double>(p.size) / n_hat);
  }
  mix.eval_order_.resize(mix.pools_.size());
  for (std::size_t i = 0; i < mix.eval_order_.size(); ++i) mix.eval_order_[i] = i;
  std::sort(mix.eval_order_.begin(), mix.eval_order_.end(),
            [&](std::size_t l, std::size_t r) { return mix.pools_[l].id < mix.pools_[r].id; });
  return mix;
}

namespace {

// Running per-pool decay powers delta_hat_i^(epoch-1), advanced one epoch at
// a time so repeated-multiplication rounding matches eval_loss exactly.
struct DecayLadder {
  explicit DecayLadder(const MixtureSpec& mix) : mix_(mix), powers_(mix.pool_count(), 1.0) {}

  void advance() {
    for (std::size_t i = 0; i < powers_.size(); ++i) powers_[i] *= mix_.delta_hat(i);
  }

  // Size-weighted mean of decayed exponents at the current epoch.
  double b_eff() const {
    double sum = 0.0;
    for (std::size_t i : mix_.eval_order())
      sum += mix_.weight(i) * (mix_.pools()[i].params.b * powers_[i]);
    return sum;
  }

  double power(std::size_t i) const { return powers_[i]; }

  const MixtureSpec& mix_;
  std::vector<double> powers_;
};

}  // namespace

double effective_utility(const MixtureSpec& mix, std::int64_t epoch) {
  if (epoch < 1) throw std::domain_error("effective_utility: epoch must be >= 1");
  DecayLadder ladder(mix);
  for (std::int64_t e = 1; e < epoch; ++e) ladder.advance();
  return ladder.b_eff();
}

double eval_mixture_loss(const MixtureSpec& mix, double a, double d, std::int64_t total_samples) {
  if (!(a > 0.0)) throw std::domain_error("eval_mixture_loss: a must be > 0");
  if (!(d >= 0.0)) throw std::domain_error("eval_mixture_loss: d must be >= 0");
  const EpochSchedule schedule = EpochSchedule::validated(mix.combined_size(), total_samples);
  const std::int64_t epochs = schedule.epoch_count();

  DecayLadder ladder(mix);
  double log_growth = ladder.b_eff() * std::log(schedule.samples_at_end(1));
  for (std::int64_t j = 2; j <= epochs; ++j) {
    ladder.advance();
    const double ratio = schedule.samples_at_end(j) / schedule.boundary(j - 1);
    log_growth += ladder.b_eff() * std::log(ratio);
  }
  return a * std::exp(log_growth) + d;
}

double weighted_a(const MixtureSpec& mix) {
  double sum = 0.0;
  for (std::size_t i : mix.eval_order()) sum += mix.weight(i) * mix.pools()[i].params.a;
  return sum;
}

double weighted_d(const MixtureSpec& mix) {
  double sum = 0.0;
  for (std::size_t i : mix.eval_order()) sum += mix.weight(i) * mix.pools()[i].params.d;
  return sum;
}

EffectiveDataState EffectiveDataState::validated(double eta, double gamma, double delta,
                                                 std::int64_t epoch) {
  if (!(eta > 0.0)) throw std::domain_error("EffectiveDataState: eta must be > 0");
  if (!(gamma >= 0.0) || gamma > eta)
    throw std::domain_error("EffectiveDataState: gamma must lie in [0, eta]");
  if (!(delta > 0.0) || !(delta < 1.0))
    throw std::domain_error("EffectiveDataState: delta must lie in (0,1)");
  if (epoch < 1) throw std::domain_error("EffectiveDataState: epoch must be >= 1");
  return EffectiveDataState{eta, gamma, delta, epoch};
}

double n_effective(const EffectiveDataState& state) {
  EffectiveDataState::validated(state.eta, state.gamma, state.delta, state.epoch);
  double sum = 0.0;
  double power = 1.0;
  for (std::int64_t j = 1; j < state.epoch; ++j) {
    sum += state.eta * power;
    power *= state.delta;
  }
  return sum + state.gamma * power;
}

double b_eff_effective_data(double b1, double delta1, double b2, double delta2) {
  if (!(delta1 > 0.0 && delta1 < 1.0) || !(delta2 > 0.0 && delta2 < 1.0))
    throw std::domain_error("b_eff_effective_data: decay factors must lie in (0,1)");
  return (delta1 * b1 + delta2 * b2) / (delta1 + delta2);
}

double eval_loss_f3(const MixtureSpec& mix, double a, double d, std::int64_t total_samples) {
  if (!(a > 0.0)) throw std::domain_error("eval_loss_f3: a must be > 0");
  if (!(d >= 0.0)) throw std::domain_error("eval_loss_f3: d must be >= 0");
  const EpochSchedule schedule = EpochSchedule::validated(mix.combined_size(), total_samples);
  const std::int64_t epochs = schedule.epoch_count();
  const auto& order = mix.eval_order();

  // Per-pool effective data, compounded in log space: pool i's share starts
  // at N_i and grows by (n_j/n_{j-1})^(delta_hat_i^(j-1)) each epoch.
  std::vector<double> log_content(mix.pool_count());
  for (std::size_t i = 0; i < mix.pool_count(); ++i)
    log_content[i] = std::log(static_cast<double>(mix.pools()[i].size));

  auto total_effective = [&] {
    double sum = 0.0;
    for (std::size_t i : order) sum += std::exp(log_content[i]);
    return sum;
  };

  DecayLadder ladder(mix);
  // First epoch: all data fresh, exponent is the plain weighted mean.
  double log_growth = ladder.b_eff() * std::log(schedule.samples_at_end(1));
  double prev_effective = total_effective();
  for (std::int64_t j = 2; j <= epochs; ++j) {
    ladder.advance();
    const double log_ratio = std::log(schedule.samples_at_end(j) / schedule.boundary(j - 1));
    // Decay-weighted mean utility: sum_i w_i*delta_i^(j-1)*b_i / sum_i w_i*delta_i^(j-1).
    double num = 0.0, den = 0.0;
    for (std::size_t i : order) {
      const double w = mix.weight(i) * ladder.power(i);
      num += w * mix.pools()[i].params.b;
      den += w;
    }
    for (std::size_t i : order) log_content[i] += ladder.power(i) * log_ratio;
    const double next_effective = total_effective();
    log_growth += (num / den) * std::log(next_effective / prev_effective);
    prev_effective = next_effective;
  }
  return a * std::exp(log_growth) + d;
}

ContrastiveConfig ContrastiveConfig::validated(std::int64_t batch_size, std::int64_t pool_size) {
  if (batch_size < 1) throw std::domain_error("ContrastiveConfig: batch_size must be >= 1");
  if (pool_size < batch_size)
    throw std::domain_error("ContrastiveConfig: pool_size must be >= batch_size");
  return ContrastiveConfig{batch_size, pool_size};
}

std::int64_t comparisons_per_epoch(const ContrastiveConfig& cfg) {
  return cfg.pool_size * cfg.batch_size;
}

double gold_decay_rate(double tau, const ContrastiveConfig& cfg) {
  if (!(tau > 0.0)) throw std::domain_error("gold_decay_rate: tau must be > 0");
  const double epochs_per_sweep =
      static_cast<double>(cfg.pool_size) / static_cast<double>(cfg.batch_size);
  return std::pow(0.5, epochs_per_sweep / tau);
}

}  // namespace qqt
