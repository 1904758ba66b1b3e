#ifndef QQT_MIXTURE_HPP
#define QQT_MIXTURE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "qqt/scaling.hpp"

namespace qqt {

// Half-life of one pool inside a combined pool: (combined/own) * tau.
// Contrastive training sees N*B comparisons per epoch, so growing the pool
// stretches the decay horizon proportionally. Throws if combined < own.
double rescale_tau(double tau, std::int64_t own_size, std::int64_t combined_size);

struct MixturePool {
  std::string id;
  UtilityParams params;
  std::int64_t size;  // samples
};

/// Pools jointly trained on by uniform-at-random sampling. One mixture epoch
/// is one pass over the combined size; every constituent repeats once per
/// mixture epoch with its half-life stretched to tau_hat = (N_hat/N)*tau.
class MixtureSpec {
 public:
  // rescale_exponent generalizes the stretch to (N_hat/N)^k; k = 1 is the
  // contrastive-comparison value, k = 0 disables rescaling.
  static MixtureSpec make(std::vector<MixturePool> pools, double rescale_exponent = 1.0);

  const std::vector<MixturePool>& pools() const { return pools_; }
  std::size_t pool_count() const { return pools_.size(); }
  std::int64_t combined_size() const { return combined_size_; }
  double tau_hat(std::size_t i) const { return tau_hat_[i]; }
  double delta_hat(std::size_t i) const { return delta_hat_[i]; }
  // Size share N_i / N_hat.
  double weight(std::size_t i) const { return weight_[i]; }
  // Pool indices sorted by id; all summations iterate in this order so any
  // permutation of the input pools produces bit-identical results.
  const std::vector<std::size_t>& eval_order() const { return eval_order_; }

 private:
  MixtureSpec() = default;
  std::vector<MixturePool> pools_;
  std::int64_t combined_size_ = 0;
  std::vector<double> tau_hat_, delta_hat_, weight_;
  std::vector<std::size_t> eval_order_;
};

// Effective utility exponent of the mixture at a 1-based epoch: the
// size-weighted mean of the constituents' decayed exponents,
//   sum_i (N_i/N_hat) * b_i * delta_hat_i^(epoch-1).
double effective_utility(const MixtureSpec& mix, std::int64_t epoch);

// Closed-form mixture loss: the single-pool law evaluated over the combined
// size with the per-epoch effective exponent. Reduces bit-exactly to
// eval_loss for a one-pool mixture.
double eval_mixture_loss(const MixtureSpec& mix, double a, double d, std::int64_t total_samples);

// Size-weighted means of the constituents' own normalizers / floors, used
// when a caller needs one (a, d) pair for a whole mixture.
double weighted_a(const MixtureSpec& mix);
double weighted_d(const MixtureSpec& mix);

/// State of the rival bookkeeping where the data, not its utility, decays:
/// each repetition of the eta unique samples counts delta^(epoch-1) as much.
struct EffectiveDataState {
  double eta;     // unique samples per epoch
  double gamma;   // samples seen in the current epoch, <= eta
  double delta;   // per-epoch decay of effective data, in (0,1)
  std::int64_t epoch;  // k >= 1

  static EffectiveDataState validated(double eta, double gamma, double delta,
                                      std::int64_t epoch);
};

// n_eff = eta*(1 + delta + ... + delta^(k-2)) + gamma*delta^(k-1);
// equals gamma during the first epoch.
double n_effective(const EffectiveDataState& state);

// Two-bucket effective utility under data decay: the decay-weighted mean
// (d1*b1 + d2*b2) / (d1 + d2).
double b_eff_effective_data(double b1, double delta1, double b2, double delta2);

// Mixture loss under the combined formulation: both the effective data and
// the utility decay. Effective data compounds in log space (the log-sample
// increment of epoch k is discounted by delta_hat^(k-1)), which makes the
// formulation coincide with eval_mixture_loss whenever all pools share one
// decay factor; pools with unequal decay factors diverge between the two.
double eval_loss_f3(const MixtureSpec& mix, double a, double d, std::int64_t total_samples);

/// Contrastive-batch geometry behind the tau rescaling: a pool of N samples
/// trained at batch size B contributes N*B denominator comparisons per epoch.
struct ContrastiveConfig {
  std::int64_t batch_size;  // B >= 1
  std::int64_t pool_size;   // N >= B

  static ContrastiveConfig validated(std::int64_t batch_size, std::int64_t pool_size);
};

std::int64_t comparisons_per_epoch(const ContrastiveConfig& cfg);

// Decay per full pass over the N^2 comparison space: delta^(N/B), i.e.
// (1/2)^(N/(B*tau)). Invariant under merging, which is what forces
// tau_hat = (N_hat/N)*tau.
double gold_decay_rate(double tau, const ContrastiveConfig& cfg);

}  // namespace qqt

#endif
