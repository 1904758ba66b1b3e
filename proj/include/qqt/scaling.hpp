#ifndef QQT_SCALING_HPP
#define QQT_SCALING_HPP

#include <cstdint>

namespace qqt {

/// Scaling constants of a single data pool. Loss after n samples of a pool
/// seen once is a*n^b + d; under repetition the exponent decays per epoch
/// with half-life tau.
struct UtilityParams {
  double a;    // normalizer, > 0, shared across pools of one fit
  double b;    // utility exponent, < 0; larger magnitude = more useful data
  double d;    // irreducible error floor, >= 0
  double tau;  // repetition half-life in epochs, > 0

  // Validates ranges and returns the params; throws std::domain_error.
  static UtilityParams validated(double a, double b, double d, double tau);

  // Per-epoch multiplicative decay of b: (1/2)^(1/tau), in (0,1).
  double decay() const;
};

// delta = (1/2)^(1/tau). Throws std::domain_error for tau <= 0.
double delta_from_tau(double tau);

// Utility exponent at the given 1-based epoch: b * delta^(epoch-1).
// Epoch 1 is the first pass over the data (no decay yet).
double utility_at_epoch(double b, double tau, std::int64_t epoch);

// dy/dn of the classical power law: (y/n)*b. Throws for n <= 0.
double instantaneous_utility(double y, double n, double b);

/// Position within a repeated-epoch training run over a pool of N samples.
/// Epoch boundaries sit at n_j = j*N; the run ends mid-epoch when
/// total_samples is not a multiple of N.
struct EpochSchedule {
  std::int64_t pool_size;      // N, samples per epoch
  std::int64_t total_samples;  // samples seen overall, may exceed N

  static EpochSchedule validated(std::int64_t pool_size, std::int64_t total_samples);

  // k = ceil(total_samples / pool_size); total_samples lies in (n_{k-1}, n_k].
  std::int64_t epoch_count() const;
  // n_j = j * pool_size.
  double boundary(std::int64_t epoch) const;
  // Samples actually seen by the end of the given epoch: min(n_j, total).
  double samples_at_end(std::int64_t epoch) const;
};

// Closed-form loss after running the schedule:
//   a * m_1^{b_1} * prod_{j=2..k} (m_j / n_{j-1})^{b_j} + d
// with b_j = utility_at_epoch(b, tau, j) and m_j = min(n_j, total_samples);
// a partial final epoch applies the current epoch's decayed exponent to the
// partial ratio. Accumulated in log space so 50-epoch runs on 1e8-sample
// pools do not underflow.
double eval_loss(const UtilityParams& params, const EpochSchedule& schedule);

}  // namespace qqt

#endif
