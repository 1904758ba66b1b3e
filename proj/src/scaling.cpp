#include "qqt/scaling.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qqt {

UtilityParams UtilityParams::validated(double a, double b, double d, double tau) {
  if (!(a > 0.0)) throw std::domain_error("UtilityParams: normalizer a must be > 0");
  if (!(b < 0.0)) throw std::domain_error("UtilityParams: utility exponent b must be < 0");
  if (!(d >= 0.0)) throw std::domain_error("UtilityParams: irreducible error d must be >= 0");
  if (!(tau > 0.0)) throw std::domain_error("UtilityParams: half-life tau must be > 0");
  return UtilityParams{a, b, d, tau};
}

double UtilityParams::decay() const { return delta_from_tau(tau); }

double delta_from_tau(double tau) {
  if (!(tau > 0.0)) throw std::domain_error("delta_from_tau: tau must be > 0");
  return std::pow(0.5, 1.0 / tau);
}

double utility_at_epoch(double b, double tau, std::int64_t epoch) {
  if (epoch < 1) throw std::domain_error("utility_at_epoch: epoch must be >= 1");
  const double delta = delta_from_tau(tau);
  return b * std::pow(delta, static_cast<double>(epoch - 1));
}

double instantaneous_utility(double y, double n, double b) {
  if (!(n > 0.0)) throw std::domain_error("instantaneous_utility: n must be > 0");
  return y / n * b;
}

EpochSchedule EpochSchedule::validated(std::int64_t pool_size, std::int64_t total_samples) {
  if (pool_size < 1) throw std::domain_error("EpochSchedule: pool_size must be >= 1");
  if (total_samples < 1) throw std::domain_error("EpochSchedule: total_samples must be >= 1");
  return EpochSchedule{pool_size, total_samples};
}

std::int64_t EpochSchedule::epoch_count() const {
  return (total_samples + pool_size - 1) / pool_size;
}

double EpochSchedule::boundary(std::int64_t epoch) const {
  return static_cast<double>(epoch) * static_cast<double>(pool_size);
}

double EpochSchedule::samples_at_end(std::int64_t epoch) const {
  const double n_j = boundary(epoch);
  const double total = static_cast<double>(total_samples);
  return n_j < total ? n_j : total;
}

double eval_loss(const UtilityParams& params, const EpochSchedule& schedule) {
  const double delta = delta_from_tau(params.tau);
  const std::int64_t epochs = schedule.epoch_count();

  // log(y - d) = log a + sum_j b_j * log(m_j / n_{j-1}), with n_0 := 1 so the
  // first term is b_1 * log(m_1).
  double log_growth = params.b * std::log(schedule.samples_at_end(1));
  double decayed = delta;
  for (std::int64_t j = 2; j <= epochs; ++j) {
    const double ratio = schedule.samples_at_end(j) / schedule.boundary(j - 1);
    log_growth += params.b * decayed * std::log(ratio);
    decayed *= delta;
  }
  return params.a * std::exp(log_growth) + params.d;
}

}  // namespace qqt
