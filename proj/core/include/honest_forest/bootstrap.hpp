#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "honest_forest/splitters.hpp"

namespace honest_forest {

enum class WeightSchemeKind { Multinomial, WithoutReplacement, WildPoisson, WildLogNormal };

// Exchangeable bootstrap weight scheme. Multinomial and WithoutReplacement
// take their sample count m_n either as a fixed value or as a schedule
// evaluated at n. Wild weights are iid with unit mean: Poisson(1) or
// exp(sigma Z - sigma^2/2) for Z standard normal.
struct WeightScheme {
  WeightSchemeKind kind = WeightSchemeKind::Multinomial;
  std::optional<long> fixed_m;
  std::optional<Schedule> m_schedule;
  double lognormal_sigma = 0.5;  // WildLogNormal only

  // Resolves m_n for the resampling schemes; throws when neither or both
  // of fixed_m / m_schedule are set, or when the result is out of range.
  long resolve_m(std::size_t n) const;

  void validate(std::size_t n) const;
};

struct WeightVector {
  std::vector<double> w;

  double sum() const;
};

// Exact and estimated weight moments. l21_ratio is E[W1^2]/E[W1],
// correlation_ratio is E[W1 W2]/E[W1]^2 and adjusted_mixed is
// E[(W1/E[W1] - 1)(W2/E[W1] - 1)].
struct MomentReport {
  double mean_w1 = 0.0;
  double second_w1 = 0.0;
  double cross_w1w2 = 0.0;
  double l21_ratio = 0.0;
  double correlation_ratio = 0.0;
  double adjusted_mixed = 0.0;
  double central4 = 0.0;
  double central2 = 0.0;
};

// One exchangeable draw of n weights.
WeightVector draw_weights(const WeightScheme& scheme, std::size_t n, std::uint64_t seed);
WeightVector draw_weights(const WeightScheme& scheme, std::size_t n, Rng& rng);

// Closed-form moments.
MomentReport analytic_moments(const WeightScheme& scheme, std::size_t n);

// (kappa_{W1}(t) - 1) / E[W1]. WithoutReplacement gives e^t - 1 for every
// (m, n); Multinomial gives (((e^t + n - 1)/n)^m - 1)/(m/n). The wild
// lognormal moment generating function only exists for t <= 0 and is
// evaluated there by quadrature.
double kappa_ratio(const WeightScheme& scheme, std::size_t n, double t);

// Upper bound on the multinomial kappa_ratio, uniform over n:
//   t + (t^2/2) e^{|t| + e^{|t|} - 1} (1 + e^{|t|}).
double multinomial_kappa_limit_bound(double t);

struct EmpiricalMoments {
  MomentReport value;
  MomentReport std_err;  // Monte Carlo standard error per field
  std::size_t reps = 0;
};

// Monte Carlo moments over independent draws, averaging over index pairs
// via exchangeability. Adjusted and central moments plug in the analytic
// mean; standard errors for the ratio fields use the delta method.
EmpiricalMoments empirical_moments(const WeightScheme& scheme, std::size_t n, std::size_t reps,
                                   std::uint64_t seed);

}  // namespace honest_forest
