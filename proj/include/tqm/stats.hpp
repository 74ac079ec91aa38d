#pragma once

#include <cstdint>
#include <span>

namespace tqm::stats {

inline constexpr double kDefaultAlpha = 1e-3;

struct GofReport {
  double statistic = 0.0;
  int degrees_of_freedom = 1;
  double p_value = 1.0;
  double alpha = kDefaultAlpha;
  bool pass = true;  // p_value >= alpha
};

// Upper regularized incomplete gamma Q(a, x) = Gamma(a, x) / Gamma(a).
// Series expansion for x < a + 1, Lentz continued fraction otherwise.
double regularized_gamma_q(double a, double x);

// Upper-tail survival probability of a chi-square variate.
double chi_square_tail(double statistic, int degrees_of_freedom);

// Pearson goodness-of-fit of observed counts against expected category
// probabilities. Bins with expected count below 5 are merged into their
// following neighbor before the statistic is formed; a trailing light bin
// folds backward into the last kept one. An observation in a bin with zero
// expected probability is an impossible event and fails outright.
GofReport chi_square(std::span<const std::uint64_t> observed,
                     std::span<const double> expected_probabilities, std::uint64_t total,
                     double alpha = kDefaultAlpha);

// Two-sample homogeneity test against the pooled distribution.
GofReport chi_square_two_sample(std::span<const std::uint64_t> a,
                                std::span<const std::uint64_t> b, double alpha = kDefaultAlpha);

struct PowerLawFit {
  double exponent = 0.0;
  double std_error = 0.0;
};

// Least-squares slope in log-log space; needs >= 3 strictly positive points.
PowerLawFit power_law_fit(std::span<const double> xs, std::span<const double> ys);

// One-sigma width of an empirical frequency estimated from n trials.
double binomial_sigma(double p, std::uint64_t n);

}  // namespace tqm::stats
