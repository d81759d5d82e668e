#pragma once

#include <span>
#include <vector>

namespace contagion {

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
  std::size_t n = 0;
};

/// One-sample Kolmogorov-Smirnov test against the unit exponential law,
/// asymptotic p-value from the Kolmogorov distribution.
KsResult ks_test_exponential(std::span<const double> sample);

struct Chi2Result {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 0;
};

/// Pearson chi-square of observed counts against a Poisson(mean) law. Counts
/// greater or equal to observed.size()-1 are pooled into the last cell; cells
/// with expected count below 5 are merged from the right.
Chi2Result chi2_poisson_test(std::span<const std::size_t> counts, double mean);

/// Regularized upper incomplete gamma Q(a, x); used for chi-square p-values.
double gamma_q(double a, double x);

}  // namespace contagion
