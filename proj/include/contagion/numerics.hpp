#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace contagion {

struct QuadratureRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;  // sum to 2
};

/// Gauss-Legendre nodes/weights by Newton iteration on P_n. Cached per order.
const QuadratureRule& gauss_legendre(int n);

/// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int n);

/// Deterministic sum independent of accumulation threading: values are summed
/// pairwise over the index range, so the result depends only on the contents.
double pairwise_sum(std::span<const double> values);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
};

/// Sample mean and standard error (sd / sqrt(n)) via pairwise accumulation.
MeanStderr mean_stderr(std::span<const double> values);

/// (1 - exp(-x)) / x, stable near 0.
inline double expm1_over(double x) {
  if (std::abs(x) < 1e-8) return 1.0 - 0.5 * x + x * x / 6.0;
  return -std::expm1(-x) / x;
}

/// Integral of exp(theta * s) over [a, b].
inline double int_exp(double theta, double a, double b) {
  if (std::abs(theta) < 1e-14) return b - a;
  return (std::exp(theta * b) - std::exp(theta * a)) / theta;
}

/// Bisection for a continuous f with f(lo) and f(hi) of opposite (weak) sign.
/// Returns the midpoint once |hi - lo| <= xtol. Throws NumericError when the
/// bracket is invalid.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double xtol);

/// Linear interpolation on an ascending grid; clamps outside the range.
double interp_linear(std::span<const double> xs, std::span<const double> ys,
                     double x);

/// Index i such that xs[i] <= x < xs[i+1], clamped to [0, n-2].
std::size_t bracket_index(std::span<const double> xs, double x);

/// Uniformly spaced grid with both endpoints included (n >= 2).
std::vector<double> linspace(double a, double b, std::size_t n);

}  // namespace contagion
