#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "contagion/rng.hpp"

namespace contagion {

/// Law of a nonnegative mark (claim size or external intensity jump).
/// Bounded-support families only, unless built through the unsafe-moments
/// path: every exponential moment then exists and the admissibility
/// conditions hold by construction.
class MarkDistribution {
 public:
  enum class Family { Uniform, TruncatedExponential, PointMass };

  static MarkDistribution uniform(double a, double b);
  /// Exponential(rate) conditioned on [0, cap]. cap = +inf needs the explicit
  /// allow_unbounded opt-in (the unsafe-moments path): exponential moments
  /// then exist only below the rate, and quadrature truncates the far tail.
  static MarkDistribution truncated_exponential(double rate, double cap,
                                                bool allow_unbounded = false);
  static MarkDistribution point_mass(double z0);

  Family family() const { return family_; }
  std::string describe() const;

  double mean() const { return mean_; }
  double second_moment() const { return second_moment_; }
  /// E[exp(a Z)] for any real a (closed form per family).
  double mgf(double a) const;
  double cdf(double z) const;
  double support_max() const { return support_max_; }
  bool bounded_support() const {
    return support_max_ < std::numeric_limits<double>::infinity();
  }
  /// Upper end of the quadrature window: support_max for bounded families,
  /// the far-tail cutoff otherwise.
  double effective_support_max() const {
    return family_ == Family::PointMass ? support_max_ : quad_hi_;
  }

  double sample(Rng& rng) const;

  /// Integral of g against the law over the whole support (cached 64-node
  /// rule; exact for point masses).
  double integrate(const std::function<double(double)>& g) const;
  /// Integral of g over [a, b] intersected with the support, with fresh
  /// Gauss-Legendre nodes on the clipped interval so kink splits stay exact.
  double integrate_between(const std::function<double(double)>& g, double a,
                           double b) const;

 private:
  MarkDistribution() = default;

  double density(double z) const;

  Family family_ = Family::PointMass;
  double p1_ = 0.0, p2_ = 0.0;  // family parameters
  double mean_ = 0.0;
  double second_moment_ = 0.0;
  double support_max_ = 0.0;
  double quad_lo_ = 0.0, quad_hi_ = 0.0;  // quadrature window
  std::vector<double> nodes_;             // cached, density-weighted
  std::vector<double> weights_;
};

}  // namespace contagion
