#pragma once

#include <limits>
#include <string>

#include "contagion/marks.hpp"

namespace contagion {

/// Retention function family Phi(z, u) with its control domain [u_M, u_N].
/// u_N may be the +inf sentinel (excess-of-loss family); computations then
/// substitute the finite cap u_cap, exact for bounded claims since
/// Phi(z, u) = z on the support once u >= support max.
class RetentionContract {
 public:
  enum class Kind { Proportional, ExcessOfLoss, LimitedXL };

  static RetentionContract proportional();
  static RetentionContract excess_of_loss(double u_cap);
  static RetentionContract limited_xl(double coverage, double u_cap);

  Kind kind() const { return kind_; }
  double coverage() const { return coverage_; }  // beta_M, LimitedXL only
  double u_min() const { return u_min_; }
  double u_max() const { return u_max_; }  // +inf sentinel allowed
  double u_cap() const { return u_cap_; }
  /// Finite upper end used in computations (u_cap when u_max is infinite).
  double u_hi() const {
    return std::isinf(u_max_) ? u_cap_ : u_max_;
  }

  /// Retained amount Phi(z, u).
  double retention(double z, double u) const;
  /// dPhi/du with the right-derivative convention at the measure-zero kinks.
  double retention_deriv(double z, double u) const;

  void check_control(double u) const;  // throws ConfigError when outside
  std::string describe() const;

 private:
  RetentionContract(Kind kind, double coverage, double u_min, double u_max,
                    double u_cap)
      : kind_(kind),
        coverage_(coverage),
        u_min_(u_min),
        u_max_(u_max),
        u_cap_(u_cap) {}

  Kind kind_;
  double coverage_;
  double u_min_;
  double u_max_;
  double u_cap_;
};

/// EVP / VPP / MVP loading parameters. MVP loadings are constants; the
/// time- and loss-dependent generalization has no canonical shape.
struct PremiumPrinciple {
  enum class Kind { EVP, VPP, MVP };

  static PremiumPrinciple evp(double theta_i, double theta_r);
  static PremiumPrinciple vpp(double eta_i, double eta_r);
  static PremiumPrinciple mvp(double theta_i, double eta_i, double theta_r,
                              double eta_r);

  Kind kind = Kind::EVP;
  double theta_i = 0.0;
  double theta_r = 0.0;
  double eta_i = 0.0;
  double eta_r = 0.0;

  std::string describe() const;
};

/// E[(Z - Phi(Z, u))^order] for order in {1, 2}: closed form for the
/// proportional contract, kink-split quadrature otherwise, exact for point
/// masses.
double ceded_moment(const RetentionContract& contract,
                    const MarkDistribution& dist, double u, int order);

/// d/du of the same moment (derivative under the integral sign).
double ceded_moment_deriv(const RetentionContract& contract,
                          const MarkDistribution& dist, double u, int order);

/// Insurance premium rate c(t, lambda).
double insurance_rate(const PremiumPrinciple& principle,
                      const MarkDistribution& claim_dist, double t,
                      double lam);

/// Reinsurance premium rate q(t, lambda, u); q(., u_N) = 0 exactly.
double reinsurance_rate(const PremiumPrinciple& principle,
                        const RetentionContract& contract,
                        const MarkDistribution& claim_dist, double t,
                        double lam, double u);

/// dq/du at (t, lambda, u).
double reinsurance_rate_deriv(const PremiumPrinciple& principle,
                              const RetentionContract& contract,
                              const MarkDistribution& claim_dist, double t,
                              double lam, double u);

}  // namespace contagion
