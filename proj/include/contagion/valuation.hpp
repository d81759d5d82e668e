#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "contagion/contracts.hpp"
#include "contagion/model.hpp"
#include "contagion/process.hpp"
#include "contagion/tables.hpp"

namespace contagion {

/// Admissible strategy fed to the estimators: a constant level, a
/// deterministic curve in time (linear interpolation), or an interpolated
/// (t, lambda) table.
class Policy {
 public:
  enum class Form { Constant, TimeCurve, Table };

  static Policy constant(double u);
  static Policy time_curve(std::vector<double> t_knots,
                           std::vector<double> u_values);
  static Policy table(std::shared_ptr<const GridTable> table);

  Form form() const { return form_; }
  bool deterministic_in_time() const { return form_ != Form::Table; }

  double value(double t, double lam) const;
  double constant_value() const { return constant_u_; }

 private:
  Policy() = default;

  Form form_ = Form::Constant;
  double constant_u_ = 0.0;
  std::vector<double> curve_t_, curve_u_;
  std::shared_ptr<const GridTable> table_;
};

struct Estimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n_paths = 0;
};

/// Terminal wealth along a realized path:
/// X_T = x0 e^{r(T-t0)} + int_t0^T e^{r(T-s)} (c_s - q_s) ds
///       - sum_{claims in (t0, T]} e^{r(T-T_j)} Phi(Z_j, u_{T_j}).
/// The premium integral treats the intensity decay in closed form per
/// inter-jump segment.
double terminal_wealth(const PathRecord& path, const Policy& policy,
                       const PremiumPrinciple& principle,
                       const RetentionContract& contract, double x0,
                       double t0);

/// Monte Carlo estimate of phi(t, lam) under the given policy (P dynamics).
Estimate estimate_phi(const ModelParams& params, double t, double lam,
                      const Policy& policy, const RetentionContract& contract,
                      const PremiumPrinciple& principle, std::size_t n_paths,
                      std::uint64_t seed, int workers = 0);

/// Same estimate through the reference-measure representation: claims arrive
/// at unit rate, external events at rate rho, and the exponential functional
/// uses the deterministic a/A/B kernel. Only time-deterministic policies are
/// supported (A integrates the future control path).
Estimate estimate_phi_q(const ModelParams& params, double t, double lam,
                        const Policy& policy,
                        const RetentionContract& contract,
                        const PremiumPrinciple& principle, std::size_t n_paths,
                        std::uint64_t seed, int workers = 0);

/// Compound-Poisson closed form for the fully degenerate configuration
/// (rho = 0, no self-excitation, lambda0 = beta, r = 0) under a constant
/// control: exp{(T-t) [ -eta (c - q) + beta (E[e^{eta Phi(Z,u)}] - 1) ]}.
double phi_closed_form_poisson(const ModelParams& params,
                               const RetentionContract& contract,
                               const PremiumPrinciple& principle, double u,
                               double t);

/// Deterministic-intensity generalization of the same closed form (rho = 0,
/// no self-excitation, r = 0, any starting intensity): the intensity decays
/// deterministically, so phi(t, lam) is an inhomogeneous-Poisson exponential
/// functional. Analytic reference for grid diagnostics.
double phi_closed_form_decay(const ModelParams& params,
                             const RetentionContract& contract,
                             const PremiumPrinciple& principle, double u,
                             double t, double lam);

/// v(t, x, lambda) = e^{-eta x e^{r(T-t)}} phi(t, lambda).
double value_function(const ModelParams& params, double t, double x,
                      double phi_value);

/// E[e^{w Phi(Z, u)}] with kink-aware quadrature.
double exp_retention_integral(const RetentionContract& contract,
                              const MarkDistribution& dist, double w,
                              double u);

/// Deterministic kernel of the reference-measure representation for a
/// time-deterministic policy on [t0, T]:
///   a(s) = 1 + eta e^{r(T-s)} (c(s) - d(s, u_s)),
///   A(s) = int_s^T a(v) e^{-alpha (v-s)} dv,
///   B(s, z) = exp(eta e^{r(T-s)} Phi(z, u_s) - A(s) ell(z)).
/// The value of a realized reference-measure path is the exact exponential
/// functional
///   exp{(T-t0) - int a(s) (beta + (lam-beta)e^{-alpha(s-t0)}) ds}
///     * prod_ext e^{-A(v) z}  * prod_claims lambda_{v^-} B(v, z),
/// with realized marks and left-limit intensities. Shared by the Q
/// estimator, the monotonicity margin check, and the coupled comparison
/// estimator.
class QKernel {
 public:
  QKernel(const ModelParams& params, double t0, const Policy& policy,
          const RetentionContract& contract, const PremiumPrinciple& principle,
          std::size_t cells = 512);

  double t0() const { return t0_; }
  double horizon() const { return params_.horizon; }

  double u_at(double s) const;
  double a_at(double s) const;
  double A_at(double s) const;
  /// int B(s, z) F1(dz)
  double claim_weight_at(double s) const;
  /// Monotonicity margin int B(s, z) F1(dz) - a(s).
  double margin_at(double s) const;

  /// Exact exponential functional of a realized reference-measure path
  /// started at intensity lam.
  double path_value(double lam, const std::vector<JumpRecord>& events) const;

  /// Simulates the reference-measure event skeleton on [t0, T].
  std::vector<JumpRecord> simulate_skeleton(Rng& rng) const;

 private:
  ModelParams params_;
  double t0_;
  Policy policy_;
  RetentionContract contract_;
  PremiumPrinciple principle_;
  double c_coef_;

  std::vector<double> s_grid_;   // cell boundaries
  std::vector<double> a_suffix_; // int_{s_i}^T a(v) e^{-alpha(v-t0)} dv
  double int_a_ = 0.0;           // int_{t0}^T a(s) ds
  double a_t0_ = 0.0;            // A(t0)
  bool closed_form_a_ = false;
  double const_k_ = 0.0;  // c - d(u) for constant policies
};

}  // namespace contagion
