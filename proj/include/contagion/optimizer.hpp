#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "contagion/contracts.hpp"
#include "contagion/model.hpp"
#include "contagion/tables.hpp"
#include "contagion/valuation.hpp"

namespace contagion {

/// Inputs of the first-order condition
///   h(t, lambda, u) = -phi dq/du
///                     - int phi(t, lambda + ell(z)) e^{w Phi} dPhi/du lam F1(dz)
/// in ratio-normalized form: phi enters only through
/// phi_ratio(t, lambda, z) = phi(t, lambda + ell(z)) / phi(t, lambda).
struct FocSpec {
  std::function<double(double t, double lam, double z)> phi_ratio;
  RetentionContract contract = RetentionContract::proportional();
  PremiumPrinciple principle;
  ModelParams params;
};

struct ThresholdReport {
  std::optional<double> theta_f;  // proportional: full-reinsurance threshold
  std::optional<double> theta_n;  // proportional: null-reinsurance threshold
  std::optional<double> theta_l;  // excess-of-loss family
};

struct FocSolution {
  double u = 0.0;
  FocRegion region = FocRegion::Interior;
};

/// h(t, lambda, u) divided by lambda * phi(t, lambda) (both positive, so the
/// sign tests are unchanged).
double foc_h(const FocSpec& foc, double t, double lam, double u);

/// Three-region optimal control at one (t, lambda): u_M when h(u_M) < 0,
/// u_N when h(u_N) > 0, interior bisection root otherwise. A sign pattern
/// violating the convexity hypothesis raises ConcavityViolation.
FocSolution solve_foc(const FocSpec& foc, double t, double lam);

/// Stochastic thresholds of the explicit strategy representations, by
/// quadrature with node sets shared between numerator and normalizer so the
/// degenerate (ratio = 1) cases come out exact.
ThresholdReport thresholds(const FocSpec& foc, double t, double lam);

/// Optimal control for the shot-noise (no self-excitation) model: the FOC is
/// free of phi. Closed forms under EVP (logarithmic rule for the
/// excess-of-loss family, threshold-plus-root for proportional); generic
/// phi-free FOC otherwise.
double cox_optimal(double t, const RetentionContract& contract,
                   const PremiumPrinciple& principle,
                   const ModelParams& params);

struct IterationGrids {
  std::vector<double> t_grid;       // ascending, spans [0, T]
  std::vector<double> lambda_grid;  // ascending, positive
};

struct McConfig {
  std::size_t n_paths = 10000;
  std::uint64_t master_seed = 1;
  int workers = 0;
  double policy_tol = 1e-4;
  int max_iterations = 50;
};

struct PolicyIterationResult {
  PolicyTable policy;
  PhiTable phi;
  std::vector<double> sup_deltas;  // per-iteration max |u_{k+1} - u_k|
  bool converged = false;
  int iterations = 0;
};

/// Alternates Monte Carlo evaluation of phi under the interpolated policy
/// with a pointwise FOC update, from the shot-noise strategy as the initial
/// guess. Seeds are frozen per grid row across iterations, so the iteration
/// map is deterministic and the stopping rule meaningful; rows share one
/// stream to couple the estimates across lambda.
PolicyIterationResult policy_iteration(const ModelParams& params,
                                       const RetentionContract& contract,
                                       const PremiumPrinciple& principle,
                                       const IterationGrids& grids,
                                       const McConfig& mc);

/// Signed residual of the reduced HJB equation at an interior grid point,
/// with central finite differences and quadrature jump integrals (flat
/// extrapolation beyond the lambda grid). Diagnostic only: the phi entries
/// are Monte Carlo estimates.
double hjb_residual(const PhiTable& phi_table, const PolicyTable& policy,
                    const ModelParams& params,
                    const RetentionContract& contract,
                    const PremiumPrinciple& principle, std::size_t i,
                    std::size_t j);

}  // namespace contagion
