#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "contagion/optimizer.hpp"
#include "contagion/valuation.hpp"

namespace contagion {

/// Margins of the sufficient condition for monotonicity of phi in lambda:
/// int B(t, z, u.) F1(dz) - a(t, u_t) at each probe time. Deterministic
/// policies only (A integrates the future control path).
struct StranaReport {
  std::vector<double> t_grid;
  std::vector<double> margins;
  double min_margin = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

StranaReport strana_check(const ModelParams& params, const Policy& policy,
                          const PremiumPrinciple& principle,
                          const RetentionContract& contract,
                          const std::vector<double>& t_grid,
                          double tolerance = 1e-9);

/// Cell-by-cell check of u*(t, lambda) <= u_cox(t) + tol.
struct ComparisonCell {
  double t = 0.0;
  double lam = 0.0;
  double u_star = 0.0;
  double u_cox = 0.0;
  bool violation = false;
};

struct ComparisonReport {
  std::vector<ComparisonCell> cells;
  std::size_t violations = 0;
  double tolerance = 0.0;
};

ComparisonReport compare_policies(const PolicyTable& policy_table,
                                  const std::function<double(double)>& cox_curve,
                                  double tol);

struct PairedEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n_paths = 0;
};

/// Common-random-numbers estimate of phi(t, lam2) - phi(t, lam1), lam1 <=
/// lam2. Deterministic-in-time policies share one reference-measure event
/// skeleton per path; table policies fall back to seed-coupled simulation of
/// both starting points.
PairedEstimate coupled_monotonicity(const ModelParams& params, double t,
                                    double lam1, double lam2,
                                    const Policy& policy,
                                    const RetentionContract& contract,
                                    const PremiumPrinciple& principle,
                                    std::size_t n_paths, std::uint64_t seed,
                                    int workers = 0);

}  // namespace contagion
