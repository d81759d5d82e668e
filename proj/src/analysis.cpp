#include "contagion/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "contagion/errors.hpp"
#include "contagion/numerics.hpp"
#include "contagion/parallel.hpp"
#include "contagion/rng.hpp"

namespace contagion {

StranaReport strana_check(const ModelParams& params, const Policy& policy,
                          const PremiumPrinciple& principle,
                          const RetentionContract& contract,
                          const std::vector<double>& t_grid,
                          double tolerance) {
  if (t_grid.empty()) throw ConfigError("strana_check: empty probe grid");
  QKernel kernel(params, 0.0, policy, contract, principle);
  StranaReport report;
  report.t_grid = t_grid;
  report.tolerance = tolerance;
  report.margins.reserve(t_grid.size());
  double min_margin = std::numeric_limits<double>::infinity();
  for (double t : t_grid) {
    if (!(t >= 0.0) || !(t <= params.horizon))
      throw ConfigError("strana_check: probe time outside [0, horizon]");
    const double margin = kernel.margin_at(t);
    report.margins.push_back(margin);
    min_margin = std::min(min_margin, margin);
  }
  report.min_margin = min_margin;
  report.pass = min_margin >= -tolerance;
  return report;
}

ComparisonReport compare_policies(
    const PolicyTable& policy_table,
    const std::function<double(double)>& cox_curve, double tol) {
  ComparisonReport report;
  report.tolerance = tol;
  const GridTable& u = policy_table.u;
  report.cells.reserve(u.nt() * u.nl());
  for (std::size_t i = 0; i < u.nt(); ++i) {
    const double t = u.t_grid()[i];
    const double u_cox = cox_curve(t);
    for (std::size_t j = 0; j < u.nl(); ++j) {
      ComparisonCell cell;
      cell.t = t;
      cell.lam = u.lambda_grid()[j];
      cell.u_star = u.at(i, j);
      cell.u_cox = u_cox;
      cell.violation = cell.u_star > u_cox + tol;
      if (cell.violation) ++report.violations;
      report.cells.push_back(cell);
    }
  }
  return report;
}

PairedEstimate coupled_monotonicity(const ModelParams& params, double t,
                                    double lam1, double lam2,
                                    const Policy& policy,
                                    const RetentionContract& contract,
                                    const PremiumPrinciple& principle,
                                    std::size_t n_paths, std::uint64_t seed,
                                    int workers) {
  if (!(lam1 > 0.0) || !(lam2 >= lam1))
    throw ConfigError("coupled_monotonicity: need 0 < lam1 <= lam2");
  if (n_paths == 0)
    throw ConfigError("coupled_monotonicity: n_paths must be > 0");
  if (t >= params.horizon || lam1 == lam2)
    return PairedEstimate{0.0, 0.0, n_paths};

  std::vector<double> diffs(n_paths);
  if (policy.deterministic_in_time()) {
    // One reference-measure skeleton drives both starting intensities.
    QKernel kernel(params, t, policy, contract, principle);
    parallel_for(
        n_paths,
        [&](std::size_t i) {
          Rng rng(derive_stream(seed, i));
          const auto events = kernel.simulate_skeleton(rng);
          diffs[i] =
              kernel.path_value(lam2, events) - kernel.path_value(lam1, events);
        },
        workers);
  } else {
    // Seed-coupled simulation under the model dynamics.
    parallel_for(
        n_paths,
        [&](std::size_t i) {
          const std::uint64_t s = derive_stream(seed, i);
          const PathRecord p1 = simulate_from(params, t, lam1, s);
          const PathRecord p2 = simulate_from(params, t, lam2, s);
          const double w1 =
              terminal_wealth(p1, policy, principle, contract, 0.0, t);
          const double w2 =
              terminal_wealth(p2, policy, principle, contract, 0.0, t);
          diffs[i] = std::exp(-params.eta * w2) - std::exp(-params.eta * w1);
        },
        workers);
  }
  const MeanStderr ms = mean_stderr(diffs);
  return PairedEstimate{ms.mean, ms.stderr_, n_paths};
}

}  // namespace contagion
