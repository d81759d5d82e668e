#include "contagion/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "contagion/errors.hpp"
#include "contagion/numerics.hpp"
#include "contagion/parallel.hpp"
#include "contagion/rng.hpp"

namespace contagion {

namespace {

double ratio_one(double, double, double) { return 1.0; }

/// int phi_ratio(z) e^{w Phi(z,u)} dPhi/du F1(dz), the marginal retained
/// exposure term of the FOC.
double foc_exposure_integral(const FocSpec& foc, double t, double lam,
                             double u) {
  const auto& dist = foc.params.claim_dist;
  const double w =
      foc.params.eta * std::exp(foc.params.r * (foc.params.horizon - t));
  const auto& ratio = foc.phi_ratio;
  switch (foc.contract.kind()) {
    case RetentionContract::Kind::Proportional:
      return dist.integrate([&](double z) {
        return ratio(t, lam, z) * z * std::exp(w * u * z);
      });
    case RetentionContract::Kind::ExcessOfLoss:
      // dPhi/du = 1{z > u}, Phi = u there.
      return std::exp(w * u) *
             dist.integrate_between([&](double z) { return ratio(t, lam, z); },
                                    u, dist.support_max());
    case RetentionContract::Kind::LimitedXL:
      return std::exp(w * u) *
             dist.integrate_between([&](double z) { return ratio(t, lam, z); },
                                    u, u + foc.contract.coverage());
  }
  return 0.0;
}

double premium_deriv_coef(const FocSpec& foc, double t, double u) {
  return reinsurance_rate_deriv(foc.principle, foc.contract,
                                foc.params.claim_dist, t, 1.0, u);
}

}  // namespace

double foc_h(const FocSpec& foc, double t, double lam, double u) {
  return -premium_deriv_coef(foc, t, u) -
         foc_exposure_integral(foc, t, lam, u);
}

FocSolution solve_foc(const FocSpec& foc, double t, double lam) {
  const double u_lo = foc.contract.u_min();
  const double u_hi = foc.contract.u_hi();
  const double h_lo = foc_h(foc, t, lam, u_lo);
  const double h_hi = foc_h(foc, t, lam, u_hi);
  if (h_lo < 0.0 && h_hi > 0.0) {
    std::ostringstream os;
    os << "solve_foc: h(" << u_lo << ")=" << h_lo << " < 0 and h(" << u_hi
       << ")=" << h_hi << " > 0 at t=" << t << ", lambda=" << lam
       << "; the stationarity equation is not consistent with convexity";
    throw ConcavityViolation(os.str());
  }
  if (h_lo < 0.0) return {u_lo, FocRegion::MaxReinsurance};
  if (h_hi > 0.0) return {u_hi, FocRegion::NullReinsurance};
  // h decreases in u. Zeros of h can form a plateau at the top of the
  // excess-of-loss domain (no claim mass above the retention); keep the
  // invariant h(lo) >= 0 >= h(hi) with h(mid) = 0 treated as the high side,
  // so the iteration lands on the leftmost crossing.
  double lo = u_lo, hi = u_hi;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (foc_h(foc, t, lam, mid) > 0.0)
      lo = mid;
    else
      hi = mid;
  }
  return {0.5 * (lo + hi), FocRegion::Interior};
}

ThresholdReport thresholds(const FocSpec& foc, double t, double lam) {
  ThresholdReport report;
  const auto& dist = foc.params.claim_dist;
  const auto& ratio = foc.phi_ratio;
  const double w =
      foc.params.eta * std::exp(foc.params.r * (foc.params.horizon - t));
  switch (foc.contract.kind()) {
    case RetentionContract::Kind::Proportional: {
      // Shared node sets: with ratio identically one the quotients are
      // exactly one and the thresholds exactly zero / the Cox value.
      const double mean_q = dist.integrate([](double z) { return z; });
      report.theta_f = dist.integrate([&](double z) {
                         return ratio(t, lam, z) * z;
                       }) / mean_q -
                       1.0;
      report.theta_n = dist.integrate([&](double z) {
                         return ratio(t, lam, z) * z * std::exp(w * z);
                       }) / mean_q -
                       1.0;
      break;
    }
    case RetentionContract::Kind::ExcessOfLoss:
    case RetentionContract::Kind::LimitedXL: {
      const double b =
          foc.contract.kind() == RetentionContract::Kind::LimitedXL
              ? std::min(foc.contract.coverage(), dist.support_max())
              : dist.support_max();
      const double mass =
          dist.integrate_between([](double) { return 1.0; }, 0.0, b);
      if (!(mass > 0.0))
        throw ConfigError(
            "thresholds: no claim mass below the coverage; the contract is "
            "degenerate");
      report.theta_l = dist.integrate_between([&](double z) {
                         return ratio(t, lam, z);
                       }, 0.0, b) / mass -
                       1.0;
      break;
    }
  }
  return report;
}

double cox_optimal(double t, const RetentionContract& contract,
                   const PremiumPrinciple& principle,
                   const ModelParams& params) {
  const double w =
      params.eta * std::exp(params.r * (params.horizon - t));
  if (principle.kind == PremiumPrinciple::Kind::EVP) {
    switch (contract.kind()) {
      case RetentionContract::Kind::ExcessOfLoss:
      case RetentionContract::Kind::LimitedXL: {
        const double u = std::log1p(principle.theta_r) / w;
        return std::clamp(u, contract.u_min(), contract.u_hi());
      }
      case RetentionContract::Kind::Proportional: {
        const auto& dist = params.claim_dist;
        const double mean_q = dist.integrate([](double z) { return z; });
        const double theta_n = dist.integrate([&](double z) {
                                 return z * std::exp(w * z);
                               }) / mean_q -
                               1.0;
        if (principle.theta_r > theta_n) return 1.0;
        const double target = (1.0 + principle.theta_r) * mean_q;
        return bisect(
            [&](double u) {
              return dist.integrate(
                         [&](double z) { return z * std::exp(w * u * z); }) -
                     target;
            },
            0.0, 1.0, 1e-12);
      }
    }
  }
  // VPP / MVP: the phi-free FOC, solved generically.
  FocSpec foc;
  foc.phi_ratio = ratio_one;
  foc.contract = contract;
  foc.principle = principle;
  foc.params = params;
  return solve_foc(foc, t, 1.0).u;
}

PolicyIterationResult policy_iteration(const ModelParams& params,
                                       const RetentionContract& contract,
                                       const PremiumPrinciple& principle,
                                       const IterationGrids& grids,
                                       const McConfig& mc) {
  params.validate();
  if (grids.t_grid.size() < 2 || grids.lambda_grid.size() < 2)
    throw ConfigError("policy_iteration: grids need at least 2 points");
  if (std::abs(grids.t_grid.front()) > 1e-12 ||
      std::abs(grids.t_grid.back() - params.horizon) > 1e-12)
    throw ConfigError("policy_iteration: t grid must span [0, horizon]");
  const double lam_floor = std::min(params.lambda0, params.beta);
  if (grids.lambda_grid.front() < lam_floor - 1e-12)
    throw ConfigError(
        "policy_iteration: lambda grid must start at or above "
        "min(lambda0, beta)");

  const std::size_t nt = grids.t_grid.size();
  const std::size_t nl = grids.lambda_grid.size();

  PolicyIterationResult result;
  result.policy.u = GridTable(grids.t_grid, grids.lambda_grid);
  result.policy.regions.assign(nt * nl, FocRegion::Interior);
  for (std::size_t i = 0; i < nt; ++i) {
    const double u0 =
        cox_optimal(grids.t_grid[i], contract, principle, params);
    for (std::size_t j = 0; j < nl; ++j) result.policy.u.at(i, j) = u0;
  }

  PhiTable phi;
  auto estimate_phi_table = [&](const PolicyTable& policy_table) {
    PhiTable out;
    out.phi = GridTable(grids.t_grid, grids.lambda_grid, 1.0);
    out.stderr_ = GridTable(grids.t_grid, grids.lambda_grid, 0.0);
    auto table = std::make_shared<GridTable>(policy_table.u);
    const Policy policy = Policy::table(table);
    parallel_for(
        nt * nl,
        [&](std::size_t cell) {
          const std::size_t i = cell / nl;
          const std::size_t j = cell % nl;
          // One stream per t row: estimates along lambda share their noise,
          // which keeps the interpolated ratios stable.
          const Estimate est = estimate_phi(
              params, grids.t_grid[i], grids.lambda_grid[j], policy, contract,
              principle, mc.n_paths, derive_stream(mc.master_seed, i),
              /*workers=*/1);
          out.phi.at(i, j) = est.mean;
          out.stderr_.at(i, j) = est.stderr_;
        },
        mc.workers);
    return out;
  };

  FocSpec foc;
  foc.contract = contract;
  foc.principle = principle;
  foc.params = params;

  bool converged = false;
  int iterations = 0;
  for (int iter = 0; iter < mc.max_iterations; ++iter) {
    ++iterations;
    phi = estimate_phi_table(result.policy);
    const GridTable& phi_grid = phi.phi;
    foc.phi_ratio = [&phi_grid, &params](double t, double lam, double z) {
      return phi_grid.interpolate(t, lam + params.excitation(z)) /
             phi_grid.interpolate(t, lam);
    };

    double delta = 0.0;
    PolicyTable next = result.policy;
    for (std::size_t i = 0; i < nt; ++i) {
      for (std::size_t j = 0; j < nl; ++j) {
        const FocSolution sol =
            solve_foc(foc, grids.t_grid[i], grids.lambda_grid[j]);
        delta = std::max(delta,
                         std::abs(sol.u - result.policy.u.at(i, j)));
        next.u.at(i, j) = sol.u;
        next.regions[i * nl + j] = sol.region;
      }
    }
    result.policy = std::move(next);
    result.sup_deltas.push_back(delta);
    if (delta <= mc.policy_tol) {
      converged = true;
      break;
    }
  }
  // Final phi pass so the returned value table matches the returned policy.
  result.phi = estimate_phi_table(result.policy);
  result.converged = converged;
  result.iterations = iterations;
  return result;
}

namespace {

double central_diff(double f_lo, double f_mid, double f_hi, double h_lo,
                    double h_hi) {
  // Second-order difference on a possibly nonuniform 3-point stencil.
  return (h_lo * h_lo * f_hi - h_hi * h_hi * f_lo +
          (h_hi * h_hi - h_lo * h_lo) * f_mid) /
         (h_lo * h_hi * (h_lo + h_hi));
}

}  // namespace

double hjb_residual(const PhiTable& phi_table, const PolicyTable& policy,
                    const ModelParams& params,
                    const RetentionContract& contract,
                    const PremiumPrinciple& principle, std::size_t i,
                    std::size_t j) {
  const GridTable& phi = phi_table.phi;
  const auto& ts = phi.t_grid();
  const auto& ls = phi.lambda_grid();
  if (i == 0 || i + 1 >= phi.nt() || j == 0 || j + 1 >= phi.nl())
    throw ConfigError("hjb_residual: interior grid points only");

  const double t = ts[i];
  const double lam = ls[j];
  const double f = phi.at(i, j);
  const double dphi_dt =
      central_diff(phi.at(i - 1, j), f, phi.at(i + 1, j), ts[i] - ts[i - 1],
                   ts[i + 1] - ts[i]);
  const double dphi_dl =
      central_diff(phi.at(i, j - 1), f, phi.at(i, j + 1), ls[j] - ls[j - 1],
                   ls[j + 1] - ls[j]);

  const double ext_jump =
      params.rho > 0.0
          ? params.rho * params.ext_dist.integrate([&](double z) {
              return phi.interpolate_row(i, lam + z) - f;
            })
          : 0.0;

  const double c = insurance_rate(principle, params.claim_dist, t, lam);
  const double w = params.eta * std::exp(params.r * (params.horizon - t));

  const double u = policy.u.at(i, j);
  const double q = reinsurance_rate(principle, contract, params.claim_dist, t,
                                    lam, u);
  auto jump_integrand = [&](double z) {
    return std::exp(w * contract.retention(z, u)) *
               phi.interpolate_row(i, lam + params.excitation(z)) -
           f;
  };
  // Split at the retention kinks of the excess-of-loss family.
  const auto& dist = params.claim_dist;
  double claim_jump = 0.0;
  switch (contract.kind()) {
    case RetentionContract::Kind::Proportional:
      claim_jump = dist.integrate(jump_integrand);
      break;
    case RetentionContract::Kind::ExcessOfLoss:
      claim_jump = dist.integrate_between(jump_integrand, 0.0, u) +
                   dist.integrate_between(jump_integrand, u,
                                          dist.support_max());
      break;
    case RetentionContract::Kind::LimitedXL:
      claim_jump =
          dist.integrate_between(jump_integrand, 0.0, u) +
          dist.integrate_between(jump_integrand, u, u + contract.coverage()) +
          dist.integrate_between(jump_integrand, u + contract.coverage(),
                                 dist.support_max());
      break;
  }
  claim_jump *= lam;
  const double psi = w * f * q + claim_jump;

  return dphi_dt + params.alpha * (params.beta - lam) * dphi_dl + ext_jump -
         w * f * c + psi;
}

}  // namespace contagion
