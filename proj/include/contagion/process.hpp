#pragma once

#include <span>
#include <vector>

#include "contagion/model.hpp"

namespace contagion {

/// Intensity at time t given the jump history (cadlag: a jump at t is
/// included). Set left_limit to evaluate lambda_{t^-} instead.
double intensity_at(const ModelParams& params,
                    std::span<const JumpRecord> jumps, double t,
                    bool left_limit = false);

/// Integral of the intensity over [0, h] starting from the current value
/// lambda_current with no jumps in between:
/// beta*h + (lambda_current - beta) * (1 - exp(-alpha h)) / alpha.
double compensator_between(const ModelParams& params, double lambda_current,
                           double h);

/// Solves compensator_between(lambda_current, h) = target for h. Newton from
/// h = target / lambda_current with a bisection fallback after
/// non-contracting steps; tolerance 1e-12 in compensator units.
double invert_compensator(const ModelParams& params, double lambda_current,
                          double target);

/// Exact simulation on [t_start, horizon] from intensity lambda_start, by
/// competing exponential clocks with closed-form compensator inversion for
/// the claim clock. Deterministic given the seed.
PathRecord simulate_from(const ModelParams& params, double t_start,
                         double lambda_start, std::uint64_t seed);

/// simulate_from at (0, lambda0) over [0, T].
PathRecord simulate_exact(const ModelParams& params, std::uint64_t seed);

/// Ogata-style thinning simulation; independent oracle for simulate_exact.
/// The majorant on each inter-event stretch is
/// max(current lambda, beta) * (1 + majorant_margin).
PathRecord simulate_thinning(const ModelParams& params, std::uint64_t seed,
                             double majorant_margin = 0.0);

/// E[lambda_t]: closed form of the first-moment ODE
/// m' = alpha*beta + rho*E[Z2] - (alpha - E[ell(Z1)]) m, m(0) = lambda0.
double mean_intensity(const ModelParams& params, double t);

/// log L_T = -int_0^T (lambda_s - 1) ds + sum_claims log lambda_{T_j^-}, the
/// log density of the path law relative to the reference product measure.
double log_density_ratio(const ModelParams& params, const PathRecord& path);

/// Compensator increments between successive claim times (the first one from
/// t_start); Exponential(1) i.i.d. when the model is simulated correctly.
/// When tail_out is given it receives the censored compensator between the
/// last claim and the horizon.
std::vector<double> time_change_increments(const ModelParams& params,
                                           const PathRecord& path,
                                           double* tail_out = nullptr);

/// Pools time-change increments over independent paths, gluing each path's
/// censored tail onto the head of the next path. The glued claim sequence is
/// a unit-rate Poisson process in compensator time, so the pooled sample is
/// exactly Exponential(1) with no window-censoring bias.
std::vector<double> pooled_time_change_sample(const ModelParams& params,
                                              std::uint64_t seed,
                                              std::size_t min_claims,
                                              std::size_t max_paths);

/// int_{t0}^{t1} lambda_s^power ds along the path, power in {1, 2}, in closed
/// form per inter-jump segment.
double integrated_intensity(const ModelParams& params, const PathRecord& path,
                            double t0, double t1, int power = 1);

/// Markov generator applied to f(lambda) = lambda and lambda^2.
double generator_identity(const ModelParams& params, double lam);
double generator_square(const ModelParams& params, double lam);

}  // namespace contagion
