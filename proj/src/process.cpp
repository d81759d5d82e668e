#include "contagion/process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "contagion/errors.hpp"
#include "contagion/numerics.hpp"
#include "contagion/rng.hpp"

namespace contagion {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double decayed(const ModelParams& p, double lam_from, double dt) {
  return p.beta + (lam_from - p.beta) * std::exp(-p.alpha * dt);
}

double jump_increment(const ModelParams& p, const JumpRecord& j) {
  return j.kind == JumpKind::Claim ? p.excitation(j.mark) : j.mark;
}

}  // namespace

double intensity_at(const ModelParams& params,
                    std::span<const JumpRecord> jumps, double t,
                    bool left_limit) {
  if (!(t >= 0.0)) throw ConfigError("intensity_at: t must be >= 0");
  double lam = params.beta +
               (params.lambda0 - params.beta) * std::exp(-params.alpha * t);
  double prev = -kInf;
  for (const auto& j : jumps) {
    if (j.time < prev)
      throw ConfigError("intensity_at: jumps must be sorted by time");
    prev = j.time;
    const bool include = left_limit ? (j.time < t) : (j.time <= t);
    if (!include) {
      if (j.time > t) break;
      continue;
    }
    lam += jump_increment(params, j) * std::exp(-params.alpha * (t - j.time));
  }
  return lam;
}

double compensator_between(const ModelParams& params, double lambda_current,
                           double h) {
  if (h < 0.0) throw ConfigError("compensator_between: h must be >= 0");
  return params.beta * h +
         (lambda_current - params.beta) * h * expm1_over(params.alpha * h);
}

double invert_compensator(const ModelParams& params, double lambda_current,
                          double target) {
  if (target < 0.0)
    throw ConfigError("invert_compensator: target must be >= 0");
  if (target == 0.0) return 0.0;
  constexpr double kTol = 1e-12;
  constexpr int kMaxIter = 200;

  double h = target / lambda_current;  // exact for constant intensity
  double gap = compensator_between(params, lambda_current, h) - target;
  int non_contracting = 0;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    if (std::abs(gap) <= kTol * (1.0 + target)) return h;
    const double slope = decayed(params, lambda_current, h);
    const double step = gap / slope;
    const double h_next = h - step;
    if (!(h_next > 0.0) || !std::isfinite(h_next)) break;
    const double gap_next =
        compensator_between(params, lambda_current, h_next) - target;
    if (std::abs(gap_next) >= std::abs(gap)) {
      if (++non_contracting >= 8) break;
    } else {
      non_contracting = 0;
    }
    h = h_next;
    gap = gap_next;
  }
  if (std::abs(gap) <= kTol * (1.0 + target)) return h;

  // Bisection fallback: double the upper bound until the compensator exceeds
  // the target (it always does since beta > 0).
  double h_ub = std::max(h, target / params.beta);
  while (compensator_between(params, lambda_current, h_ub) < target)
    h_ub *= 2.0;
  double lo = 0.0, hi = h_ub;
  for (int iter = 0; iter < 400; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double val = compensator_between(params, lambda_current, mid);
    if (std::abs(val - target) <= kTol * (1.0 + target)) return mid;
    (val < target ? lo : hi) = mid;
    if (hi - lo < 1e-16 * (1.0 + hi)) return mid;
  }
  std::ostringstream os;
  os << "invert_compensator failed: lambda=" << lambda_current
     << " target=" << target << " bracket=[" << lo << "," << hi << "]";
  throw NumericError(os.str());
}

namespace {

void append_jump(PathRecord& path, double time, JumpKind kind, double mark) {
  if (!path.jumps.empty() && time <= path.jumps.back().time)
    time = std::nextafter(path.jumps.back().time, kInf);
  path.jumps.push_back({time, kind, mark});
}

}  // namespace

PathRecord simulate_from(const ModelParams& params, double t_start,
                         double lambda_start, std::uint64_t seed) {
  params.validate();
  if (!(lambda_start > 0.0))
    throw ConfigError("simulate_from: lambda_start must be > 0");
  if (!(t_start >= 0.0) || !(t_start <= params.horizon))
    throw ConfigError("simulate_from: t_start must lie in [0, horizon]");

  PathRecord path;
  path.params = params;
  path.seed = seed;
  path.t_start = t_start;
  path.lambda_start = lambda_start;
  path.horizon = params.horizon;

  Rng rng(seed);
  double t = t_start;
  double lam = lambda_start;
  while (true) {
    // Draw order is fixed: external wait, claim compensator target, mark.
    const double w_ext =
        params.rho > 0.0 ? rng.exponential(params.rho) : kInf;
    const double target = rng.exponential(1.0);
    const double w_claim = invert_compensator(params, lam, target);
    const double wait = std::min(w_claim, w_ext);
    if (t + wait > params.horizon) break;
    t += wait;
    lam = decayed(params, lam, wait);
    if (w_claim <= w_ext) {
      const double z = params.claim_dist.sample(rng);
      lam += params.excitation(z);
      append_jump(path, t, JumpKind::Claim, z);
    } else {
      const double z = params.ext_dist.sample(rng);
      lam += z;
      append_jump(path, t, JumpKind::External, z);
    }
  }
  return path;
}

PathRecord simulate_exact(const ModelParams& params, std::uint64_t seed) {
  return simulate_from(params, 0.0, params.lambda0, seed);
}

PathRecord simulate_thinning(const ModelParams& params, std::uint64_t seed,
                             double majorant_margin) {
  params.validate();
  if (majorant_margin < 0.0)
    throw ConfigError("simulate_thinning: majorant_margin must be >= 0");

  PathRecord path;
  path.params = params;
  path.seed = seed;
  path.t_start = 0.0;
  path.lambda_start = params.lambda0;
  path.horizon = params.horizon;

  Rng rng(seed);
  double t = 0.0;
  double lam = params.lambda0;
  while (true) {
    // The intensity on an inter-event stretch stays below
    // max(current value, beta): decay is monotone toward beta.
    const double majorant = std::max(lam, params.beta) * (1.0 + majorant_margin);
    const double w_ext =
        params.rho > 0.0 ? rng.exponential(params.rho) : kInf;
    const double w_cand = rng.exponential(majorant);
    const double wait = std::min(w_cand, w_ext);
    if (t + wait > params.horizon) break;
    t += wait;
    lam = decayed(params, lam, wait);
    if (w_ext < w_cand) {
      const double z = params.ext_dist.sample(rng);
      lam += z;
      append_jump(path, t, JumpKind::External, z);
      continue;
    }
    const double u = rng.uniform01();
    if (u <= lam / majorant) {
      const double z = params.claim_dist.sample(rng);
      lam += params.excitation(z);
      append_jump(path, t, JumpKind::Claim, z);
    }
    // Rejected candidates advance the clock; the majorant tightens as the
    // intensity decays.
  }
  return path;
}

double mean_intensity(const ModelParams& params, double t) {
  if (!(t >= 0.0)) throw ConfigError("mean_intensity: t must be >= 0");
  const double kappa =
      params.alpha - params.excitation.mean_under(params.claim_dist);
  const double inflow =
      params.alpha * params.beta + params.rho * params.ext_dist.mean();
  // m(t) = lambda0 e^{-kappa t} + inflow * (1 - e^{-kappa t}) / kappa,
  // degenerating to linear growth when kappa = 0.
  return params.lambda0 * std::exp(-kappa * t) +
         inflow * t * expm1_over(kappa * t);
}

double log_density_ratio(const ModelParams& params, const PathRecord& path) {
  path.validate();
  double acc = 0.0;
  double t = path.t_start;
  double lam = path.lambda_start;
  double integral = 0.0;
  for (const auto& j : path.jumps) {
    const double dt = j.time - t;
    integral += compensator_between(params, lam, dt);
    lam = decayed(params, lam, dt);
    if (j.kind == JumpKind::Claim) {
      if (!(lam > 0.0))
        throw NumericError("log_density_ratio: nonpositive pre-jump intensity");
      acc += std::log(lam);
    }
    lam += jump_increment(params, j);
    t = j.time;
  }
  integral += compensator_between(params, lam, path.horizon - t);
  return acc - (integral - (path.horizon - path.t_start));
}

std::vector<double> time_change_increments(const ModelParams& params,
                                           const PathRecord& path,
                                           double* tail_out) {
  std::vector<double> increments;
  double t = path.t_start;
  double lam = path.lambda_start;
  double acc = 0.0;
  for (const auto& j : path.jumps) {
    const double dt = j.time - t;
    acc += compensator_between(params, lam, dt);
    lam = decayed(params, lam, dt);
    if (j.kind == JumpKind::Claim) {
      increments.push_back(acc);
      acc = 0.0;
    }
    lam += jump_increment(params, j);
    t = j.time;
  }
  if (tail_out != nullptr)
    *tail_out = acc + compensator_between(params, lam, path.horizon - t);
  return increments;
}

std::vector<double> pooled_time_change_sample(const ModelParams& params,
                                              std::uint64_t seed,
                                              std::size_t min_claims,
                                              std::size_t max_paths) {
  std::vector<double> sample;
  sample.reserve(min_claims);
  double carry = 0.0;
  for (std::size_t i = 0; i < max_paths && sample.size() < min_claims; ++i) {
    const PathRecord path = simulate_exact(params, derive_stream(seed, i));
    double tail = 0.0;
    const auto incs = time_change_increments(params, path, &tail);
    for (std::size_t k = 0; k < incs.size(); ++k) {
      sample.push_back(k == 0 ? carry + incs[k] : incs[k]);
      if (k == 0) carry = 0.0;
    }
    carry += tail;
  }
  return sample;
}

double integrated_intensity(const ModelParams& params, const PathRecord& path,
                            double t0, double t1, int power) {
  if (power != 1 && power != 2)
    throw ConfigError("integrated_intensity: power must be 1 or 2");
  if (!(t1 >= t0)) throw ConfigError("integrated_intensity: t1 < t0");
  const double alpha = params.alpha;
  const double beta = params.beta;

  double total = 0.0;
  double seg_t = path.t_start;
  double seg_lam = path.lambda_start;
  auto add_piece = [&](double a, double b) {
    // lambda_s = beta + D e^{-alpha (s - seg_t)} on [a, b]
    const double d0 = seg_lam - beta;
    const double ea = std::exp(-alpha * (a - seg_t));
    const double eb = std::exp(-alpha * (b - seg_t));
    if (power == 1) {
      total += beta * (b - a) + d0 * (ea - eb) / alpha;
    } else {
      total += beta * beta * (b - a) + 2.0 * beta * d0 * (ea - eb) / alpha +
               d0 * d0 * (ea * ea - eb * eb) / (2.0 * alpha);
    }
  };
  auto clip_add = [&](double seg_end) {
    const double a = std::max(seg_t, t0);
    const double b = std::min(seg_end, t1);
    if (b > a) add_piece(a, b);
  };
  for (const auto& j : path.jumps) {
    clip_add(j.time);
    seg_lam = decayed(params, seg_lam, j.time - seg_t);
    seg_lam += jump_increment(params, j);
    seg_t = j.time;
  }
  clip_add(path.horizon);
  return total;
}

double generator_identity(const ModelParams& params, double lam) {
  return params.alpha * (params.beta - lam) +
         lam * params.excitation.mean_under(params.claim_dist) +
         params.rho * params.ext_dist.mean();
}

double generator_square(const ModelParams& params, double lam) {
  const auto& ell = params.excitation;
  const auto& f1 = params.claim_dist;
  // E[(lam + ell(Z))^2 - lam^2] = 2 lam E[ell] + E[ell^2]
  double ell_m1 = ell.mean_under(f1);
  double ell_m2 = 0.0;
  switch (ell.form()) {
    case SelfExcitation::Form::Zero:
      break;
    case SelfExcitation::Form::Constant:
      ell_m2 = ell.coeff() * ell.coeff();
      break;
    case SelfExcitation::Form::Linear:
      ell_m2 = ell.coeff() * ell.coeff() * f1.second_moment();
      break;
  }
  return 2.0 * params.alpha * (params.beta - lam) * lam +
         lam * (2.0 * lam * ell_m1 + ell_m2) +
         params.rho *
             (2.0 * lam * params.ext_dist.mean() + params.ext_dist.second_moment());
}

}  // namespace contagion
