#include "contagion/valuation.hpp"

#include <algorithm>
#include <cmath>

#include "contagion/errors.hpp"
#include "contagion/numerics.hpp"
#include "contagion/parallel.hpp"
#include "contagion/rng.hpp"

namespace contagion {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_control(const RetentionContract& contract, double u) {
  return std::clamp(u, contract.u_min(), contract.u_hi());
}

/// c(t, lambda) / lambda; constant in time for the supported principles.
double insurance_coef(const PremiumPrinciple& principle,
                      const MarkDistribution& dist) {
  return insurance_rate(principle, dist, 0.0, 1.0);
}

/// q(t, lambda, u) / lambda, exact evaluation.
double ceded_rate_coef(const PremiumPrinciple& principle,
                       const RetentionContract& contract,
                       const MarkDistribution& dist, double u) {
  return reinsurance_rate(principle, contract, dist, 0.0, 1.0, u);
}

/// Reinsurance rate per unit intensity as a function of u. The proportional
/// contract is closed-form; the excess-of-loss family is tabulated once so
/// the per-path premium integrals stay cheap.
class CededRateCurve {
 public:
  CededRateCurve(const PremiumPrinciple& principle,
                 const RetentionContract& contract,
                 const MarkDistribution& dist)
      : principle_(principle), contract_(contract), dist_(dist) {
    if (contract.kind() != RetentionContract::Kind::Proportional) {
      us_ = linspace(contract.u_min(), contract.u_hi(), 513);
      ds_.reserve(us_.size());
      for (double u : us_)
        ds_.push_back(ceded_rate_coef(principle_, contract_, dist_, u));
    }
  }

  double operator()(double u) const {
    u = clamp_control(contract_, u);
    if (us_.empty()) return ceded_rate_coef(principle_, contract_, dist_, u);
    return interp_linear(us_, ds_, u);
  }

 private:
  const PremiumPrinciple& principle_;
  const RetentionContract& contract_;
  const MarkDistribution& dist_;
  std::vector<double> us_, ds_;
};

/// int_a^b e^{r(T-s)} lambda_s ds for lambda_s = beta + D e^{-alpha(s - s0)}.
double discounted_intensity_segment(const ModelParams& p, double seg_start,
                                    double lam_at_start, double a, double b) {
  const double d0 = lam_at_start - p.beta;
  const double base = p.beta * std::exp(p.r * p.horizon) *
                      int_exp(-p.r, a, b);
  const double decay = d0 * std::exp(p.r * p.horizon + p.alpha * seg_start) *
                       int_exp(-(p.r + p.alpha), a, b);
  return base + decay;
}

struct WealthEvaluator {
  const ModelParams& params;
  const Policy& policy;
  const RetentionContract& contract;
  double c_coef;
  const std::function<double(double)>& d_of_u;

  double control(double s, double lam) const {
    return clamp_control(contract, policy.value(s, lam));
  }

  /// Premium part over one inter-jump segment [a, b]; the intensity decays
  /// from lam_at_start at seg_start with no jumps inside.
  double premium_segment(double seg_start, double lam_at_start, double a,
                         double b) const {
    if (b <= a) return 0.0;
    if (policy.form() == Policy::Form::Constant) {
      const double k = c_coef - d_of_u(control(a, lam_at_start));
      return k * discounted_intensity_segment(params, seg_start, lam_at_start,
                                              a, b);
    }
    // Gauss-Legendre on subdivisions short enough for the exponential scales;
    // the intensity itself is evaluated exactly.
    const double scale = std::max({params.alpha, params.r, 2.0});
    const int pieces = static_cast<int>(
        std::clamp(std::ceil((b - a) * scale / 2.0), 1.0, 64.0));
    const auto& rule = gauss_legendre(24);
    const double erT = std::exp(params.r * params.horizon);
    double acc = 0.0;
    for (int piece = 0; piece < pieces; ++piece) {
      const double pa = a + (b - a) * piece / pieces;
      const double pb = a + (b - a) * (piece + 1) / pieces;
      const double mid = 0.5 * (pa + pb), half = 0.5 * (pb - pa);
      for (std::size_t q = 0; q < rule.nodes.size(); ++q) {
        const double s = mid + half * rule.nodes[q];
        const double lam =
            params.beta + (lam_at_start - params.beta) *
                              std::exp(-params.alpha * (s - seg_start));
        const double k = c_coef - d_of_u(control(s, lam));
        acc += half * rule.weights[q] * erT * std::exp(-params.r * s) * lam * k;
      }
    }
    return acc;
  }

  /// int_t0^T e^{r(T-s)} (c_s - q_s) ds - sum e^{r(T-T_j)} Phi(Z_j, u_{T_j})
  /// along the path, claims strictly after t0.
  double increment(const PathRecord& path, double t0) const {
    double acc = 0.0;
    double seg_t = path.t_start;
    double seg_lam = path.lambda_start;
    for (const auto& j : path.jumps) {
      acc += premium_segment(seg_t, seg_lam, std::max(seg_t, t0), j.time);
      const double lam_pre =
          params.beta + (seg_lam - params.beta) *
                            std::exp(-params.alpha * (j.time - seg_t));
      if (j.kind == JumpKind::Claim) {
        if (j.time > t0) {
          const double u = control(j.time, lam_pre);
          acc -= std::exp(params.r * (params.horizon - j.time)) *
                 contract.retention(j.mark, u);
        }
        seg_lam = lam_pre + params.excitation(j.mark);
      } else {
        seg_lam = lam_pre + j.mark;
      }
      seg_t = j.time;
    }
    acc += premium_segment(seg_t, seg_lam, std::max(seg_t, t0), path.horizon);
    return acc;
  }
};

}  // namespace

Policy Policy::constant(double u) {
  Policy p;
  p.form_ = Form::Constant;
  p.constant_u_ = u;
  return p;
}

Policy Policy::time_curve(std::vector<double> t_knots,
                          std::vector<double> u_values) {
  if (t_knots.size() != u_values.size() || t_knots.size() < 2)
    throw ConfigError("time-curve policy needs matching knot/value lists");
  if (!std::is_sorted(t_knots.begin(), t_knots.end()))
    throw ConfigError("time-curve policy knots must ascend");
  Policy p;
  p.form_ = Form::TimeCurve;
  p.curve_t_ = std::move(t_knots);
  p.curve_u_ = std::move(u_values);
  return p;
}

Policy Policy::table(std::shared_ptr<const GridTable> table) {
  if (!table) throw ConfigError("table policy needs a table");
  Policy p;
  p.form_ = Form::Table;
  p.table_ = std::move(table);
  return p;
}

double Policy::value(double t, double lam) const {
  switch (form_) {
    case Form::Constant:
      return constant_u_;
    case Form::TimeCurve:
      return interp_linear(curve_t_, curve_u_, t);
    case Form::Table:
      return table_->interpolate(t, lam);
  }
  return constant_u_;
}

double terminal_wealth(const PathRecord& path, const Policy& policy,
                       const PremiumPrinciple& principle,
                       const RetentionContract& contract, double x0,
                       double t0) {
  if (!(t0 <= path.horizon)) throw ConfigError("terminal_wealth: t0 > horizon");
  const ModelParams& params = path.params;
  const double c_coef = insurance_coef(principle, params.claim_dist);
  std::function<double(double)> d_exact = [&](double u) {
    return ceded_rate_coef(principle, contract, params.claim_dist,
                           clamp_control(contract, u));
  };
  WealthEvaluator eval{params, policy, contract, c_coef, d_exact};
  return x0 * std::exp(params.r * (params.horizon - t0)) +
         eval.increment(path, t0);
}

Estimate estimate_phi(const ModelParams& params, double t, double lam,
                      const Policy& policy, const RetentionContract& contract,
                      const PremiumPrinciple& principle, std::size_t n_paths,
                      std::uint64_t seed, int workers) {
  params.validate();
  if (!(lam > 0.0)) throw ConfigError("estimate_phi: lambda must be > 0");
  if (!(t <= params.horizon)) throw ConfigError("estimate_phi: t > horizon");
  if (n_paths == 0) throw ConfigError("estimate_phi: n_paths must be > 0");

  const double c_coef = insurance_coef(principle, params.claim_dist);
  CededRateCurve d_curve(principle, contract, params.claim_dist);
  std::function<double(double)> d_of_u = [&](double u) { return d_curve(u); };
  WealthEvaluator eval{params, policy, contract, c_coef, d_of_u};

  std::vector<double> values(n_paths);
  parallel_for(
      n_paths,
      [&](std::size_t i) {
        PathRecord path =
            simulate_from(params, t, lam, derive_stream(seed, i));
        values[i] = std::exp(-params.eta * eval.increment(path, t));
      },
      workers);
  const MeanStderr ms = mean_stderr(values);
  return Estimate{ms.mean, ms.stderr_, n_paths};
}

double exp_retention_integral(const RetentionContract& contract,
                              const MarkDistribution& dist, double w,
                              double u) {
  auto g = [&](double z) { return std::exp(w * contract.retention(z, u)); };
  switch (contract.kind()) {
    case RetentionContract::Kind::Proportional:
      return dist.integrate(g);
    case RetentionContract::Kind::ExcessOfLoss:
      return dist.integrate_between(g, 0.0, u) +
             dist.integrate_between(g, u, dist.support_max());
    case RetentionContract::Kind::LimitedXL:
      return dist.integrate_between(g, 0.0, u) +
             dist.integrate_between(g, u, u + contract.coverage()) +
             dist.integrate_between(g, u + contract.coverage(),
                                    dist.support_max());
  }
  return 1.0;
}

double phi_closed_form_poisson(const ModelParams& params,
                               const RetentionContract& contract,
                               const PremiumPrinciple& principle, double u,
                               double t) {
  if (params.rho != 0.0 || !params.excitation.is_zero() ||
      params.lambda0 != params.beta || params.r != 0.0)
    throw ConfigError(
        "phi_closed_form_poisson requires rho = 0, zero self-excitation, "
        "lambda0 = beta and r = 0");
  if (!(t <= params.horizon))
    throw ConfigError("phi_closed_form_poisson: t > horizon");
  u = clamp_control(contract, u);
  const double beta = params.beta;
  const double c = insurance_rate(principle, params.claim_dist, t, beta);
  const double q =
      reinsurance_rate(principle, contract, params.claim_dist, t, beta, u);
  const double mgf_phi =
      exp_retention_integral(contract, params.claim_dist, params.eta, u);
  const double tau = params.horizon - t;
  return std::exp(tau * (-params.eta * (c - q) + beta * (mgf_phi - 1.0)));
}

double phi_closed_form_decay(const ModelParams& params,
                             const RetentionContract& contract,
                             const PremiumPrinciple& principle, double u,
                             double t, double lam) {
  if (params.rho != 0.0 || !params.excitation.is_zero() || params.r != 0.0)
    throw ConfigError(
        "phi_closed_form_decay requires rho = 0, zero self-excitation and "
        "r = 0");
  if (!(t <= params.horizon))
    throw ConfigError("phi_closed_form_decay: t > horizon");
  u = clamp_control(contract, u);
  const double c_coef = insurance_coef(principle, params.claim_dist);
  const double d_coef =
      ceded_rate_coef(principle, contract, params.claim_dist, u);
  const double mgf_phi =
      exp_retention_integral(contract, params.claim_dist, params.eta, u);
  const double integrated = compensator_between(params, lam, params.horizon - t);
  return std::exp(integrated *
                  (-params.eta * (c_coef - d_coef) + (mgf_phi - 1.0)));
}

double value_function(const ModelParams& params, double t, double x,
                      double phi_value) {
  if (!(phi_value > 0.0))
    throw ConfigError("value_function: phi must be > 0");
  return std::exp(-params.eta * x *
                  std::exp(params.r * (params.horizon - t))) *
         phi_value;
}

// --- reference-measure kernel -----------------------------------------------

QKernel::QKernel(const ModelParams& params, double t0, const Policy& policy,
                 const RetentionContract& contract,
                 const PremiumPrinciple& principle, std::size_t cells)
    : params_(params),
      t0_(t0),
      policy_(policy),
      contract_(contract),
      principle_(principle) {
  if (!policy.deterministic_in_time())
    throw UnsupportedPolicyError(
        "reference-measure representation needs a policy that is "
        "deterministic in time (constant or time curve)");
  params_.validate();
  if (!(t0 <= params.horizon)) throw ConfigError("QKernel: t0 > horizon");
  c_coef_ = insurance_coef(principle, params_.claim_dist);
  const double T = params_.horizon;
  if (T - t0 <= 0.0) return;  // degenerate: value identically 1

  closed_form_a_ = policy.form() == Policy::Form::Constant;
  if (closed_form_a_)
    const_k_ = c_coef_ - ceded_rate_coef(principle_, contract_,
                                         params_.claim_dist,
                                         clamp_control(contract_,
                                                       policy.constant_value()));

  s_grid_ = linspace(t0, T, cells + 1);
  const double gauss_off = 0.5 / std::sqrt(3.0);

  if (closed_form_a_) {
    // int a = (T - t0) + eta k int e^{r(T-s)} ds
    int_a_ = (T - t0) + params_.eta * const_k_ * std::exp(params_.r * T) *
                            int_exp(-params_.r, t0, T);
  } else {
    // Suffix integral int_{s_i}^T a(v) e^{-alpha (v - t0)} dv, accumulated
    // from the right so all partial sums stay positive, plus the plain
    // integral of a.
    a_suffix_.assign(s_grid_.size(), 0.0);
    double int_a = 0.0;
    for (std::size_t i = s_grid_.size() - 1; i-- > 0;) {
      const double sa = s_grid_[i], sb = s_grid_[i + 1];
      const double h = sb - sa;
      double cell = 0.0;
      for (double frac : {0.5 - gauss_off, 0.5 + gauss_off}) {
        const double v = sa + h * frac;
        const double a_v = a_at(v);
        cell += 0.5 * h * a_v * std::exp(-params_.alpha * (v - t0));
        int_a += 0.5 * h * a_v;
      }
      a_suffix_[i] = a_suffix_[i + 1] + cell;
    }
    int_a_ = int_a;
  }
  a_t0_ = A_at(t0);
}

double QKernel::u_at(double s) const {
  return clamp_control(contract_, policy_.value(s, 0.0));
}

double QKernel::a_at(double s) const {
  const double k =
      closed_form_a_
          ? const_k_
          : c_coef_ - ceded_rate_coef(principle_, contract_,
                                      params_.claim_dist, u_at(s));
  return 1.0 + params_.eta * std::exp(params_.r * (params_.horizon - s)) * k;
}

double QKernel::A_at(double s) const {
  const double T = params_.horizon;
  if (s >= T) return 0.0;
  if (closed_form_a_) {
    const double tau = T - s;
    const double base = -std::expm1(-params_.alpha * tau) / params_.alpha;
    const double mixed = (std::exp(params_.r * tau) -
                          std::exp(-params_.alpha * tau)) /
                         (params_.r + params_.alpha);
    return base + params_.eta * const_k_ * mixed;
  }
  // A(s) = e^{alpha (s - t0)} W(s) with W interpolated on the suffix cache.
  const double w = interp_linear(s_grid_, a_suffix_, s);
  return std::exp(params_.alpha * (s - t0_)) * w;
}

double QKernel::claim_weight_at(double s) const {
  const double u = u_at(s);
  const double w1 = params_.eta * std::exp(params_.r * (params_.horizon - s));
  const double As = A_at(s);
  const auto& ell = params_.excitation;
  auto g = [&](double z) {
    return std::exp(w1 * contract_.retention(z, u) - As * ell(z));
  };
  const auto& dist = params_.claim_dist;
  switch (contract_.kind()) {
    case RetentionContract::Kind::Proportional:
      return dist.integrate(g);
    case RetentionContract::Kind::ExcessOfLoss:
      return dist.integrate_between(g, 0.0, u) +
             dist.integrate_between(g, u, dist.support_max());
    case RetentionContract::Kind::LimitedXL:
      return dist.integrate_between(g, 0.0, u) +
             dist.integrate_between(g, u, u + contract_.coverage()) +
             dist.integrate_between(g, u + contract_.coverage(),
                                    dist.support_max());
  }
  return 1.0;
}

double QKernel::margin_at(double s) const {
  return claim_weight_at(s) - a_at(s);
}

double QKernel::path_value(double lam,
                           const std::vector<JumpRecord>& events) const {
  if (s_grid_.empty()) return 1.0;  // t0 == T
  const double T = params_.horizon;
  // int a(s) (beta + (lam - beta) e^{-alpha(s-t0)}) ds
  double expo =
      (T - t0_) - params_.beta * int_a_ - (lam - params_.beta) * a_t0_;
  double seg_t = t0_;
  double seg_lam = lam;
  for (const auto& ev : events) {
    const double lam_pre =
        params_.beta + (seg_lam - params_.beta) *
                           std::exp(-params_.alpha * (ev.time - seg_t));
    if (ev.kind == JumpKind::Claim) {
      const double w1 = params_.eta * std::exp(params_.r * (T - ev.time));
      expo += std::log(lam_pre) +
              w1 * contract_.retention(ev.mark, u_at(ev.time)) -
              A_at(ev.time) * params_.excitation(ev.mark);
      seg_lam = lam_pre + params_.excitation(ev.mark);
    } else {
      expo -= A_at(ev.time) * ev.mark;
      seg_lam = lam_pre + ev.mark;
    }
    seg_t = ev.time;
  }
  return std::exp(expo);
}

std::vector<JumpRecord> QKernel::simulate_skeleton(Rng& rng) const {
  std::vector<JumpRecord> events;
  if (s_grid_.empty()) return events;
  double t = t0_;
  const double T = params_.horizon;
  while (true) {
    const double w_ext =
        params_.rho > 0.0 ? rng.exponential(params_.rho) : kInf;
    const double w_claim = rng.exponential(1.0);
    const double wait = std::min(w_claim, w_ext);
    if (t + wait > T) break;
    t += wait;
    if (w_claim <= w_ext)
      events.push_back({t, JumpKind::Claim, params_.claim_dist.sample(rng)});
    else
      events.push_back({t, JumpKind::External, params_.ext_dist.sample(rng)});
  }
  return events;
}

Estimate estimate_phi_q(const ModelParams& params, double t, double lam,
                        const Policy& policy,
                        const RetentionContract& contract,
                        const PremiumPrinciple& principle, std::size_t n_paths,
                        std::uint64_t seed, int workers) {
  if (!(lam > 0.0)) throw ConfigError("estimate_phi_q: lambda must be > 0");
  if (n_paths == 0) throw ConfigError("estimate_phi_q: n_paths must be > 0");
  QKernel kernel(params, t, policy, contract, principle);
  if (t >= params.horizon) return Estimate{1.0, 0.0, n_paths};

  std::vector<double> values(n_paths);
  parallel_for(
      n_paths,
      [&](std::size_t i) {
        Rng rng(derive_stream(seed, i));
        const auto events = kernel.simulate_skeleton(rng);
        values[i] = kernel.path_value(lam, events);
      },
      workers);
  const MeanStderr ms = mean_stderr(values);
  return Estimate{ms.mean, ms.stderr_, n_paths};
}

}  // namespace contagion
