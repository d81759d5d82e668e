#include "contagion/contracts.hpp"

#include <cmath>
#include <sstream>

#include "contagion/errors.hpp"

namespace contagion {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

RetentionContract RetentionContract::proportional() {
  return RetentionContract(Kind::Proportional, 0.0, 0.0, 1.0, 1.0);
}

RetentionContract RetentionContract::excess_of_loss(double u_cap) {
  if (!(u_cap > 0.0))
    throw ConfigError("excess-of-loss contract requires u_cap > 0");
  return RetentionContract(Kind::ExcessOfLoss, 0.0, 0.0, kInf, u_cap);
}

RetentionContract RetentionContract::limited_xl(double coverage,
                                                double u_cap) {
  if (!(coverage > 0.0))
    throw ConfigError("limited excess-of-loss contract requires coverage > 0");
  if (!(u_cap > 0.0))
    throw ConfigError("limited excess-of-loss contract requires u_cap > 0");
  return RetentionContract(Kind::LimitedXL, coverage, 0.0, kInf, u_cap);
}

double RetentionContract::retention(double z, double u) const {
  switch (kind_) {
    case Kind::Proportional:
      return u * z;
    case Kind::ExcessOfLoss:
      return std::min(u, z);
    case Kind::LimitedXL:
      return z - std::max(z - u, 0.0) + std::max(z - u - coverage_, 0.0);
  }
  return z;
}

double RetentionContract::retention_deriv(double z, double u) const {
  switch (kind_) {
    case Kind::Proportional:
      return z;
    case Kind::ExcessOfLoss:
      return z > u ? 1.0 : 0.0;
    case Kind::LimitedXL:
      return (z > u && z < u + coverage_) ? 1.0 : 0.0;
  }
  return 0.0;
}

void RetentionContract::check_control(double u) const {
  if (!(u >= u_min_) || !(u <= u_max_)) {
    std::ostringstream os;
    os << "control u=" << u << " outside [" << u_min_ << ", " << u_max_
       << "] for " << describe();
    throw ConfigError(os.str());
  }
}

std::string RetentionContract::describe() const {
  switch (kind_) {
    case Kind::Proportional:
      return "proportional";
    case Kind::ExcessOfLoss:
      return "excess_of_loss";
    case Kind::LimitedXL: {
      std::ostringstream os;
      os << "limited_xl(beta_m=" << coverage_ << ")";
      return os.str();
    }
  }
  return "";
}

PremiumPrinciple PremiumPrinciple::evp(double theta_i, double theta_r) {
  if (!(theta_i > 0.0) || !(theta_r > 0.0))
    throw ConfigError("EVP loadings must be > 0");
  PremiumPrinciple p;
  p.kind = Kind::EVP;
  p.theta_i = theta_i;
  p.theta_r = theta_r;
  return p;
}

PremiumPrinciple PremiumPrinciple::vpp(double eta_i, double eta_r) {
  if (!(eta_i > 0.0) || !(eta_r > 0.0))
    throw ConfigError("VPP loadings must be > 0");
  PremiumPrinciple p;
  p.kind = Kind::VPP;
  p.eta_i = eta_i;
  p.eta_r = eta_r;
  return p;
}

PremiumPrinciple PremiumPrinciple::mvp(double theta_i, double eta_i,
                                       double theta_r, double eta_r) {
  if (!(theta_i > 0.0) || !(eta_i > 0.0) || !(theta_r > 0.0) ||
      !(eta_r > 0.0))
    throw ConfigError("MVP loadings must be > 0");
  PremiumPrinciple p;
  p.kind = Kind::MVP;
  p.theta_i = theta_i;
  p.eta_i = eta_i;
  p.theta_r = theta_r;
  p.eta_r = eta_r;
  return p;
}

std::string PremiumPrinciple::describe() const {
  std::ostringstream os;
  switch (kind) {
    case Kind::EVP:
      os << "evp(theta_i=" << theta_i << ", theta_r=" << theta_r << ")";
      break;
    case Kind::VPP:
      os << "vpp(eta_i=" << eta_i << ", eta_r=" << eta_r << ")";
      break;
    case Kind::MVP:
      os << "mvp(theta_i=" << theta_i << ", eta_i=" << eta_i
         << ", theta_r=" << theta_r << ", eta_r=" << eta_r << ")";
      break;
  }
  return os.str();
}

double ceded_moment(const RetentionContract& contract,
                    const MarkDistribution& dist, double u, int order) {
  if (order != 1 && order != 2)
    throw ConfigError("ceded_moment: order must be 1 or 2");
  contract.check_control(u);
  switch (contract.kind()) {
    case RetentionContract::Kind::Proportional: {
      const double keep = 1.0 - u;
      return order == 1 ? keep * dist.mean()
                        : keep * keep * dist.second_moment();
    }
    case RetentionContract::Kind::ExcessOfLoss: {
      auto f = [&](double z) {
        const double c = z - u;
        return order == 1 ? c : c * c;
      };
      return dist.integrate_between(f, u, dist.support_max());
    }
    case RetentionContract::Kind::LimitedXL: {
      const double bm = contract.coverage();
      auto mid = [&](double z) {
        const double c = z - u;
        return order == 1 ? c : c * c;
      };
      const double cap = order == 1 ? bm : bm * bm;
      return dist.integrate_between(mid, u, u + bm) +
             dist.integrate_between([&](double) { return cap; }, u + bm,
                                    dist.support_max());
    }
  }
  return 0.0;
}

double ceded_moment_deriv(const RetentionContract& contract,
                          const MarkDistribution& dist, double u, int order) {
  if (order != 1 && order != 2)
    throw ConfigError("ceded_moment_deriv: order must be 1 or 2");
  contract.check_control(u);
  // d/du E[(z - Phi)^k] = -k E[(z - Phi)^{k-1} dPhi/du]
  switch (contract.kind()) {
    case RetentionContract::Kind::Proportional:
      return order == 1 ? -dist.mean()
                        : -2.0 * (1.0 - u) * dist.second_moment();
    case RetentionContract::Kind::ExcessOfLoss: {
      if (order == 1) return -(1.0 - dist.cdf(u));
      return -2.0 * dist.integrate_between([&](double z) { return z - u; }, u,
                                           dist.support_max());
    }
    case RetentionContract::Kind::LimitedXL: {
      const double bm = contract.coverage();
      if (order == 1) return -(dist.cdf(u + bm) - dist.cdf(u));
      return -2.0 * dist.integrate_between([&](double z) { return z - u; }, u,
                                           u + bm);
    }
  }
  return 0.0;
}

double insurance_rate(const PremiumPrinciple& principle,
                      const MarkDistribution& claim_dist, double /*t*/,
                      double lam) {
  if (!(lam > 0.0)) throw ConfigError("insurance_rate: lambda must be > 0");
  switch (principle.kind) {
    case PremiumPrinciple::Kind::EVP:
      return (1.0 + principle.theta_i) * lam * claim_dist.mean();
    case PremiumPrinciple::Kind::VPP:
      return lam * (claim_dist.mean() +
                    principle.eta_i * claim_dist.second_moment());
    case PremiumPrinciple::Kind::MVP:
      return lam * ((1.0 + principle.theta_i) * claim_dist.mean() +
                    principle.eta_i * claim_dist.second_moment());
  }
  return 0.0;
}

double reinsurance_rate(const PremiumPrinciple& principle,
                        const RetentionContract& contract,
                        const MarkDistribution& claim_dist, double /*t*/,
                        double lam, double u) {
  if (!(lam > 0.0)) throw ConfigError("reinsurance_rate: lambda must be > 0");
  const double m1 = ceded_moment(contract, claim_dist, u, 1);
  switch (principle.kind) {
    case PremiumPrinciple::Kind::EVP:
      return (1.0 + principle.theta_r) * lam * m1;
    case PremiumPrinciple::Kind::VPP:
      return lam *
             (m1 + principle.eta_r * ceded_moment(contract, claim_dist, u, 2));
    case PremiumPrinciple::Kind::MVP:
      return lam * ((1.0 + principle.theta_r) * m1 +
                    principle.eta_r * ceded_moment(contract, claim_dist, u, 2));
  }
  return 0.0;
}

double reinsurance_rate_deriv(const PremiumPrinciple& principle,
                              const RetentionContract& contract,
                              const MarkDistribution& claim_dist, double /*t*/,
                              double lam, double u) {
  if (!(lam > 0.0))
    throw ConfigError("reinsurance_rate_deriv: lambda must be > 0");
  const double d1 = ceded_moment_deriv(contract, claim_dist, u, 1);
  switch (principle.kind) {
    case PremiumPrinciple::Kind::EVP:
      return (1.0 + principle.theta_r) * lam * d1;
    case PremiumPrinciple::Kind::VPP:
      return lam * (d1 + principle.eta_r *
                             ceded_moment_deriv(contract, claim_dist, u, 2));
    case PremiumPrinciple::Kind::MVP:
      return lam * ((1.0 + principle.theta_r) * d1 +
                    principle.eta_r *
                        ceded_moment_deriv(contract, claim_dist, u, 2));
  }
  return 0.0;
}

}  // namespace contagion
