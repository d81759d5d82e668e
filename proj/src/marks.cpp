#include "contagion/marks.hpp"

#include <cmath>
#include <sstream>

#include "contagion/errors.hpp"
#include "contagion/numerics.hpp"

namespace contagion {

namespace {

constexpr int kQuadOrder = 64;

}  // namespace

MarkDistribution MarkDistribution::uniform(double a, double b) {
  if (!(a >= 0.0) || !(b > a))
    throw ConfigError("uniform mark distribution requires 0 <= a < b");
  MarkDistribution d;
  d.family_ = Family::Uniform;
  d.p1_ = a;
  d.p2_ = b;
  d.mean_ = 0.5 * (a + b);
  d.second_moment_ = (a * a + a * b + b * b) / 3.0;
  d.support_max_ = b;
  d.quad_lo_ = a;
  d.quad_hi_ = b;
  const auto& rule = gauss_legendre(kQuadOrder);
  for (int i = 0; i < kQuadOrder; ++i) {
    d.nodes_.push_back(0.5 * (a + b) + 0.5 * (b - a) * rule.nodes[i]);
    d.weights_.push_back(0.5 * rule.weights[i]);  // density 1/(b-a) absorbed
  }
  return d;
}

MarkDistribution MarkDistribution::truncated_exponential(double rate,
                                                         double cap,
                                                         bool allow_unbounded) {
  if (!(rate > 0.0) || !(cap > 0.0))
    throw ConfigError(
        "truncated exponential mark distribution requires rate > 0, cap > 0");
  if (std::isinf(cap) && !allow_unbounded)
    throw ConfigError(
        "unbounded mark support requires the unsafe-moments opt-in "
        "(truncexp cap = inf)");
  MarkDistribution d;
  d.family_ = Family::TruncatedExponential;
  d.p1_ = rate;
  d.p2_ = cap;
  if (std::isinf(cap)) {
    d.mean_ = 1.0 / rate;
    d.second_moment_ = 2.0 / (rate * rate);
    d.support_max_ = cap;
    // The quadrature window truncates the far tail; mass beyond it is below
    // double precision.
    d.quad_lo_ = 0.0;
    d.quad_hi_ = 40.0 / rate;
  } else {
    const double norm = -std::expm1(-rate * cap);
    d.mean_ = 1.0 / rate - cap * std::exp(-rate * cap) / norm;
    // E[Z^2] = 2/rate^2 - (cap^2 + 2 cap / rate) e^{-rate cap} / norm
    d.second_moment_ = 2.0 / (rate * rate) -
                       (cap * cap + 2.0 * cap / rate) *
                           std::exp(-rate * cap) / norm;
    d.support_max_ = cap;
    d.quad_lo_ = 0.0;
    d.quad_hi_ = cap;
  }
  const auto& rule = gauss_legendre(kQuadOrder);
  const double mid = 0.5 * (d.quad_lo_ + d.quad_hi_);
  const double half = 0.5 * (d.quad_hi_ - d.quad_lo_);
  for (int i = 0; i < kQuadOrder; ++i) {
    const double z = mid + half * rule.nodes[i];
    d.nodes_.push_back(z);
    d.weights_.push_back(half * rule.weights[i] * d.density(z));
  }
  return d;
}

MarkDistribution MarkDistribution::point_mass(double z0) {
  if (!(z0 >= 0.0))
    throw ConfigError("point mass mark distribution requires z0 >= 0");
  MarkDistribution d;
  d.family_ = Family::PointMass;
  d.p1_ = z0;
  d.mean_ = z0;
  d.second_moment_ = z0 * z0;
  d.support_max_ = z0;
  d.nodes_ = {z0};
  d.weights_ = {1.0};
  return d;
}

std::string MarkDistribution::describe() const {
  std::ostringstream os;
  switch (family_) {
    case Family::Uniform:
      os << "uniform(" << p1_ << ", " << p2_ << ")";
      break;
    case Family::TruncatedExponential:
      os << "truncexp(rate=" << p1_ << ", cap=" << p2_ << ")";
      break;
    case Family::PointMass:
      os << "pointmass(" << p1_ << ")";
      break;
  }
  return os.str();
}

double MarkDistribution::density(double z) const {
  switch (family_) {
    case Family::Uniform:
      return (z >= p1_ && z <= p2_) ? 1.0 / (p2_ - p1_) : 0.0;
    case Family::TruncatedExponential: {
      if (z < 0.0 || z > p2_) return 0.0;
      const double norm = std::isinf(p2_) ? 1.0 : -std::expm1(-p1_ * p2_);
      return p1_ * std::exp(-p1_ * z) / norm;
    }
    case Family::PointMass:
      return 0.0;  // no density; handled separately
  }
  return 0.0;
}

double MarkDistribution::mgf(double a) const {
  switch (family_) {
    case Family::Uniform: {
      const double w = a * (p2_ - p1_);
      if (std::abs(w) < 1e-10)
        return std::exp(a * p1_) * (1.0 + 0.5 * w + w * w / 6.0);
      return (std::exp(a * p2_) - std::exp(a * p1_)) / w;
    }
    case Family::TruncatedExponential: {
      const double rate = p1_, cap = p2_;
      if (std::isinf(cap)) {
        if (a >= rate)
          throw NumericError("mgf of exponential diverges at a >= rate");
        return rate / (rate - a);
      }
      const double norm = -std::expm1(-rate * cap);
      const double d = rate - a;
      if (std::abs(d * cap) < 1e-10) return rate * cap / norm;
      return rate / d * (-std::expm1(-d * cap)) / norm;
    }
    case Family::PointMass:
      return std::exp(a * p1_);
  }
  return 1.0;
}

double MarkDistribution::cdf(double z) const {
  switch (family_) {
    case Family::Uniform:
      if (z <= p1_) return 0.0;
      if (z >= p2_) return 1.0;
      return (z - p1_) / (p2_ - p1_);
    case Family::TruncatedExponential: {
      if (z <= 0.0) return 0.0;
      if (z >= p2_) return 1.0;
      const double norm = std::isinf(p2_) ? 1.0 : -std::expm1(-p1_ * p2_);
      return -std::expm1(-p1_ * z) / norm;
    }
    case Family::PointMass:
      return z >= p1_ ? 1.0 : 0.0;
  }
  return 0.0;
}

double MarkDistribution::sample(Rng& rng) const {
  switch (family_) {
    case Family::Uniform:
      return rng.uniform(p1_, p2_);
    case Family::TruncatedExponential: {
      const double u = rng.uniform01();
      if (std::isinf(p2_)) return -std::log(u) / p1_;
      // Inverse cdf of the truncated law.
      const double norm = -std::expm1(-p1_ * p2_);
      return -std::log1p(-u * norm) / p1_;
    }
    case Family::PointMass:
      return p1_;
  }
  return 0.0;
}

double MarkDistribution::integrate(
    const std::function<double(double)>& g) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    acc += weights_[i] * g(nodes_[i]);
  return acc;
}

double MarkDistribution::integrate_between(
    const std::function<double(double)>& g, double a, double b) const {
  if (family_ == Family::PointMass)
    return (p1_ >= a && p1_ <= b) ? g(p1_) : 0.0;
  const double lo = std::max(a, quad_lo_);
  const double hi = std::min(b, quad_hi_);
  if (!(hi > lo)) return 0.0;
  const auto& rule = gauss_legendre(kQuadOrder);
  const double mid = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  double acc = 0.0;
  for (int i = 0; i < kQuadOrder; ++i) {
    const double z = mid + half * rule.nodes[i];
    acc += half * rule.weights[i] * density(z) * g(z);
  }
  return acc;
}

}  // namespace contagion
