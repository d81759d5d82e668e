#include "contagion/model.hpp"

#include "contagion/errors.hpp"

namespace contagion {

SelfExcitation SelfExcitation::constant(double a) {
  if (!(a >= 0.0)) throw ConfigError("self-excitation constant must be >= 0");
  return SelfExcitation(Form::Constant, a);
}

SelfExcitation SelfExcitation::linear(double a) {
  if (!(a >= 0.0))
    throw ConfigError("self-excitation linear coefficient must be >= 0");
  return SelfExcitation(Form::Linear, a);
}

double SelfExcitation::mean_under(const MarkDistribution& dist) const {
  switch (form_) {
    case Form::Zero:
      return 0.0;
    case Form::Constant:
      return coeff_;
    case Form::Linear:
      return coeff_ * dist.mean();
  }
  return 0.0;
}

std::string SelfExcitation::describe() const {
  switch (form_) {
    case Form::Zero:
      return "zero";
    case Form::Constant:
      return "constant(" + std::to_string(coeff_) + ")";
    case Form::Linear:
      return "linear(" + std::to_string(coeff_) + ")";
  }
  return "zero";
}

void ModelParams::validate() const {
  if (!(alpha > 0.0)) throw ConfigError("model.alpha must be > 0");
  if (!(beta > 0.0)) throw ConfigError("model.beta must be > 0");
  if (!(lambda0 > 0.0)) throw ConfigError("model.lambda0 must be > 0");
  if (!(rho >= 0.0)) throw ConfigError("model.rho must be >= 0");
  if (!(r >= 0.0)) throw ConfigError("model.r must be >= 0");
  if (!(eta > 0.0)) throw ConfigError("model.eta must be > 0");
  if (!(horizon > 0.0)) throw ConfigError("model.horizon must be > 0");
  if (!unsafe_moments) {
    if (!claim_dist.bounded_support())
      throw ConfigError(
          "model.claim_dist has unbounded support; set unsafe_moments to "
          "accept it");
    if (!ext_dist.bounded_support())
      throw ConfigError(
          "model.ext_dist has unbounded support; set unsafe_moments to "
          "accept it");
  }
}

std::size_t PathRecord::claim_count() const {
  std::size_t n = 0;
  for (const auto& j : jumps)
    if (j.kind == JumpKind::Claim) ++n;
  return n;
}

void PathRecord::validate() const {
  double prev = t_start;
  for (const auto& j : jumps) {
    if (!(j.time > prev))
      throw ConfigError("path jumps must be strictly increasing in time");
    if (j.time > horizon)
      throw ConfigError("path jump beyond the horizon");
    if (!(j.mark >= 0.0)) throw ConfigError("path mark must be >= 0");
    prev = j.time;
  }
}

}  // namespace contagion
