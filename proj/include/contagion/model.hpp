#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "contagion/marks.hpp"

namespace contagion {

/// Self-excitation map: the claim-triggered intensity increment as a
/// function of the claim size. The zero form reproduces the Cox shot-noise
/// model.
class SelfExcitation {
 public:
  enum class Form { Zero, Constant, Linear };

  static SelfExcitation zero() { return SelfExcitation(Form::Zero, 0.0); }
  static SelfExcitation constant(double a);
  static SelfExcitation linear(double a);

  double operator()(double z) const {
    switch (form_) {
      case Form::Zero:
        return 0.0;
      case Form::Constant:
        return coeff_;
      case Form::Linear:
        return coeff_ * z;
    }
    return 0.0;
  }

  Form form() const { return form_; }
  double coeff() const { return coeff_; }
  bool is_zero() const { return form_ == Form::Zero || coeff_ == 0.0; }

  /// E[excitation(Z)] under the given mark law.
  double mean_under(const MarkDistribution& dist) const;
  std::string describe() const;

 private:
  SelfExcitation(Form form, double coeff) : form_(form), coeff_(coeff) {}

  Form form_;
  double coeff_;
};

/// All model constants: intensity dynamics, mark laws, self-excitation, and
/// the economic parameters (rate, risk aversion, horizon).
struct ModelParams {
  double alpha = 1.0;    // intensity decay rate
  double beta = 1.0;     // reversion level
  double lambda0 = 1.0;  // initial intensity
  double rho = 0.0;      // external event rate
  double r = 0.0;        // risk-free rate
  double eta = 1.0;      // risk aversion
  double horizon = 1.0;  // contract maturity T
  MarkDistribution claim_dist = MarkDistribution::uniform(0.0, 1.0);
  MarkDistribution ext_dist = MarkDistribution::uniform(0.0, 1.0);
  SelfExcitation excitation = SelfExcitation::zero();
  /// Permits unbounded mark supports. The exponential-moment conditions then
  /// hold only for arguments below the mark law's rate; the caller owns the
  /// check that eta * exp(r T) stays inside that bound.
  bool unsafe_moments = false;

  /// Throws ConfigError when an invariant fails.
  void validate() const;

  bool is_cox() const { return excitation.is_zero(); }
};

enum class JumpKind : std::uint8_t { Claim, External };

struct JumpRecord {
  double time = 0.0;
  JumpKind kind = JumpKind::Claim;
  double mark = 0.0;
};

/// One simulated realization: the ordered marked jumps of both types.
struct PathRecord {
  ModelParams params;
  std::vector<JumpRecord> jumps;  // strictly increasing times
  std::uint64_t seed = 0;
  double t_start = 0.0;
  double lambda_start = 0.0;
  double horizon = 0.0;

  std::size_t claim_count() const;

  /// Throws ConfigError if jump times are not strictly increasing or leave
  /// (t_start, horizon].
  void validate() const;
};

}  // namespace contagion
