#include "contagion/tables.hpp"

#include <algorithm>
#include <cmath>

#include "contagion/errors.hpp"
#include "contagion/numerics.hpp"

namespace contagion {

GridTable::GridTable(std::vector<double> t_grid,
                     std::vector<double> lambda_grid, double fill)
    : t_(std::move(t_grid)), lambda_(std::move(lambda_grid)) {
  if (t_.size() < 2 || lambda_.size() < 2)
    throw ConfigError("grid table needs at least 2 points per axis");
  if (!std::is_sorted(t_.begin(), t_.end()) ||
      !std::is_sorted(lambda_.begin(), lambda_.end()))
    throw ConfigError("grid axes must be ascending");
  v_.assign(t_.size() * lambda_.size(), fill);
}

double GridTable::interpolate(double t, double lam) const {
  const std::size_t i = bracket_index(t_, t);
  const std::size_t j = bracket_index(lambda_, lam);
  const double tt =
      std::clamp((t - t_[i]) / (t_[i + 1] - t_[i]), 0.0, 1.0);
  const double tl =
      std::clamp((lam - lambda_[j]) / (lambda_[j + 1] - lambda_[j]), 0.0, 1.0);
  const double v00 = at(i, j), v01 = at(i, j + 1);
  const double v10 = at(i + 1, j), v11 = at(i + 1, j + 1);
  return (1.0 - tt) * ((1.0 - tl) * v00 + tl * v01) +
         tt * ((1.0 - tl) * v10 + tl * v11);
}

double GridTable::interpolate_row(std::size_t i, double lam) const {
  const std::size_t j = bracket_index(lambda_, lam);
  const double tl =
      std::clamp((lam - lambda_[j]) / (lambda_[j + 1] - lambda_[j]), 0.0, 1.0);
  return (1.0 - tl) * at(i, j) + tl * at(i, j + 1);
}

void PhiTable::validate() const {
  for (double v : phi.values())
    if (!(v > 0.0)) throw ConfigError("phi table entries must be > 0");
  const std::size_t last = phi.nt() - 1;
  for (std::size_t j = 0; j < phi.nl(); ++j)
    if (std::abs(phi.at(last, j) - 1.0) > 1e-12)
      throw ConfigError("phi(T, .) must equal 1");
}

std::string to_string(FocRegion region) {
  switch (region) {
    case FocRegion::MaxReinsurance:
      return "A0";
    case FocRegion::Interior:
      return "interior";
    case FocRegion::NullReinsurance:
      return "A1";
  }
  return "interior";
}

FocRegion foc_region_from_string(const std::string& s) {
  if (s == "A0") return FocRegion::MaxReinsurance;
  if (s == "A1") return FocRegion::NullReinsurance;
  if (s == "interior") return FocRegion::Interior;
  throw ConfigError("unknown region label: " + s);
}

}  // namespace contagion
