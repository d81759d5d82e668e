#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace contagion {

/// Values on a rectangular (t, lambda) grid with bilinear interpolation.
/// Queries outside the grid are clamped (flat extrapolation).
class GridTable {
 public:
  GridTable() = default;
  GridTable(std::vector<double> t_grid, std::vector<double> lambda_grid,
            double fill = 0.0);

  const std::vector<double>& t_grid() const { return t_; }
  const std::vector<double>& lambda_grid() const { return lambda_; }
  std::size_t nt() const { return t_.size(); }
  std::size_t nl() const { return lambda_.size(); }

  double at(std::size_t i, std::size_t j) const { return v_[i * nl() + j]; }
  double& at(std::size_t i, std::size_t j) { return v_[i * nl() + j]; }

  double interpolate(double t, double lam) const;
  /// Interpolates along lambda only, on the grid row t_grid()[i].
  double interpolate_row(std::size_t i, double lam) const;

  std::span<const double> values() const { return v_; }
  std::span<double> values() { return v_; }

 private:
  std::vector<double> t_;
  std::vector<double> lambda_;
  std::vector<double> v_;
};

/// Reduced value function phi(t, lambda) > 0 with per-cell Monte Carlo
/// standard errors. phi(T, .) = 1.
struct PhiTable {
  GridTable phi;
  GridTable stderr_;

  void validate() const;  // positivity and terminal condition
};

enum class FocRegion { MaxReinsurance, Interior, NullReinsurance };

std::string to_string(FocRegion region);
FocRegion foc_region_from_string(const std::string& s);

/// Strategy u(t, lambda) on a grid, with the clamping region recorded per
/// cell.
struct PolicyTable {
  GridTable u;
  std::vector<FocRegion> regions;  // row-major, same layout as u

  FocRegion region_at(std::size_t i, std::size_t j) const {
    return regions[i * u.nl() + j];
  }
};

}  // namespace contagion
