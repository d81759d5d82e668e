#include "contagion/stats.hpp"

#include <algorithm>
#include <cmath>

#include "contagion/errors.hpp"

namespace contagion {

namespace {

/// Survival function of the Kolmogorov distribution.
double kolmogorov_sf(double x) {
  if (x < 0.2) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * x * x);
    sum += (k % 2 == 1 ? term : -term);
    if (term < 1e-16) break;
  }
  return std::clamp(2.0 * sum, 0.0, 1.0);
}

double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 500; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-15) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 500; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw NumericError("gamma_q: invalid arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_contfrac(a, x);
}

KsResult ks_test_exponential(std::span<const double> sample) {
  KsResult out;
  out.n = sample.size();
  if (out.n == 0) return out;
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(out.n);
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double cdf = -std::expm1(-sorted[i]);
    const double lo = static_cast<double>(i) / n;
    const double hi = static_cast<double>(i + 1) / n;
    d = std::max(d, std::max(cdf - lo, hi - cdf));
  }
  out.statistic = d;
  const double sqrt_n = std::sqrt(n);
  out.p_value = kolmogorov_sf((sqrt_n + 0.12 + 0.11 / sqrt_n) * d);
  return out;
}

Chi2Result chi2_poisson_test(std::span<const std::size_t> counts,
                             double mean) {
  Chi2Result out;
  std::size_t total = 0;
  for (std::size_t c : counts) total += c;
  if (total == 0) return out;

  const std::size_t cells = counts.size();
  std::vector<double> expected(cells);
  double pmf = std::exp(-mean);  // P(N = 0)
  double tail = 1.0;
  for (std::size_t k = 0; k + 1 < cells; ++k) {
    expected[k] = pmf * static_cast<double>(total);
    tail -= pmf;
    pmf *= mean / static_cast<double>(k + 1);
  }
  expected[cells - 1] = std::max(tail, 0.0) * static_cast<double>(total);

  // Merge sparse cells from the right so each expected count is >= 5.
  std::vector<double> obs_m, exp_m;
  double obs_acc = 0.0, exp_acc = 0.0;
  for (std::size_t k = cells; k-- > 0;) {
    obs_acc += static_cast<double>(counts[k]);
    exp_acc += expected[k];
    if (exp_acc >= 5.0 || k == 0) {
      obs_m.push_back(obs_acc);
      exp_m.push_back(exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  if (exp_m.size() >= 2 && exp_m.back() < 5.0) {
    exp_m[exp_m.size() - 2] += exp_m.back();
    obs_m[obs_m.size() - 2] += obs_m.back();
    exp_m.pop_back();
    obs_m.pop_back();
  }

  double stat = 0.0;
  for (std::size_t k = 0; k < exp_m.size(); ++k) {
    const double diff = obs_m[k] - exp_m[k];
    stat += diff * diff / exp_m[k];
  }
  out.statistic = stat;
  out.dof = static_cast<int>(exp_m.size()) - 1;
  if (out.dof < 1) {
    out.dof = 0;
    out.p_value = 1.0;
    return out;
  }
  out.p_value = gamma_q(0.5 * out.dof, 0.5 * stat);
  return out;
}

}  // namespace contagion
