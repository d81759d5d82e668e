#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "contagion/errors.hpp"
#include "contagion/numerics.hpp"
#include "contagion/process.hpp"
#include "contagion/rng.hpp"
#include "contagion/stats.hpp"
#include "test_helpers.hpp"

using namespace contagion;
using namespace contagion::testing;

TEST_CASE("intensity_at evaluates the decay-plus-jumps formula") {
  ModelParams p = degenerate_poisson_params();
  p.alpha = 1.0;

  SUBCASE("lambda0 = beta kills the decay term") {
    p.beta = 2.0;
    p.lambda0 = 2.0;
    CHECK(intensity_at(p, {}, 5.0) == doctest::Approx(2.0).epsilon(1e-14));
  }

  SUBCASE("pure relaxation") {
    p.beta = 1.0;
    p.lambda0 = 3.0;
    CHECK(intensity_at(p, {}, 1.0) ==
          doctest::Approx(1.0 + 2.0 * std::exp(-1.0)).epsilon(1e-14));
  }

  SUBCASE("one external jump decays like the initial excess") {
    p.beta = 1.0;
    p.lambda0 = 1.0;
    std::vector<JumpRecord> jumps = {{1.0, JumpKind::External, 2.0}};
    CHECK(intensity_at(p, jumps, 2.0) ==
          doctest::Approx(1.0 + 2.0 * std::exp(-1.0)).epsilon(1e-14));
  }

  SUBCASE("cadlag at the jump time, left limit excludes it") {
    p.beta = 1.0;
    p.lambda0 = 1.0;
    std::vector<JumpRecord> jumps = {{1.0, JumpKind::External, 2.0}};
    CHECK(intensity_at(p, jumps, 1.0) == doctest::Approx(3.0));
    CHECK(intensity_at(p, jumps, 1.0, /*left_limit=*/true) ==
          doctest::Approx(1.0));
  }

  SUBCASE("unsorted jumps are rejected") {
    std::vector<JumpRecord> jumps = {{2.0, JumpKind::Claim, 1.0},
                                     {1.0, JumpKind::Claim, 1.0}};
    CHECK_THROWS_AS(intensity_at(p, jumps, 3.0), ConfigError);
  }
}

TEST_CASE("compensator_between closed form and inversion") {
  ModelParams p = degenerate_poisson_params();
  p.alpha = 1.0;
  p.beta = 1.0;

  CHECK(compensator_between(p, 5.0, 0.0) == 0.0);
  CHECK(compensator_between(p, p.beta, 3.0) ==
        doctest::Approx(p.beta * 3.0).epsilon(1e-14));
  CHECK(compensator_between(p, 3.0, 1.0) ==
        doctest::Approx(1.0 + 2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-14));
  CHECK_THROWS_AS(compensator_between(p, 1.0, -0.5), ConfigError);

  SUBCASE("monotone in h") {
    double prev = 0.0;
    for (double h = 0.1; h < 5.0; h += 0.1) {
      const double v = compensator_between(p, 0.5, h);
      CHECK(v >= prev);
      prev = v;
    }
  }

  SUBCASE("inversion round-trips for random states") {
    Rng rng(7);
    ModelParams q = p;
    q.alpha = 2.3;
    q.beta = 0.7;
    for (int i = 0; i < 200; ++i) {
      const double lam = 0.05 + 5.0 * rng.uniform01();
      const double target = 8.0 * rng.uniform01();
      const double h = invert_compensator(q, lam, target);
      CHECK(compensator_between(q, lam, h) ==
            doctest::Approx(target).epsilon(1e-10));
    }
  }
}

TEST_CASE("mean_intensity closed form") {
  SUBCASE("pure relaxation when there are no upward jumps") {
    ModelParams p = degenerate_poisson_params();
    p.alpha = 1.3;
    p.beta = 1.0;
    p.lambda0 = 3.0;
    const double t = 0.8;
    CHECK(mean_intensity(p, t) ==
          doctest::Approx(p.beta + (p.lambda0 - p.beta) *
                                       std::exp(-p.alpha * t))
              .epsilon(1e-14));
  }

  SUBCASE("critical case grows linearly") {
    ModelParams p = contagion_params();
    p.alpha = 0.5;  // E[ell(Z)] = 0.5 = alpha, so kappa = 0
    const double slope = p.alpha * p.beta + p.rho * p.ext_dist.mean();
    CHECK(mean_intensity(p, 2.0) ==
          doctest::Approx(p.lambda0 + slope * 2.0).epsilon(1e-10));
  }

  SUBCASE("contagion value at t = 1") {
    const ModelParams p = contagion_params();
    // kappa = 2 - 0.5 = 1.5, m_inf = (2 + 0.25)/1.5 = 1.5
    CHECK(mean_intensity(p, 1.0) ==
          doctest::Approx(1.5 - 0.5 * std::exp(-1.5)).epsilon(1e-12));
    CHECK(mean_intensity(p, 1.0) == doctest::Approx(1.38843).epsilon(1e-5));
  }

  SUBCASE("matches an RK4 integration of the moment equation") {
    const ModelParams p = contagion_params();
    const double ell_mean = p.excitation.mean_under(p.claim_dist);
    auto f = [&](double, double m) {
      return p.alpha * (p.beta - m) + ell_mean * m + p.rho * p.ext_dist.mean();
    };
    const double oracle = rk4(f, p.lambda0, 1.0, 2000);
    CHECK(mean_intensity(p, 1.0) == doctest::Approx(oracle).epsilon(1e-9));
  }
}

TEST_CASE("simulate_exact: degenerate configuration is homogeneous Poisson") {
  ModelParams p = degenerate_poisson_params(2.0, 10.0);
  const std::size_t n = 4000;
  std::vector<double> counts(n);
  for (std::size_t i = 0; i < n; ++i)
    counts[i] = static_cast<double>(
        simulate_exact(p, derive_stream(11, i)).claim_count());
  const auto ms = mean_stderr(counts);
  const double expected = p.beta * p.horizon;
  CHECK(std::abs(ms.mean - expected) <= 3.0 * ms.stderr_);

  SUBCASE("time-changed interarrivals pass KS against Exponential(1)") {
    const auto sample = pooled_time_change_sample(p, 12, 8000, 2000);
    REQUIRE(sample.size() >= 8000);
    const auto ks = ks_test_exponential(sample);
    CHECK(ks.p_value > 0.01);
  }
}

TEST_CASE("simulate_exact: low-rate regime can produce empty paths") {
  ModelParams p = degenerate_poisson_params(0.01, 1.0);
  p.lambda0 = 0.01;
  std::size_t empty = 0;
  for (std::size_t i = 0; i < 50; ++i) {
    const auto path = simulate_exact(p, derive_stream(5, i));
    path.validate();
    if (path.jumps.empty()) ++empty;
  }
  CHECK(empty > 40);  // e^{-0.01} per path
}

TEST_CASE("simulate_exact mean claim count matches the moment ODE") {
  const ModelParams p = contagion_params(10.0);
  // E[N_T] = int_0^T m(s) ds, via fine Simpson on the closed form.
  const double expected =
      simpson([&](double s) { return mean_intensity(p, s); }, 0.0, p.horizon,
              2000);
  const std::size_t n = 20000;
  std::vector<double> counts(n);
  for (std::size_t i = 0; i < n; ++i)
    counts[i] = static_cast<double>(
        simulate_exact(p, derive_stream(21, i)).claim_count());
  const auto ms = mean_stderr(counts);
  CHECK(std::abs(ms.mean - expected) <= 3.0 * ms.stderr_);
}

TEST_CASE("determinism: identical (params, seed) gives identical paths") {
  const ModelParams p = contagion_params(5.0);
  const auto a = simulate_exact(p, 987654321);
  const auto b = simulate_exact(p, 987654321);
  REQUIRE(a.jumps.size() == b.jumps.size());
  for (std::size_t i = 0; i < a.jumps.size(); ++i) {
    CHECK(a.jumps[i].time == b.jumps[i].time);
    CHECK(a.jumps[i].kind == b.jumps[i].kind);
    CHECK(a.jumps[i].mark == b.jumps[i].mark);
  }
  const auto c = simulate_thinning(p, 13579, 0.05);
  const auto d = simulate_thinning(p, 13579, 0.05);
  REQUIRE(c.jumps.size() == d.jumps.size());
  for (std::size_t i = 0; i < c.jumps.size(); ++i)
    CHECK(c.jumps[i].time == d.jumps[i].time);
}

TEST_CASE("unbounded mark support needs the explicit opt-in") {
  CHECK_THROWS_AS(MarkDistribution::truncated_exponential(
                      1.0, std::numeric_limits<double>::infinity()),
                  ConfigError);
  const auto d = MarkDistribution::truncated_exponential(
      2.0, std::numeric_limits<double>::infinity(), /*allow_unbounded=*/true);
  CHECK(d.mean() == doctest::Approx(0.5));
  CHECK_FALSE(d.bounded_support());
  ModelParams p = contagion_params(1.0);
  p.ext_dist = d;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p.unsafe_moments = true;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("thinning agrees with the exact simulator") {
  SUBCASE("constant-intensity case reduces to plain Poisson sampling") {
    ModelParams p = degenerate_poisson_params(2.0, 10.0);
    std::vector<double> counts;
    for (std::size_t i = 0; i < 4000; ++i)
      counts.push_back(static_cast<double>(
          simulate_thinning(p, derive_stream(31, i)).claim_count()));
    const auto ms = mean_stderr(counts);
    CHECK(std::abs(ms.mean - 20.0) <= 3.0 * ms.stderr_);
  }

  SUBCASE("claim count distribution matches Poisson (chi-square)") {
    ModelParams p = degenerate_poisson_params(2.0, 3.0);
    std::vector<std::size_t> histogram(20, 0);
    const std::size_t n = 20000;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c =
          simulate_thinning(p, derive_stream(32, i)).claim_count();
      ++histogram[std::min(c, histogram.size() - 1)];
    }
    const auto chi2 = chi2_poisson_test(histogram, p.beta * p.horizon);
    CHECK(chi2.p_value > 0.01);
  }

  SUBCASE("two-sample mean comparison in the contagion model") {
    const ModelParams p = contagion_params(5.0);
    const std::size_t n = 20000;
    std::vector<double> exact_counts(n), thin_counts(n);
    for (std::size_t i = 0; i < n; ++i) {
      exact_counts[i] = static_cast<double>(
          simulate_exact(p, derive_stream(41, i)).claim_count());
      thin_counts[i] = static_cast<double>(
          simulate_thinning(p, derive_stream(42, i), 0.1).claim_count());
    }
    const auto a = mean_stderr(exact_counts);
    const auto b = mean_stderr(thin_counts);
    const double sigma =
        std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
    CHECK(std::abs(a.mean - b.mean) <= 3.0 * sigma);
  }
}

TEST_CASE("intensity stays above min(lambda0, beta)") {
  ModelParams p = contagion_params(5.0);
  p.lambda0 = 0.3;  // below beta: intensity climbs toward beta
  const double floor = std::min(p.lambda0, p.beta);
  for (std::size_t i = 0; i < 50; ++i) {
    const auto path = simulate_exact(p, derive_stream(55, i));
    for (double t = 0.0; t <= p.horizon; t += 0.05)
      CHECK(intensity_at(p, path.jumps, t) >= floor - 1e-12);
  }
}

TEST_CASE("time-change property in the contagion model") {
  const ModelParams p = contagion_params(10.0);
  const auto increments = pooled_time_change_sample(p, 61, 12000, 5000);
  const auto ks = ks_test_exponential(increments);
  CHECK(ks.n >= 10000);
  CHECK(ks.p_value > 0.01);
}

TEST_CASE("log_density_ratio") {
  SUBCASE("unit intensity with no claims gives log L = 0") {
    ModelParams p = degenerate_poisson_params(1.0, 2.0);
    PathRecord path;
    path.params = p;
    path.lambda_start = p.lambda0;
    path.horizon = p.horizon;
    CHECK(log_density_ratio(p, path) == doctest::Approx(0.0).epsilon(1e-14));
  }

  SUBCASE("no claims: T minus the intensity integral") {
    ModelParams p = degenerate_poisson_params();
    p.alpha = 1.7;
    p.beta = 0.8;
    p.lambda0 = 2.5;
    p.horizon = 3.0;
    PathRecord path;
    path.params = p;
    path.lambda_start = p.lambda0;
    path.horizon = p.horizon;
    const double integral = compensator_between(p, p.lambda0, p.horizon);
    CHECK(log_density_ratio(p, path) ==
          doctest::Approx(p.horizon - integral).epsilon(1e-12));
  }

  SUBCASE("one claim at constant intensity 2") {
    ModelParams p = degenerate_poisson_params(2.0, 2.0);
    PathRecord path;
    path.params = p;
    path.lambda_start = p.lambda0;
    path.horizon = p.horizon;
    path.jumps = {{1.0, JumpKind::Claim, 0.4}};
    CHECK(log_density_ratio(p, path) ==
          doctest::Approx(-2.0 + std::log(2.0)).epsilon(1e-12));
    CHECK(log_density_ratio(p, path) == doctest::Approx(-1.30685).epsilon(1e-5));
  }
}

TEST_CASE("exp(log_density_ratio) is a reference-measure martingale") {
  // Simulate under the reference measure (unit-rate claims, rate-rho
  // externals); the density ratio then has expectation one.
  const ModelParams p = contagion_params(1.0);
  const std::size_t n = 50000;
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(derive_stream(81, i));
    PathRecord path;
    path.params = p;
    path.t_start = 0.0;
    path.lambda_start = p.lambda0;
    path.horizon = p.horizon;
    double t = 0.0;
    while (true) {
      const double w_ext = p.rho > 0.0
                               ? rng.exponential(p.rho)
                               : std::numeric_limits<double>::infinity();
      const double w_claim = rng.exponential(1.0);
      const double wait = std::min(w_claim, w_ext);
      if (t + wait > p.horizon) break;
      t += wait;
      if (w_claim <= w_ext)
        path.jumps.push_back({t, JumpKind::Claim, p.claim_dist.sample(rng)});
      else
        path.jumps.push_back({t, JumpKind::External, p.ext_dist.sample(rng)});
    }
    weights[i] = std::exp(log_density_ratio(p, path));
  }
  const auto ms = mean_stderr(weights);
  CHECK(std::abs(ms.mean - 1.0) <= 3.0 * ms.stderr_);
}

TEST_CASE("generator identities against Monte Carlo (Dynkin)") {
  const ModelParams p = contagion_params(1.0);
  const std::size_t n = 30000;
  std::vector<double> gap1(n), gap2(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto path = simulate_exact(p, derive_stream(71, i));
    const double lam_T = intensity_at(p, path.jumps, p.horizon);
    // f(lambda) = lambda: integral of L f along the path has closed form
    // alpha beta T + rho E[Z2] T + (E[ell] - alpha) int lambda.
    const double int_lam = integrated_intensity(p, path, 0.0, p.horizon, 1);
    const double int_lam2 = integrated_intensity(p, path, 0.0, p.horizon, 2);
    const double ell_mean = p.excitation.mean_under(p.claim_dist);
    const double gen1 =
        (p.alpha * p.beta + p.rho * p.ext_dist.mean()) * p.horizon +
        (ell_mean - p.alpha) * int_lam;
    gap1[i] = lam_T - p.lambda0 - gen1;
    // f(lambda) = lambda^2 via the quadratic generator coefficients.
    const double ell2 = p.excitation.coeff() * p.excitation.coeff() *
                        p.claim_dist.second_moment();
    const double int_gen2 =
        2.0 * p.alpha * p.beta * int_lam - 2.0 * p.alpha * int_lam2 +
        2.0 * ell_mean * int_lam2 + ell2 * int_lam +
        p.rho * (2.0 * p.ext_dist.mean() * int_lam +
                 p.ext_dist.second_moment() * p.horizon);
    gap2[i] = lam_T * lam_T - p.lambda0 * p.lambda0 - int_gen2;
  }
  const auto m1 = mean_stderr(gap1);
  const auto m2 = mean_stderr(gap2);
  CHECK(std::abs(m1.mean) <= 3.0 * m1.stderr_);
  CHECK(std::abs(m2.mean) <= 3.0 * m2.stderr_);
}

TEST_CASE("generator closed forms at a point") {
  const ModelParams p = contagion_params();
  const double lam = 1.7;
  // L f for f = id: alpha (beta - lam) + lam E[ell] + rho E[Z2]
  CHECK(generator_identity(p, lam) ==
        doctest::Approx(2.0 * (1.0 - lam) + lam * 0.5 + 0.5 * 0.5)
            .epsilon(1e-12));
  // L f for f = square: 2 alpha (beta - lam) lam + lam (2 lam E[ell] +
  // E[ell^2]) + rho (2 lam E[Z2] + E[Z2^2])
  const double expected = 2.0 * 2.0 * (1.0 - lam) * lam +
                          lam * (2.0 * lam * 0.5 + 1.0 / 3.0) +
                          0.5 * (2.0 * lam * 0.5 + 1.0 / 3.0);
  CHECK(generator_square(p, lam) == doctest::Approx(expected).epsilon(1e-12));
}
