#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "contagion/contracts.hpp"
#include "contagion/errors.hpp"
#include "contagion/rng.hpp"
#include "test_helpers.hpp"

using namespace contagion;
using namespace contagion::testing;

namespace {

const MarkDistribution kU01 = MarkDistribution::uniform(0.0, 1.0);

}  // namespace

TEST_CASE("mark distribution moments and samplers") {
  SUBCASE("uniform closed forms") {
    const auto d = MarkDistribution::uniform(0.0, 1.0);
    CHECK(d.mean() == doctest::Approx(0.5));
    CHECK(d.second_moment() == doctest::Approx(1.0 / 3.0));
    CHECK(d.mgf(1.0) == doctest::Approx(std::exp(1.0) - 1.0));
    CHECK(d.cdf(0.25) == doctest::Approx(0.25));
    // quadrature route agrees with the closed forms
    CHECK(d.integrate([](double z) { return z; }) ==
          doctest::Approx(d.mean()).epsilon(1e-13));
    CHECK(d.integrate([](double z) { return std::exp(z); }) ==
          doctest::Approx(d.mgf(1.0)).epsilon(1e-13));
  }

  SUBCASE("truncated exponential closed forms vs quadrature") {
    const auto d = MarkDistribution::truncated_exponential(2.0, 1.5);
    CHECK(d.integrate([](double z) { return z; }) ==
          doctest::Approx(d.mean()).epsilon(1e-12));
    CHECK(d.integrate([](double z) { return z * z; }) ==
          doctest::Approx(d.second_moment()).epsilon(1e-12));
    for (double a : {-1.0, -0.3, 0.5, 2.0, 3.7})
      CHECK(d.integrate([&](double z) { return std::exp(a * z); }) ==
            doctest::Approx(d.mgf(a)).epsilon(1e-12));
    CHECK(d.cdf(d.support_max()) == doctest::Approx(1.0));
  }

  SUBCASE("point mass is exact") {
    const auto d = MarkDistribution::point_mass(0.7);
    CHECK(d.mean() == 0.7);
    CHECK(d.mgf(2.0) == doctest::Approx(std::exp(1.4)));
    CHECK(d.integrate([](double z) { return z * z; }) ==
          doctest::Approx(0.49));
    CHECK(d.integrate_between([](double) { return 1.0; }, 0.0, 0.5) == 0.0);
    CHECK(d.integrate_between([](double) { return 1.0; }, 0.5, 1.0) == 1.0);
  }

  SUBCASE("sampler matches the law (moment check)") {
    Rng rng(99);
    for (const auto& d : {MarkDistribution::uniform(0.2, 1.4),
                          MarkDistribution::truncated_exponential(1.5, 2.0)}) {
      double acc = 0.0;
      const int n = 200000;
      for (int i = 0; i < n; ++i) acc += d.sample(rng);
      CHECK(acc / n == doctest::Approx(d.mean()).epsilon(5e-3));
    }
  }
}

TEST_CASE("retention functions") {
  const auto prop = RetentionContract::proportional();
  const auto xl = RetentionContract::excess_of_loss(1.0);
  const auto lxl = RetentionContract::limited_xl(2.0, 10.0);

  CHECK(prop.retention(7.0, 1.0) == 7.0);  // null reinsurance keeps z
  CHECK(xl.retention(3.0, 2.0) == 2.0);
  CHECK(lxl.retention(5.0, 1.0) == doctest::Approx(5.0 - 4.0 + 2.0));

  CHECK(prop.retention_deriv(7.0, 0.3) == 7.0);
  CHECK(xl.retention_deriv(3.0, 5.0) == 0.0);
  CHECK(lxl.retention_deriv(1.5, 1.0) == 1.0);

  SUBCASE("domain bounds are enforced") {
    CHECK_THROWS_AS(ceded_moment(prop, kU01, 1.5, 1), ConfigError);
    CHECK_THROWS_AS(ceded_moment(prop, kU01, -0.1, 1), ConfigError);
  }

  SUBCASE("retention is monotone in u and sandwiched") {
    Rng rng(3);
    for (const auto& c : {prop, xl, lxl}) {
      for (int i = 0; i < 200; ++i) {
        const double z = 10.0 * rng.uniform01();
        const double u1 = c.u_hi() * rng.uniform01();
        const double u2 = c.u_hi() * rng.uniform01();
        const double lo = std::min(u1, u2), hi = std::max(u1, u2);
        CHECK(c.retention(z, lo) <= c.retention(z, hi) + 1e-12);
        CHECK(c.retention(z, c.u_min()) >= -1e-12);
        CHECK(c.retention(z, hi) <= z + 1e-12);
      }
    }
  }
}

TEST_CASE("ceded moments") {
  const auto prop = RetentionContract::proportional();
  const auto xl = RetentionContract::excess_of_loss(1.0);

  CHECK(ceded_moment(prop, kU01, 1.0, 1) == 0.0);  // nothing ceded
  CHECK(ceded_moment(prop, kU01, 0.5, 2) ==
        doctest::Approx(0.25 / 3.0).epsilon(1e-12));
  CHECK(ceded_moment(xl, kU01, 0.0, 1) == doctest::Approx(0.5).epsilon(1e-12));

  SUBCASE("quadrature agrees with analytic forms for uniform claims") {
    // XL on U(0,1): E[(Z-u)^+] = (1-u)^2/2, E[((Z-u)^+)^2] = (1-u)^3/3.
    for (double u : {0.0, 0.25, 0.6, 0.9}) {
      CHECK(ceded_moment(xl, kU01, u, 1) ==
            doctest::Approx((1.0 - u) * (1.0 - u) / 2.0).epsilon(1e-10));
      CHECK(ceded_moment(xl, kU01, u, 2) ==
            doctest::Approx(std::pow(1.0 - u, 3) / 3.0).epsilon(1e-10));
    }
    // Limited XL with coverage b on U(0,1): ceded = min((z-u)^+, b).
    const auto lxl = RetentionContract::limited_xl(0.3, 1.0);
    for (double u : {0.0, 0.2, 0.5}) {
      const double b = 0.3;
      const double analytic =
          simpson([&](double z) { return std::min(std::max(z - u, 0.0), b); },
                  0.0, 1.0, 100000);
      CHECK(ceded_moment(lxl, kU01, u, 1) ==
            doctest::Approx(analytic).epsilon(1e-8));
    }
  }

  SUBCASE("point mass is exact") {
    const auto pm = MarkDistribution::point_mass(2.0);
    const auto lxl = RetentionContract::limited_xl(0.5, 5.0);
    CHECK(ceded_moment(lxl, pm, 1.0, 1) == doctest::Approx(0.5));  // capped
    CHECK(ceded_moment(lxl, pm, 1.8, 1) == doctest::Approx(0.2));
    CHECK(ceded_moment(lxl, pm, 3.0, 1) == 0.0);
  }
}

TEST_CASE("premium rates") {
  const auto prop = RetentionContract::proportional();

  SUBCASE("EVP insurance rate") {
    const auto evp = PremiumPrinciple::evp(0.2, 0.5);
    CHECK(insurance_rate(evp, kU01, 0.0, 2.0) ==
          doctest::Approx(1.2).epsilon(1e-13));
  }

  SUBCASE("VPP with vanishing loading reduces to the pure premium") {
    const auto vpp = PremiumPrinciple::vpp(1e-300, 1e-300);
    CHECK(insurance_rate(vpp, kU01, 0.0, 3.0) ==
          doctest::Approx(1.5).epsilon(1e-10));
  }

  SUBCASE("MVP with tiny loadings approaches the pure premium") {
    const auto mvp = PremiumPrinciple::mvp(1e-12, 1e-12, 1e-12, 1e-12);
    CHECK(insurance_rate(mvp, kU01, 0.0, 3.0) ==
          doctest::Approx(1.5).epsilon(1e-10));
  }

  SUBCASE("EVP reinsurance rate and derivative") {
    const auto evp = PremiumPrinciple::evp(0.2, 0.5);
    CHECK(reinsurance_rate(evp, prop, kU01, 0.0, 2.0, 1.0) == 0.0);
    CHECK(reinsurance_rate(evp, prop, kU01, 0.0, 2.0, 0.25) ==
          doctest::Approx(1.125).epsilon(1e-13));
    CHECK(reinsurance_rate_deriv(evp, prop, kU01, 0.0, 2.0, 0.6) ==
          doctest::Approx(-1.5).epsilon(1e-13));
  }

  SUBCASE("null protection is free, maximal protection is dearest") {
    const auto lxl = RetentionContract::limited_xl(0.4, 1.0);
    const auto xl = RetentionContract::excess_of_loss(1.0);
    for (const auto principle :
         {PremiumPrinciple::evp(0.2, 0.5), PremiumPrinciple::vpp(0.3, 0.4),
          PremiumPrinciple::mvp(0.2, 0.3, 0.4, 0.5)}) {
      for (const auto& c : {prop, xl, lxl}) {
        CHECK(reinsurance_rate(principle, c, kU01, 0.0, 1.0, c.u_hi()) ==
              doctest::Approx(0.0).epsilon(1e-12));
        double prev = reinsurance_rate(principle, c, kU01, 0.0, 1.0,
                                       c.u_min());
        for (double u = c.u_min(); u <= c.u_hi() + 1e-9;
             u += (c.u_hi() - c.u_min()) / 16.0) {
          const double q = reinsurance_rate(principle, c, kU01, 0.0, 1.0, u);
          CHECK(q <= prev + 1e-10);
          prev = q;
        }
      }
    }
  }

  SUBCASE("derivative matches central differences away from kinks") {
    const auto lxl = RetentionContract::limited_xl(0.4, 1.0);
    const auto xl = RetentionContract::excess_of_loss(1.0);
    const auto principle = PremiumPrinciple::mvp(0.2, 0.3, 0.4, 0.5);
    const double h = 1e-6;
    for (const auto& c : {prop, xl, lxl}) {
      for (double u : {0.11, 0.37, 0.62, 0.83}) {
        const double fd =
            (reinsurance_rate(principle, c, kU01, 0.0, 1.3, u + h) -
             reinsurance_rate(principle, c, kU01, 0.0, 1.3, u - h)) /
            (2.0 * h);
        const double exact =
            reinsurance_rate_deriv(principle, c, kU01, 0.0, 1.3, u);
        CHECK(exact == doctest::Approx(fd).epsilon(1e-5));
      }
    }
  }
}
