#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "cheapsub/numerics.hpp"
#include "oracles.hpp"

using namespace cheapsub;

namespace {

double tq(int df, double p) { return t_quantile(DegreesOfFreedom(df), Probability(p)); }

}  // namespace

TEST_SUITE("numerics") {

TEST_CASE("expit values and symmetry")
{
    CHECK(expit(0.0) == 0.5);
    CHECK(std::abs(expit(-0.2) - 0.450166) < 5e-7);
    CHECK(std::abs(expit(3.5) - 0.970688) < 5e-7);
    for (double x = -30.0; x <= 30.0; x += 0.125) CHECK(std::abs(expit(x) + expit(-x) - 1.0) <= 1e-15);
    CHECK(expit(40.0) == 1.0);
    CHECK(expit(-40.0) == 0.0);
    CHECK(logit(expit(1.7)) == doctest::Approx(1.7).epsilon(1e-12));
    CHECK_THROWS_AS(logit(0.0), std::domain_error);
}

TEST_CASE("strong types reject invalid values")
{
    CHECK_THROWS_AS(Probability(0.0), std::domain_error);
    CHECK_THROWS_AS(Probability(1.0), std::domain_error);
    CHECK_THROWS_AS(Probability(std::nan("")), std::domain_error);
    CHECK_THROWS_AS(DegreesOfFreedom(0), std::domain_error);
    CHECK(DegreesOfFreedom(3).value() == 3);
}

TEST_CASE("log gamma and incomplete beta")
{
    for (double x : {0.1, 0.5, 1.0, 2.5, 10.0, 123.4}) CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-12));
    CHECK(reg_inc_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(reg_inc_beta(2.0, 3.0, 0.0) == 0.0);
    CHECK(reg_inc_beta(2.0, 3.0, 1.0) == 1.0);
    // I_x(a, b) = 1 - I_{1-x}(b, a)
    CHECK(reg_inc_beta(2.5, 4.0, 0.3) == doctest::Approx(1.0 - reg_inc_beta(4.0, 2.5, 0.7)).epsilon(1e-13));
    // I_x(a, 1) = x^a
    CHECK(reg_inc_beta(3.0, 1.0, 0.6) == doctest::Approx(std::pow(0.6, 3.0)).epsilon(1e-13));
}

TEST_CASE("normal quantile against erfc bisection")
{
    const double q = normal_quantile(Probability(0.975));
    CHECK(std::abs(q - 1.959964) < 1e-6);
    CHECK(std::abs(q - oracle::normal_quantile_by_erfc(0.975)) < 1e-12);
    CHECK(std::abs(normal_quantile(Probability(0.5))) < 1e-15);
    CHECK(normal_quantile(Probability(0.025)) == doctest::Approx(-q).epsilon(1e-14));
    for (double p : {1e-10, 1e-4, 0.01, 0.2, 0.7, 0.99, 1 - 1e-6}) {
        CHECK(normal_quantile(Probability(p)) == doctest::Approx(oracle::normal_quantile_by_erfc(p)).epsilon(1e-10));
    }
    CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-14));
}

TEST_CASE("t quantile against numerical integration of the density")
{
    for (int df : {1, 2, 3, 5, 10, 25, 100, 500}) {
        CAPTURE(df);
        CHECK(std::abs(tq(df, 0.975) - oracle::t_quantile_by_integration(df, 0.975)) < 1e-8);
        CHECK(std::abs(tq(df, 0.9) - oracle::t_quantile_by_integration(df, 0.9)) < 1e-8);
    }
    CHECK(std::abs(tq(1, 0.975) - 12.7062) < 5e-5);
    CHECK(std::abs(tq(2, 0.975) - 4.30265) < 5e-6);
    CHECK(std::abs(tq(5, 0.975) - 2.570582) < 5e-7);
    CHECK(tq(7, 0.5) == 0.0);
    CHECK(tq(7, 0.025) == doctest::Approx(-tq(7, 0.975)).epsilon(1e-13));
}

TEST_CASE("t cdf")
{
    CHECK(t_cdf(DegreesOfFreedom(5), 0.0) == 0.5);
    CHECK(std::abs(t_cdf(DegreesOfFreedom(5), 2.570582) - 0.975) < 1e-7);
    for (int df : {1, 4, 30}) {
        for (double x : {0.3, 1.0, 2.5, 8.0}) {
            CHECK(t_cdf(DegreesOfFreedom(df), x) == doctest::Approx(oracle::t_cdf_by_integration(df, x)).epsilon(1e-11));
            CHECK(t_pdf(DegreesOfFreedom(df), x) == doctest::Approx(oracle::t_density(df, x)).epsilon(1e-12));
        }
    }
}

TEST_CASE("t quantile round trip over a df x p grid")
{
    double worst = 0.0;
    for (int df = 1; df <= 200; ++df) {
        for (int k = 1; k <= 999; k += 14) {
            const double p = k / 1000.0;
            worst = std::max(worst, std::abs(t_cdf(DegreesOfFreedom(df), tq(df, p)) - p));
        }
    }
    CHECK(worst < 1e-9);
}

TEST_CASE("t quantile monotonicity and normal limit")
{
    for (int df : {1, 3, 40}) {
        double prev = -INFINITY;
        for (int k = 1; k < 100; ++k) {
            const double q = tq(df, k / 100.0);
            CHECK(q > prev);
            prev = q;
        }
    }
    for (double p : {0.6, 0.9, 0.975, 0.999}) {
        double prev = INFINITY;
        for (int df = 1; df <= 300; ++df) {
            const double q = tq(df, p);
            CHECK(q < prev);
            prev = q;
        }
    }
    const double z = normal_quantile(Probability(0.975));
    CHECK(std::abs(tq(200, 0.975) - z) == doctest::Approx(0.011932).epsilon(1e-4));
    for (int df : {240, 500, 1000, 100000}) CHECK(std::abs(tq(df, 0.975) - z) < 0.01);
}

}
