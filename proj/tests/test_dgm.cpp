#include <doctest.h>

#include <cmath>
#include <numbers>

#include "cheapsub/dgm.hpp"
#include "cheapsub/logistic.hpp"
#include "cheapsub/numerics.hpp"
#include "oracles.hpp"

using namespace cheapsub;

namespace {

// Intercept of a logistic fit of `flag` on W0 over records selected by `keep`:
// the model probability at W0 = 0.
template <class Keep, class Flag>
double probability_at_zero(const LongitudinalDataset& d, Keep keep, Flag flag)
{
    std::vector<const LongitudinalRecord*> rows;
    for (const auto& r : d.records) {
        if (keep(r)) rows.push_back(&r);
    }
    Eigen::MatrixXd X(static_cast<Eigen::Index>(rows.size()), 2);
    Eigen::VectorXd y(X.rows());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = rows[static_cast<std::size_t>(i)]->w0;
        y[i] = flag(*rows[static_cast<std::size_t>(i)]);
    }
    return expit(fit_logistic(X, y).coefficients[0]);
}

// Standard normal expectation by Simpson's rule on [-12, 12].
double normal_expectation(const std::function<double(double)>& f)
{
    return oracle::integrate([&](double x) { return f(x) * std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); },
                             -12.0, 12.0, 1e-12);
}

}  // namespace

TEST_SUITE("dgm") {

TEST_CASE("generator is deterministic in its seed")
{
    const auto a = generate_dgm(50, 7);
    const auto b = generate_dgm(50, 7);
    const auto c = generate_dgm(50, 8);
    REQUIRE(a.records.size() == 50);
    bool same = true, differs = false;
    for (std::size_t i = 0; i < 50; ++i) {
        same = same && a.records[i].w0 == b.records[i].w0 && a.records[i].y2 == b.records[i].y2;
        differs = differs || a.records[i].w0 != c.records[i].w0;
    }
    CHECK(same);
    CHECK(differs);
    CHECK_THROWS_AS(generate_dgm(0, 1), std::invalid_argument);
}

TEST_CASE("treatment and censoring probabilities at W0 = 0 match the design at n = 1e6")
{
    const auto d = generate_dgm(1000000, 2024);
    const double p_a0 = probability_at_zero(d, [](const auto&) { return true; }, [](const auto& r) { return double(r.a0); });
    const double p_c1 = probability_at_zero(d, [](const auto&) { return true; }, [](const auto& r) { return double(r.c1); });
    CHECK(std::abs(p_a0 - 0.450166) < 0.002);
    CHECK(std::abs(p_c1 - 0.970688) < 0.002);
}

TEST_CASE("censoring removes later variables, events are absorbing")
{
    const auto d = generate_dgm(20000, 4);
    int censored1 = 0, events1 = 0, censored2 = 0;
    for (const auto& r : d.records) {
        if (r.c1 == 0) {
            ++censored1;
            CHECK(r.c2 == 0);
            CHECK(r.y1 == kMissing);
        } else if (r.y1 == 1) {
            ++events1;
            CHECK(r.y2 == 1);
        } else if (r.c2 == 0) {
            ++censored2;
            CHECK(r.y2 == kMissing);
        }
    }
    CHECK(censored1 > 0);
    CHECK(events1 > 0);
    CHECK(censored2 > 0);
}

TEST_CASE("degenerate outcome models give risk 0 and 1")
{
    TruthModel zero = TruthModel::from(DgmParameters{}, 1);
    zero.event1 = [](double) { return 0.0; };
    zero.event2 = [](double) { return 0.0; };
    CHECK(truth_by_quadrature(zero) == 0.0);
    CHECK(truth_by_monte_carlo(zero, 1000, 1) == 0.0);
    TruthModel one = zero;
    one.event1 = [](double) { return 1.0; };
    one.event2 = [](double) { return 1.0; };
    CHECK(truth_by_quadrature(one) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(truth_by_monte_carlo(one, 1000, 1) == 1.0);
}

TEST_CASE("quadrature agrees with direct Simpson integration")
{
    for (int regime : {0, 1}) {
        const TruthModel m = TruthModel::from(DgmParameters{}, regime);
        const double direct = normal_expectation([&](double w0) {
            const double inner = normal_expectation([&](double e) { return m.event2(m.w1_slope * w0 + m.w1_shift + e); });
            const double p1 = m.event1(w0);
            return p1 + (1.0 - p1) * inner;
        });
        CAPTURE(regime);
        CHECK(std::abs(truth_by_quadrature(m) - direct) < 1e-10);
    }
}

TEST_CASE("quadrature vs Monte Carlo at 1e6 draws")
{
    const TruthModel m = TruthModel::from(DgmParameters{}, 1);
    const double q = truth_by_quadrature(m);
    const double mc = truth_by_monte_carlo(m, 1000000, 5);
    // 4 binomial standard errors
    CHECK(std::abs(q - mc) < 4.0 * std::sqrt(q * (1.0 - q) / 1e6));
    CHECK_THROWS_AS(truth_oracle(1, DgmParameters{}, 1000, 1, 1e-9), std::runtime_error);
    CHECK_THROWS_AS(TruthModel::from(DgmParameters{}, 3), std::invalid_argument);
}

}
