#include <doctest.h>

#include <atomic>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "cheapsub/errors.hpp"
#include "cheapsub/estimate.hpp"
#include "cheapsub/replication.hpp"
#include "oracles.hpp"

using namespace cheapsub;

namespace {

Sample normal_sample(std::size_t n, std::uint64_t seed)
{
    StreamRng rng(seed, 0);
    Sample s;
    for (std::size_t i = 0; i < n; ++i) s.values.push_back(rng.normal());
    return s;
}

// Fails whenever the subsample contains the value 0.
struct PickyMean {
    EstimateWithIF fit(const Sample& s) const
    {
        for (double v : s.values) {
            if (v == 0.0) throw EstimatorFailure("zero in sample");
        }
        return fit_mean(s.values);
    }
    bool provides_influence() const noexcept { return true; }
};

struct AlwaysFails {
    EstimateWithIF fit(const Sample&) const { throw EstimatorFailure("nope"); }
    bool provides_influence() const noexcept { return false; }
};

}  // namespace

TEST_SUITE("replication") {

TEST_CASE("mean examples")
{
    auto f = fit_mean(std::vector<double>{1, 1, 1});
    CHECK(f.point == 1.0);
    CHECK(*f.influence == std::vector<double>{0, 0, 0});
    f = fit_mean(std::vector<double>{0, 2});
    CHECK(f.point == 1.0);
    CHECK(*f.influence == std::vector<double>{-1, 1});
    f = fit_mean(std::vector<double>{1, 2, 3, 4});
    CHECK(f.point == 2.5);
    CHECK(*f.influence == std::vector<double>{-1.5, -0.5, 0.5, 1.5});
    CHECK_THROWS_AS(fit_mean(std::vector<double>{1}), DataError);
}

TEST_CASE("subsample rule")
{
    CHECK(SubsampleRule::fraction(0.8).resolve(8652) == 6921);
    CHECK(SubsampleRule::fraction(0.8).resolve(8563) == 6850);
    CHECK(SubsampleRule::fraction(0.632).resolve(2000) == 1264);
    CHECK(SubsampleRule::fixed(5).resolve(10) == 5);
    CHECK_THROWS_AS(SubsampleRule::fixed(10).resolve(10), std::invalid_argument);
    CHECK_THROWS_AS(SubsampleRule::fraction(0.1).resolve(5), std::invalid_argument);
    CHECK_THROWS_AS(SubsampleRule::fraction(1.0), std::invalid_argument);
}

TEST_CASE("B=1 on {1,2,3,4} with m=2 is the mean of the drawn pair")
{
    const Sample data{{1, 2, 3, 4}};
    ReplicationPlan plan;
    plan.master_seed = 77;
    plan.size = SubsampleRule::fixed(2);
    const auto r = run_replications(data, MeanEstimator{}, plan);
    REQUIRE(r.realized() == 1);
    const auto idx = draw_replicate_indices(plan, 4, 0, 0).indices;
    CHECK(r.estimates[0] == 0.5 * (data.values[idx[0]] + data.values[idx[1]]));
    CHECK(r.m == 2);
    CHECK(run_replications(data, MeanEstimator{}, plan).estimates == r.estimates);
}

TEST_CASE("replicates do not depend on the worker count")
{
    const auto data = normal_sample(300, 5);
    ReplicationPlan plan;
    plan.master_seed = 11;
    plan.replicates = 257;
    std::vector<double> reference;
    for (unsigned w : {1u, 4u, 16u}) {
        plan.workers = w;
        const auto r = run_replications(data, MeanEstimator{}, plan);
        if (reference.empty()) reference = r.estimates;
        CHECK(r.estimates == reference);
    }
    plan.scheme = ResampleScheme::bootstrap;
    plan.workers = 1;
    const auto one = run_replications(data, MeanEstimator{}, plan);
    plan.workers = 16;
    CHECK(run_replications(data, MeanEstimator{}, plan).estimates == one.estimates);
    CHECK(one.m == 300);
}

TEST_CASE("variance of subsample means matches exhaustive enumeration")
{
    // Enumeration at n=10, m=5 pins down the finite-population formula.
    const auto small = normal_sample(10, 3);
    std::vector<double> means;
    for (const auto& s : oracle::all_subsets(10, 5)) {
        double sum = 0.0;
        for (auto i : s) sum += small.values[i];
        means.push_back(sum / 5.0);
    }
    const double sigma2 = oracle::population_variance(small.values);
    CHECK(oracle::population_variance(means) == doctest::Approx(sigma2 / 5.0 * (10.0 - 5.0) / 9.0).epsilon(1e-12));

    const auto data = normal_sample(100, 8);
    ReplicationPlan plan;
    plan.master_seed = 4;
    plan.replicates = 1000;
    plan.size = SubsampleRule::fixed(50);
    const auto r = run_replications(data, MeanEstimator{}, plan);
    const double expected = oracle::population_variance(data.values) / 50.0 * (1.0 - 49.0 / 99.0);
    CHECK(std::abs(oracle::population_variance(r.estimates) / expected - 1.0) < 0.1);
}

TEST_CASE("failed replicates are refit on fresh streams")
{
    Sample data;
    for (int i = 0; i < 20; ++i) data.values.push_back(i);  // contains one 0
    ReplicationPlan plan;
    plan.master_seed = 1;
    plan.replicates = 50;
    plan.size = SubsampleRule::fixed(3);
    plan.max_retries = 20;
    const auto r = run_replications(data, PickyMean{}, plan);
    CHECK(r.realized() == 50);
    CHECK(r.total_retries > 0);
    std::size_t sum = 0;
    for (auto k : r.retries) sum += k;
    CHECK(sum == r.total_retries);
    for (std::size_t b = 0; b < 50; ++b) {
        const auto idx = draw_replicate_indices(plan, 20, b, r.retries[b]).indices;
        double s = 0.0;
        for (auto i : idx) {
            CHECK(data.values[i] != 0.0);
            s += data.values[i];
        }
        CHECK(r.estimates[b] == doctest::Approx(s / 3.0));
    }
}

TEST_CASE("exhausted retries are an error unless dropping is allowed")
{
    const Sample data{{1, 2, 3, 4, 5}};
    ReplicationPlan plan;
    plan.replicates = 3;
    plan.size = SubsampleRule::fixed(2);
    plan.max_retries = 2;
    CHECK_THROWS_AS(run_replications(data, AlwaysFails{}, plan), ReplicationFailure);
    plan.drop_exhausted = true;
    CHECK_THROWS_AS(run_replications(data, AlwaysFails{}, plan), ReplicationFailure);  // nothing left

    Sample with_zero{{0, 1, 2}};
    plan.replicates = 40;
    plan.max_retries = 0;
    const auto r = run_replications(with_zero, PickyMean{}, plan);
    CHECK(r.dropped > 0);
    CHECK(r.realized() + r.dropped == 40);
    CHECK(r.replicate_ids.size() == r.realized());
}

TEST_CASE("plan validation")
{
    ReplicationPlan plan;
    plan.replicates = 0;
    CHECK_THROWS_AS(run_replications(Sample{{1, 2, 3}}, MeanEstimator{}, plan), std::invalid_argument);
}

}
