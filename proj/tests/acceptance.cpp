// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any fails. Pass criterion numbers to run a subset.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "cheapsub/cli.hpp"
#include "cheapsub/dgm.hpp"
#include "cheapsub/intervals.hpp"
#include "cheapsub/longitudinal.hpp"
#include "cheapsub/numerics.hpp"
#include "cheapsub/replication.hpp"
#include "cheapsub/resampling.hpp"
#include "cheapsub/simstudy.hpp"
#include "oracles.hpp"

using namespace cheapsub;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* pattern, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, pattern, args...);
    return buf;
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

double reference_truth() { return truth_by_quadrature(TruthModel::from(DgmParameters{}, 1)); }

Outcome longitudinal_scenario(std::size_t n, double eta, std::size_t B, std::size_t n_sim, double cov_target,
                              double cov_tol, double width_target, double width_tol)
{
    ScenarioSpec spec;
    spec.n = n;
    spec.eta = eta;
    spec.B = B;
    spec.n_sim = n_sim;
    spec.methods = {Method::cheap_subsampling, Method::asymptotic_if};
    spec.master_seed = 1;
    const LongitudinalSimulation model({}, reference_truth());
    const auto report = run_coverage_study(spec, model);
    const auto& cs = report.summary(Method::cheap_subsampling);
    const double cov = 100.0 * cs.coverage;
    const bool ok = within(cov, cov_target, cov_tol) && within(cs.relative_width_pct, width_target, width_tol);
    return {ok, fmt("coverage %.1f (target %.1f +/- %.1f), relative width %.1f (target %.1f +/- %.1f), refits %zu",
                    cov, cov_target, cov_tol, cs.relative_width_pct, width_target, width_tol, cs.failures)};
}

Outcome criterion1() { return longitudinal_scenario(500, 0.632, 25, 1000, 93.8, 2.5, 104.9, 4.0); }

Outcome criterion2() { return longitudinal_scenario(2000, 0.9, 500, 500, 95.0, 3.0, 100.3, 2.0); }

Outcome criterion3()
{
    ScenarioSpec spec;
    spec.n = 1000;
    spec.eta = 0.632;
    spec.B = 10;
    spec.n_sim = 2000;
    spec.methods = {Method::cheap_subsampling};
    spec.master_seed = 1;
    const auto report = run_coverage_study(spec, NormalMeanSimulation{});
    const double cov = 100.0 * report.summary(Method::cheap_subsampling).coverage;
    return {report.m == 632 && cov >= 93.5 && cov <= 96.5,
            fmt("m %zu, coverage %.2f (target [93.5, 96.5])", report.m, cov)};
}

Outcome criterion4()
{
    Sample data;
    StreamRng rng(2024, 0);
    for (int i = 0; i < 200; ++i) data.values.push_back(rng.normal());
    const MeanEstimator est;
    const double point = point_estimate(est, data);
    auto sd_of_s2 = [&](std::size_t B) {
        std::vector<double> s2;
        for (std::size_t r = 0; r < 200; ++r) {
            ReplicationPlan plan;
            plan.master_seed = derive_seed(77, B, r);
            plan.replicates = B;
            plan.size = SubsampleRule::fixed(100);
            plan.workers = 0;
            const auto reps = run_replications(data, est, plan);
            const double S = replicate_spread(point, reps.estimates);
            s2.push_back(S * S);
        }
        return oracle::sample_sd(s2);
    };
    const double ratio = sd_of_s2(10) / sd_of_s2(1000);
    return {ratio >= 10.0 / 1.5 && ratio <= 15.0, fmt("sd ratio %.3f (target [%.3f, 15])", ratio, 10.0 / 1.5)};
}

Outcome criterion5()
{
    StreamRng rng(5, 0);
    const Probability alpha(0.05);
    double worst = 0.0;
    for (int set = 0; set < 1000; ++set) {
        const std::size_t n = 50 + rng.below(5000);
        const std::size_t m = 1 + rng.below(n - 1);
        const std::size_t B = 1 + rng.below(300);
        std::vector<double> reps(B);
        const double point = rng.normal();
        for (auto& r : reps) r = point + (0.1 + rng.uniform()) * rng.normal();
        const auto cs = cheap_subsampling_ci(point, reps, m, n, alpha);
        const auto jl = jackknife_limit_ci(point, reps, m, n, alpha);
        const double expected =
            t_quantile(DegreesOfFreedom(static_cast<double>(B)), Probability(0.975)) / normal_quantile(Probability(0.975));
        worst = std::max(worst, std::abs(cs.half_width() / jl.half_width() - expected));
    }
    return {worst <= 1e-12, fmt("max |ratio - t/q| %.3g over 1000 sets", worst)};
}

Outcome criterion6()
{
    std::size_t duplicates = 0;
    for (std::uint64_t d = 0; d < 10000; ++d) {
        const auto idx = subsample(200, 120, SeedSpec{6, d});
        std::set<std::size_t> seen(idx.indices.begin(), idx.indices.end());
        duplicates += idx.size() - seen.size();
    }
    std::size_t distinct = 0;
    const std::size_t draws = 100000;
    for (std::uint64_t d = 0; d < draws; ++d) {
        const auto idx = resample_with_replacement(5, 5, SeedSpec{66, d});
        std::set<std::size_t> seen(idx.indices.begin(), idx.indices.end());
        distinct += seen.size() == 5 ? 1 : 0;
    }
    const double p = static_cast<double>(distinct) / static_cast<double>(draws);
    return {duplicates == 0 && within(p, 0.0384, 0.005),
            fmt("duplicates %zu in 10^4 subsamples, P(all distinct) %.4f (target 0.0384 +/- 0.005)", duplicates, p)};
}

Outcome criterion7()
{
    double worst = 0.0;
    for (double df : {1.0, 2.0, 5.0, 25.0, 100.0, 500.0}) {
        const double lib = t_quantile(DegreesOfFreedom(df), Probability(0.975));
        worst = std::max(worst, std::abs(lib - oracle::t_quantile_by_integration(df, 0.975)));
    }
    const double z = normal_quantile(Probability(0.975));
    return {worst <= 1e-5 && within(z, 1.959964, 1e-6),
            fmt("max t-quantile error %.3g, normal quantile %.7f", worst, z)};
}

Outcome criterion8()
{
    const auto truth = truth_oracle(1, {}, 10'000'000, 20240601, 1.0);
    const double gap = std::abs(truth.quadrature - truth.monte_carlo);
    const auto data = generate_dgm(100000, 88);
    const double estimate = LongitudinalEstimator{}.fit_point(data);
    const double error = std::abs(estimate - truth.quadrature);
    return {gap <= 5e-4 && error <= 0.01,
            fmt("quadrature %.6f, Monte Carlo %.6f (gap %.2g), estimate at n=1e5 %.4f (error %.2g)", truth.quadrature,
                truth.monte_carlo, gap, estimate, error)};
}

int call(std::vector<std::string> args)
{
    args.insert(args.begin(), "cheapsub");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome criterion9()
{
    const auto dir = std::filesystem::temp_directory_path() / ("cheapsub_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto run_with = [&](const std::string& workers) {
        const auto base = dir / ("w" + workers);
        const int code = call({"simulate", "-n", "500", "--n-sim", "40", "-B", "25", "--seed", "2024", "--workers",
                               workers, "-o", base.string() + ".csv", "--raw-output", base.string() + "_raw.csv"});
        return std::make_pair(code, slurp(base.string() + ".csv") + slurp(base.string() + ".csv.json") +
                                        slurp(base.string() + "_raw.csv"));
    };
    const auto one = run_with("1");
    const auto eight = run_with("8");
    std::filesystem::remove_all(dir);
    const bool ok = one.first == 0 && eight.first == 0 && !one.second.empty() && one.second == eight.second;
    return {ok, fmt("exit codes %d/%d, %zu bytes, identical %s", one.first, eight.first, one.second.size(),
                    one.second == eight.second ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv)
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"longitudinal n=500 eta=0.632 B=25 coverage and width", criterion1},
        {"longitudinal n=2000 eta=0.9 B=500 coverage and width", criterion2},
        {"normal mean n=1000 m=632 B=10 coverage", criterion3},
        {"spread variance shrinks like 1/B", criterion4},
        {"subsampling over jackknife-limit width equals t/q", criterion5},
        {"subsamples are duplicate free; bootstrap collision rate", criterion6},
        {"t and normal quantiles", criterion7},
        {"truth oracles agree; estimator consistent at n=1e5", criterion8},
        {"simulate output independent of worker count", criterion9},
    };
    std::set<int> selected;
    for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!selected.empty() && !selected.contains(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome result;
        try {
            result = criteria[k].second();
        } catch (const std::exception& e) {
            result = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (result.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << criteria[k].first << " | "
                  << result.detail << fmt(" [%.1fs]", secs) << std::endl;
        failed += result.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
