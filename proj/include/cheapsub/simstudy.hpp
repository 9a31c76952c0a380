#pragma once

// Monte Carlo harness: coverage / relative-width studies and the seed-effect
// experiment.
//
// Seed derivation: simulation s uses sim_seed = derive_seed(master, kSimulationDomain, s);
// its dataset, subsample replicates and bootstrap replicates use separate
// domains under sim_seed. Simulations run in parallel with sequential replicates
// inside each one, so reports are identical for any worker count.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "cheapsub/dgm.hpp"
#include "cheapsub/intervals.hpp"
#include "cheapsub/longitudinal.hpp"
#include "cheapsub/replication.hpp"
#include "cheapsub/rng.hpp"

namespace cheapsub {

inline constexpr std::uint64_t kSimulationDomain = 0x51;
inline constexpr std::uint64_t kDataDomain = 0xda7a;
inline constexpr std::uint64_t kSeedRunDomain = 0x5eed;

struct ScenarioSpec {
    std::size_t n = 500;
    double eta = 0.632;
    std::size_t B = 25;
    double alpha = 0.05;
    std::size_t n_sim = 1000;
    std::vector<Method> methods = {Method::cheap_subsampling, Method::cheap_bootstrap, Method::jackknife_limit,
                                   Method::asymptotic_if};
    std::uint64_t master_seed = 1;
    unsigned workers = 0;  ///< 0 = all cores
    unsigned max_retries = 5;

    bool has(Method m) const;
};

/// Throws std::invalid_argument naming the offending field.
void validate(const ScenarioSpec& spec);

std::uint64_t simulation_seed(const ScenarioSpec& spec, std::size_t sim_index) noexcept;

/// Intervals for one dataset, one per requested method (in spec.methods order).
struct SimulationDraw {
    std::vector<IntervalEstimate> intervals;
};

/// A data model plus estimator for the harness.
class SimulationModel {
public:
    virtual ~SimulationModel() = default;
    virtual std::string name() const = 0;
    virtual double truth() const = 0;
    virtual SimulationDraw simulate(const ScenarioSpec& spec, std::size_t sim_index) const = 0;
};

/// Intervals for one simulated dataset; replicates run sequentially.
template <class Data, class Est>
    requires Resamplable<Data> && EstimatorFor<Est, Data>
SimulationDraw draw_intervals(const Data& data, const Est& estimator, const ScenarioSpec& spec,
                              std::uint64_t sim_seed)
{
    IntervalRequest req;
    req.methods = spec.methods;
    req.alpha = Probability(spec.alpha);
    req.B = spec.B;
    req.size = SubsampleRule::fraction(spec.eta);
    req.max_retries = spec.max_retries;
    req.seed = sim_seed;
    return SimulationDraw{compute_intervals(data, estimator, req)};
}

/// Simulated two-interval survival data with the sequential-regression estimator.
class LongitudinalSimulation final : public SimulationModel {
public:
    LongitudinalSimulation(LongitudinalOptions options, double truth, DgmParameters params = {});

    std::string name() const override { return "longitudinal"; }
    double truth() const override { return truth_; }
    SimulationDraw simulate(const ScenarioSpec& spec, std::size_t sim_index) const override;

private:
    LongitudinalOptions options_;
    double truth_;
    DgmParameters params_;
};

/// i.i.d. normal data with the sample mean.
class NormalMeanSimulation final : public SimulationModel {
public:
    explicit NormalMeanSimulation(double mean = 0.0, double sd = 1.0);

    std::string name() const override { return "normal-mean"; }
    double truth() const override { return mean_; }
    SimulationDraw simulate(const ScenarioSpec& spec, std::size_t sim_index) const override;

private:
    double mean_;
    double sd_;
};

struct MethodSummary {
    Method method = Method::cheap_subsampling;
    std::size_t covered = 0;
    double coverage = 0.0;
    double coverage_se = 0.0;  ///< binomial standard error
    double mean_width = 0.0;
    /// 100 * mean width / mean asymptotic-if width (ratio of means); NaN without an IF interval.
    double relative_width_pct = std::numeric_limits<double>::quiet_NaN();
    std::size_t failures = 0;  ///< replicate refits after estimator failures, summed over simulations
    std::size_t dropped = 0;
};

struct CoverageReport {
    ScenarioSpec spec;
    std::string model;
    double truth = 0.0;
    std::size_t m = 0;
    std::vector<MethodSummary> methods;
    /// Per-simulation intervals (sim-major, spec.methods order); empty unless requested.
    std::vector<SimulationDraw> raw;

    const MethodSummary& summary(Method m) const;
};

CoverageReport run_coverage_study(const ScenarioSpec& spec, const SimulationModel& model, bool keep_raw = false);

/// "method,n,eta,m,B,alpha,coverage,coverage_se,mean_width,relative_width_pct,failures,seed"
std::string coverage_csv_header();
void write_coverage_csv(std::ostream& out, const CoverageReport& report);
/// sim,method,point,lower,upper,covered
void write_raw_intervals_csv(std::ostream& out, const CoverageReport& report);
void to_json(nlohmann::json& j, const ScenarioSpec& spec);
void from_json(const nlohmann::json& j, ScenarioSpec& spec);
void to_json(nlohmann::json& j, const CoverageReport& report);

// Seed-effect experiment: the whole cheap-subsampling procedure repeated with
// different seeds on one fixed dataset.

struct SeedExperimentSpec {
    std::vector<double> eta_grid = {0.5, 0.632, 0.8, 0.9};
    std::vector<std::size_t> B_grid = {5, 20, 100, 200};
    std::size_t n_seeds = 10;
    double alpha = 0.05;
    std::uint64_t master_seed = 1;
    unsigned workers = 0;
    unsigned max_retries = 5;
};

struct SeedExperimentCell {
    double eta = 0.0;
    std::size_t m = 0;
    std::size_t B = 0;
    std::vector<double> lower;  ///< one per seed run
    std::vector<double> upper;
    std::vector<double> S;
    double upper_min = 0.0;
    double upper_max = 0.0;
    double upper_spread = 0.0;  ///< max - min of upper endpoints
    double upper_sd = 0.0;      ///< across-run standard deviation (0 for one run)
};

struct SeedExperimentReport {
    std::size_t n = 0;
    double point = 0.0;
    SeedExperimentSpec spec;
    std::vector<SeedExperimentCell> cells;  ///< eta-major, then B
};

/// Throws std::invalid_argument on an empty grid or n_seeds == 0.
void validate(const SeedExperimentSpec& spec);

SeedExperimentCell summarize_seed_cell(double eta, std::size_t m, std::size_t B, std::vector<double> lower,
                                       std::vector<double> upper, std::vector<double> S);

template <class Data, class Est>
    requires Resamplable<Data> && EstimatorFor<Est, Data>
SeedExperimentReport run_seed_experiment(const Data& data, const Est& estimator, const SeedExperimentSpec& spec)
{
    validate(spec);
    const Probability alpha(spec.alpha);
    SeedExperimentReport report;
    report.n = record_count(data);
    report.spec = spec;
    report.point = point_estimate(estimator, data);
    for (double eta : spec.eta_grid) {
        for (std::size_t B : spec.B_grid) {
            std::vector<double> lower(spec.n_seeds);
            std::vector<double> upper(spec.n_seeds);
            std::vector<double> S(spec.n_seeds);
            std::size_t m = 0;
            for (std::size_t r = 0; r < spec.n_seeds; ++r) {
                ReplicationPlan plan;
                plan.master_seed = derive_seed(spec.master_seed, kSeedRunDomain, r);
                plan.replicates = B;
                plan.size = SubsampleRule::fraction(eta);
                plan.max_retries = spec.max_retries;
                plan.workers = spec.workers;
                const auto reps = run_replications(data, estimator, plan);
                const auto ci = cheap_subsampling_ci(report.point, reps, alpha);
                lower[r] = ci.lower;
                upper[r] = ci.upper;
                S[r] = ci.S;
                m = reps.m;
            }
            report.cells.push_back(summarize_seed_cell(eta, m, B, std::move(lower), std::move(upper), std::move(S)));
        }
    }
    return report;
}

/// eta,m,B,run,lower,upper,S  (one row per seed run) preceded by a header.
void write_seed_experiment_csv(std::ostream& out, const SeedExperimentReport& report);
void to_json(nlohmann::json& j, const SeedExperimentReport& report);

}  // namespace cheapsub
