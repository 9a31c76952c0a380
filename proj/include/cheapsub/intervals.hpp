#pragma once

// Confidence-interval constructors.
//
// All four intervals are centered at the full-data estimate. With
// S = sqrt(mean_b (replicate_b - point)^2):
//
//   cheap subsampling  point +/- t_{B,1-a/2} * sqrt(m/(n-m)) * S
//   jackknife limit    point +/- q_{1-a/2}   * sqrt(m/(n-m)) * S
//   cheap bootstrap    point +/- t_{B,1-a/2} * S      (size-n resamples)
//   influence (IF)     point +/- q_{1-a/2}   * sqrt(mean_i phi_i^2 / n)

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "cheapsub/estimate.hpp"
#include "cheapsub/numerics.hpp"
#include "cheapsub/replication.hpp"

namespace cheapsub {

enum class Method {
    cheap_subsampling,
    cheap_bootstrap,
    jackknife_limit,
    asymptotic_if,
};

std::string_view method_name(Method method) noexcept;
/// Accepts the names produced by method_name(); throws std::invalid_argument otherwise.
Method parse_method(std::string_view name);

/// Machine-readable warning emitted when every replicate equals the point estimate.
inline constexpr std::string_view kZeroSpreadWarning = "degenerate-zero-spread";
inline constexpr std::string_view kUncenteredInfluenceWarning = "influence-not-centered";

struct IntervalEstimate {
    Method method = Method::cheap_subsampling;
    double point = 0.0;
    double lower = 0.0;
    double upper = 0.0;
    double alpha = 0.05;
    std::size_t B = 0;  ///< realized replicates; 0 for the influence interval
    std::size_t m = 0;  ///< records per replicate (n for the bootstrap, 0 for IF)
    std::size_t n = 0;
    /// Replicate spread S; for the influence interval, the IF standard deviation.
    double S = 0.0;
    std::vector<double> replicate_estimates;
    /// Scale k with sqrt(k) (replicate - point) ~ N(0, sigma^2): m n/(n-m) for
    /// the subsampling intervals, n for the bootstrap and influence intervals.
    double k_factor = 0.0;
    std::size_t retries = 0;  ///< replicate refits after estimator failures
    std::size_t dropped = 0;  ///< replicates that failed permanently
    std::vector<std::string> warnings;

    double half_width() const noexcept { return 0.5 * (upper - lower); }
    double width() const noexcept { return upper - lower; }
    bool contains(double value) const noexcept { return lower <= value && value <= upper; }
};

/// sqrt(mean (r_b - point)^2); throws std::invalid_argument on an empty list.
double replicate_spread(double point, std::span<const double> replicates);

IntervalEstimate cheap_subsampling_ci(double point, std::span<const double> replicates, std::size_t m,
                                      std::size_t n, Probability alpha);
IntervalEstimate cheap_bootstrap_ci(double point, std::span<const double> replicates, Probability alpha,
                                    std::size_t n = 0);
IntervalEstimate jackknife_limit_ci(double point, std::span<const double> replicates, std::size_t m,
                                    std::size_t n, Probability alpha);
/// Throws Unsupported if the estimate carries no influence values.
IntervalEstimate asymptotic_if_ci(const EstimateWithIF& estimate, Probability alpha);

/// Convenience overloads that carry retry/drop counts from the engine.
IntervalEstimate cheap_subsampling_ci(double point, const ReplicationResult& reps, Probability alpha);
IntervalEstimate jackknife_limit_ci(double point, const ReplicationResult& reps, Probability alpha);
IntervalEstimate cheap_bootstrap_ci(double point, const ReplicationResult& reps, Probability alpha);

void to_json(nlohmann::json& j, const IntervalEstimate& est);

inline constexpr std::uint64_t kSubsampleDomain = 0x5b5;
inline constexpr std::uint64_t kBootstrapDomain = 0xb007;

/// Everything needed to build a set of intervals on one dataset.
struct IntervalRequest {
    std::vector<Method> methods;
    Probability alpha{0.05};
    std::size_t B = 25;
    SubsampleRule size = SubsampleRule::fraction(0.632);
    unsigned max_retries = 5;
    unsigned workers = 1;
    /// Subsample replicates use derive_seed(seed, kSubsampleDomain, 0) as their
    /// master seed, bootstrap replicates derive_seed(seed, kBootstrapDomain, 0).
    std::uint64_t seed = 0;

    bool has(Method m) const noexcept;
};

/// Fits the full data once (with influence values only if the IF interval is
/// requested), runs the replicates each method needs, and returns one interval
/// per requested method in request order. The two subsampling intervals share
/// the same replicates.
template <class Data, class Est>
    requires Resamplable<Data> && EstimatorFor<Est, Data>
std::vector<IntervalEstimate> compute_intervals(const Data& data, const Est& estimator, const IntervalRequest& req)
{
    const EstimateWithIF full = req.has(Method::asymptotic_if)
                                    ? EstimateWithIF(estimator.fit(data))
                                    : EstimateWithIF{point_estimate(estimator, data), std::nullopt};

    std::optional<ReplicationResult> sub;
    std::optional<ReplicationResult> boot;
    if (req.has(Method::cheap_subsampling) || req.has(Method::jackknife_limit)) {
        ReplicationPlan plan;
        plan.master_seed = derive_seed(req.seed, kSubsampleDomain, 0);
        plan.replicates = req.B;
        plan.size = req.size;
        plan.max_retries = req.max_retries;
        plan.workers = req.workers;
        sub = run_replications(data, estimator, plan);
    }
    if (req.has(Method::cheap_bootstrap)) {
        ReplicationPlan plan;
        plan.master_seed = derive_seed(req.seed, kBootstrapDomain, 0);
        plan.replicates = req.B;
        plan.scheme = ResampleScheme::bootstrap;
        plan.max_retries = req.max_retries;
        plan.workers = req.workers;
        boot = run_replications(data, estimator, plan);
    }

    std::vector<IntervalEstimate> out;
    for (Method m : req.methods) {
        switch (m) {
        case Method::cheap_subsampling: out.push_back(cheap_subsampling_ci(full.point, *sub, req.alpha)); break;
        case Method::jackknife_limit: out.push_back(jackknife_limit_ci(full.point, *sub, req.alpha)); break;
        case Method::cheap_bootstrap: out.push_back(cheap_bootstrap_ci(full.point, *boot, req.alpha)); break;
        case Method::asymptotic_if: out.push_back(asymptotic_if_ci(full, req.alpha)); break;
        }
    }
    return out;
}

/// "method,point,lower,upper,alpha,B,m,n,S,warnings"
std::string interval_csv_header();
/// One CSV row; warnings joined with ';'.
std::string interval_csv_row(const IntervalEstimate& est);

}  // namespace cheapsub
