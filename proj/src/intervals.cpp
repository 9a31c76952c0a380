#include "cheapsub/intervals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "cheapsub/errors.hpp"
#include "cheapsub/format.hpp"

namespace cheapsub {

bool IntervalRequest::has(Method m) const noexcept
{
    return std::find(methods.begin(), methods.end(), m) != methods.end();
}

namespace {

constexpr std::array<std::pair<Method, std::string_view>, 4> kMethodNames = {{
    {Method::cheap_subsampling, "cheap-subsampling"},
    {Method::cheap_bootstrap, "cheap-bootstrap"},
    {Method::jackknife_limit, "jackknife-limit"},
    {Method::asymptotic_if, "asymptotic-if"},
}};

void check_sizes(std::size_t m, std::size_t n)
{
    if (m == 0 || m >= n) {
        throw std::invalid_argument("subsample size must satisfy 1 <= m < n (got m=" + std::to_string(m) +
                                    ", n=" + std::to_string(n) + ")");
    }
}

IntervalEstimate centered(Method method, double point, double half_width, Probability alpha)
{
    IntervalEstimate est;
    est.method = method;
    est.point = point;
    est.lower = point - half_width;
    est.upper = point + half_width;
    est.alpha = alpha.value();
    return est;
}

double upper_t(std::size_t B, Probability alpha)
{
    return t_quantile(DegreesOfFreedom(static_cast<std::int64_t>(B)), Probability(1.0 - alpha.value() / 2.0));
}

double upper_normal(Probability alpha) { return normal_quantile(Probability(1.0 - alpha.value() / 2.0)); }

void attach_replicates(IntervalEstimate& est, double S, std::span<const double> replicates)
{
    est.B = replicates.size();
    est.S = S;
    est.replicate_estimates.assign(replicates.begin(), replicates.end());
    if (S == 0.0) est.warnings.emplace_back(kZeroSpreadWarning);
}

}  // namespace

std::string_view method_name(Method method) noexcept
{
    for (const auto& [m, name] : kMethodNames) {
        if (m == method) return name;
    }
    return "unknown";
}

Method parse_method(std::string_view name)
{
    for (const auto& [m, n] : kMethodNames) {
        if (n == name) return m;
    }
    throw std::invalid_argument("unknown interval method '" + std::string(name) + "'");
}

double replicate_spread(double point, std::span<const double> replicates)
{
    if (replicates.empty()) throw std::invalid_argument("replicate list is empty");
    double sum = 0.0;
    for (double r : replicates) sum += (r - point) * (r - point);
    return std::sqrt(sum / static_cast<double>(replicates.size()));
}

IntervalEstimate cheap_subsampling_ci(double point, std::span<const double> replicates, std::size_t m,
                                      std::size_t n, Probability alpha)
{
    check_sizes(m, n);
    const double S = replicate_spread(point, replicates);
    const double scale = std::sqrt(static_cast<double>(m) / static_cast<double>(n - m));
    auto est = centered(Method::cheap_subsampling, point, upper_t(replicates.size(), alpha) * scale * S, alpha);
    attach_replicates(est, S, replicates);
    est.m = m;
    est.n = n;
    est.k_factor = static_cast<double>(m) * static_cast<double>(n) / static_cast<double>(n - m);
    return est;
}

IntervalEstimate jackknife_limit_ci(double point, std::span<const double> replicates, std::size_t m,
                                    std::size_t n, Probability alpha)
{
    check_sizes(m, n);
    const double S = replicate_spread(point, replicates);
    const double variance = static_cast<double>(m) / static_cast<double>(n - m) * S * S;
    auto est = centered(Method::jackknife_limit, point, upper_normal(alpha) * std::sqrt(variance), alpha);
    attach_replicates(est, S, replicates);
    est.m = m;
    est.n = n;
    est.k_factor = static_cast<double>(m) * static_cast<double>(n) / static_cast<double>(n - m);
    return est;
}

IntervalEstimate cheap_bootstrap_ci(double point, std::span<const double> replicates, Probability alpha,
                                    std::size_t n)
{
    const double S = replicate_spread(point, replicates);
    auto est = centered(Method::cheap_bootstrap, point, upper_t(replicates.size(), alpha) * S, alpha);
    attach_replicates(est, S, replicates);
    est.m = n;
    est.n = n;
    est.k_factor = static_cast<double>(n);
    return est;
}

IntervalEstimate asymptotic_if_ci(const EstimateWithIF& estimate, Probability alpha)
{
    if (!estimate.influence) throw Unsupported("asymptotic-if interval: estimator provides no influence values");
    const auto& phi = *estimate.influence;
    if (phi.empty()) throw Unsupported("asymptotic-if interval: influence vector is empty");
    const auto n = static_cast<double>(phi.size());
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : phi) {
        sum += v;
        sum_sq += v * v;
    }
    const double sigma = std::sqrt(sum_sq / n);
    auto est = centered(Method::asymptotic_if, estimate.point, upper_normal(alpha) * sigma / std::sqrt(n), alpha);
    est.n = phi.size();
    est.S = sigma;
    est.k_factor = n;
    if (std::abs(sum / n) > 1e-6 * (sigma + 1e-12)) est.warnings.emplace_back(kUncenteredInfluenceWarning);
    if (sigma == 0.0) est.warnings.emplace_back(kZeroSpreadWarning);
    return est;
}

IntervalEstimate cheap_subsampling_ci(double point, const ReplicationResult& reps, Probability alpha)
{
    auto est = cheap_subsampling_ci(point, reps.estimates, reps.m, reps.n, alpha);
    est.retries = reps.total_retries;
    est.dropped = reps.dropped;
    return est;
}

IntervalEstimate jackknife_limit_ci(double point, const ReplicationResult& reps, Probability alpha)
{
    auto est = jackknife_limit_ci(point, reps.estimates, reps.m, reps.n, alpha);
    est.retries = reps.total_retries;
    est.dropped = reps.dropped;
    return est;
}

IntervalEstimate cheap_bootstrap_ci(double point, const ReplicationResult& reps, Probability alpha)
{
    auto est = cheap_bootstrap_ci(point, reps.estimates, alpha, reps.n);
    est.retries = reps.total_retries;
    est.dropped = reps.dropped;
    return est;
}

void to_json(nlohmann::json& j, const IntervalEstimate& est)
{
    j = nlohmann::json{
        {"method", std::string(method_name(est.method))},
        {"point", est.point},
        {"lower", est.lower},
        {"upper", est.upper},
        {"alpha", est.alpha},
        {"B", est.B},
        {"m", est.m},
        {"n", est.n},
        {"S", est.S},
        {"k_factor", est.k_factor},
        {"retries", est.retries},
        {"dropped", est.dropped},
        {"warnings", est.warnings},
        {"replicate_estimates", est.replicate_estimates},
    };
}

std::string interval_csv_header() { return "method,point,lower,upper,alpha,B,m,n,S,warnings"; }

std::string interval_csv_row(const IntervalEstimate& est)
{
    std::string warnings;
    for (const auto& w : est.warnings) {
        if (!warnings.empty()) warnings += ';';
        warnings += w;
    }
    std::string row;
    row += method_name(est.method);
    for (double v : {est.point, est.lower, est.upper, est.alpha}) row += ',' + format_double(v);
    row += ',' + std::to_string(est.B) + ',' + std::to_string(est.m) + ',' + std::to_string(est.n);
    row += ',' + format_double(est.S) + ',' + csv_escape(warnings);
    return row;
}

}  // namespace cheapsub
